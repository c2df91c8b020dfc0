#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "robprod/classify.hpp"
#include "robprod/dataset.hpp"
#include "robprod/estimate.hpp"
#include "robprod/mst.hpp"
#include "robprod/pipeline.hpp"
#include "robprod/pmst.hpp"
#include "robprod/univariate.hpp"

namespace robprod {

using Json = nlohmann::json;

// {"tool": "robprod", "version": ..., "stage": ...}
Json provenance(const std::string& stage);

Json to_json(const MstResult& mst);
Json to_json(const DecontaminationResult& result);
Json to_json(const TrimResult& result, const TrimRule& rule);
Json to_json(const OutlierClassification& result, const std::vector<std::string>& dims);
Json to_json(const ModelSpec& spec);
Json to_json(const EstimationResult& result, const ModelSpec& spec);

Json decontamination_report(const DecontaminationResult& result, const PruneConfig& config);
Json trim_report(const TrimResult& result, const TrimRule& rule, Scale scale);
Json classification_report(const OutlierClassification& result, const std::vector<std::string>& dims);
Json estimation_report(const EstimationResult& result, const ModelSpec& spec);
Json pipeline_report(const PipelineResult& result, const PipelineConfig& config);

// Comparison table of the four samples, one column per sample.
void write_pipeline_table(std::ostream& out, const PipelineResult& result);
void write_pipeline_csv(std::ostream& out, const PipelineResult& result);

// Point cloud files: header "id,<dim names>", one point per line.
void write_cloud(std::ostream& out, const PointCloud& cloud, const std::vector<std::string>& dim_names);
struct NamedCloud {
  PointCloud cloud;
  std::vector<std::string> dim_names;
};
NamedCloud read_cloud(std::istream& in, char delimiter = ',');

// Stable text form: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace robprod
