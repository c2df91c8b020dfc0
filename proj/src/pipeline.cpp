#include "robprod/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "robprod/errors.hpp"

namespace robprod {

PipelineResult run_pipeline(const PanelDataset& data, const PipelineConfig& config) {
  PipelineResult out;
  out.log_data = data.scale == Scale::Log ? data : log_transform(data);
  out.cloud = to_point_cloud(out.log_data, config.cloud_dims);
  out.decontamination = decontaminate(out.cloud, config.prune);
  out.trim = trim(data, config.trim);

  out.classify_dims = config.classify_dims.empty() ? config.cloud_dims : config.classify_dims;
  const PointCloud full = to_point_cloud(out.log_data, out.classify_dims);
  const DominanceBoundary boundary = build_boundaries(full.subset(out.decontamination.non_outliers));
  out.classification = classify_outliers(full.subset(out.decontamination.outliers), boundary);

  const std::unordered_set<std::string> everything = all_ids(out.log_data);
  const std::unordered_set<std::string> uni(out.trim.kept_ids.begin(), out.trim.kept_ids.end());
  const std::unordered_set<std::string> multi(out.decontamination.non_outlier_ids.begin(),
                                              out.decontamination.non_outlier_ids.end());
  std::unordered_set<std::string> small_large = everything;
  for (std::size_t i = 0; i < out.classification.ids.size(); ++i)
    if (out.classification.labels[i] != OutlierLabel::Neither) small_large.erase(out.classification.ids[i]);

  const std::vector<const std::unordered_set<std::string>*> keeps = {&everything, &uni, &multi, &small_large};
  for (std::size_t s = 0; s < kSchemes.size(); ++s) {
    SchemeResult scheme;
    scheme.name = kSchemes[s];
    scheme.kept_records = keeps[s]->size();
    scheme.sample = filter_min_consecutive(out.log_data, *keeps[s], config.min_run);
    try {
      scheme.estimate = fit(scheme.sample, config.model);
    } catch (const NumericalError& e) {
      scheme.error = e.what();
    } catch (const DataError& e) {
      scheme.error = e.what();
    }
    out.schemes.push_back(std::move(scheme));
  }
  return out;
}

}  // namespace robprod
