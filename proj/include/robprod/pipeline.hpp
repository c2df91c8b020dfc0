#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robprod/classify.hpp"
#include "robprod/dataset.hpp"
#include "robprod/estimate.hpp"
#include "robprod/pmst.hpp"
#include "robprod/univariate.hpp"

namespace robprod {

struct PipelineConfig {
  PruneConfig prune;
  std::vector<Measure> cloud_dims{kAllMeasures.begin(), kAllMeasures.end()};
  // coordinates used for the large/small split; empty means cloud_dims
  std::vector<Measure> classify_dims;
  TrimRule trim;
  ModelSpec model;
  int min_run = 4;
};

// Sample names in report order.
inline const std::vector<std::string> kSchemes = {"no-out", "uni-out", "full-out", "small-large"};

struct SchemeResult {
  std::string name;
  std::size_t kept_records = 0;   // before the consecutive-years rule
  PanelDataset sample;            // log scale, after the rule
  std::optional<EstimationResult> estimate;
  std::optional<std::string> error;
};

struct PipelineResult {
  PanelDataset log_data;
  PointCloud cloud{1};
  DecontaminationResult decontamination;
  TrimResult trim;
  OutlierClassification classification;
  std::vector<Measure> classify_dims;
  std::vector<SchemeResult> schemes;  // kSchemes order
};

// Decontaminates (pMST and IQR trim), splits the multivariate outliers into
// large/small/neither and fits the model on the four samples. `data` may
// be raw, deflated or log scale; the trim ratio is taken on `data` as given.
PipelineResult run_pipeline(const PanelDataset& data, const PipelineConfig& config);

}  // namespace robprod
