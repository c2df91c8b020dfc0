#pragma once

#include <span>
#include <string>
#include <vector>

#include "robprod/dataset.hpp"

namespace robprod {

struct TrimRule {
  double scale = 1.5;  // s in [Q1 - s*IQR, Q3 + s*IQR]
  Measure numerator = Measure::Output;
  Measure denominator = Measure::Capital;
  // Average the ratio within each farm and trim whole farms.
  bool per_farm = true;
};

struct TrimResult {
  std::vector<std::string> kept_ids;
  std::vector<std::string> trimmed_ids;
  double q1 = 0.0;
  double q3 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t units = 0;  // number of ratios the quartiles were taken over
};

// Linear interpolation between order statistics (Hyndman-Fan type 7).
// `sorted` must be ascending and nonempty; prob in [0, 1].
double quantile_type7(std::span<const double> sorted, double prob);

// Flags records (or farms) whose ratio lies outside the inclusive bounds.
// Throws DataError on a zero denominator.
TrimResult trim(const PanelDataset& data, const TrimRule& rule = {});

}  // namespace robprod
