#include "robprod/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "robprod/errors.hpp"

namespace robprod {

double quantile_type7(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile_type7: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("quantile_type7: prob outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TrimResult trim(const PanelDataset& data, const TrimRule& rule) {
  if (!(rule.scale > 0.0)) throw std::invalid_argument("trim: scale factor must be positive");
  if (data.records.empty()) throw DataError("trim: no records");

  std::vector<double> ratio(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& r = data.records[i];
    const double den = r.get(rule.denominator);
    if (den == 0.0) throw DataError("trim: zero " + std::string(to_string(rule.denominator)) + " in record " + r.id());
    ratio[i] = r.get(rule.numerator) / den;
  }

  // unit_of[i] indexes the value record i is judged by.
  std::vector<std::size_t> unit_of(data.size());
  std::vector<double> unit_value;
  if (rule.per_farm) {
    std::map<std::string, std::size_t> farm_unit;
    std::vector<std::size_t> counts;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto [it, fresh] = farm_unit.emplace(data.records[i].farm_id, unit_value.size());
      if (fresh) {
        unit_value.push_back(0.0);
        counts.push_back(0);
      }
      unit_of[i] = it->second;
      unit_value[it->second] += ratio[i];
      ++counts[it->second];
    }
    for (std::size_t u = 0; u < unit_value.size(); ++u) unit_value[u] /= static_cast<double>(counts[u]);
  } else {
    unit_value = ratio;
    for (std::size_t i = 0; i < data.size(); ++i) unit_of[i] = i;
  }

  TrimResult out;
  out.units = unit_value.size();
  if (unit_value.empty()) return out;

  std::vector<double> sorted = unit_value;
  std::sort(sorted.begin(), sorted.end());
  out.q1 = quantile_type7(sorted, 0.25);
  out.q3 = quantile_type7(sorted, 0.75);
  const double iqr = out.q3 - out.q1;
  out.lower = out.q1 - rule.scale * iqr;
  out.upper = out.q3 + rule.scale * iqr;

  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = unit_value[unit_of[i]];
    if (v < out.lower || v > out.upper) out.trimmed_ids.push_back(data.records[i].id());
    else out.kept_ids.push_back(data.records[i].id());
  }
  return out;
}

}  // namespace robprod
