#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "robprod/dataset.hpp"

namespace robprod {

// Deterministic per-replication seed derived from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

enum class SimVariant { Raw, SampleOne, SampleTwo };

std::string_view to_string(SimVariant v) noexcept;
SimVariant parse_variant(std::string_view name);

// Two-input Cobb-Douglas design with farm effects, optionally contaminated by
// a block of small farms following a different technology. All normal
// parameters are (mean, variance).
struct SimConfig {
  int clean_farms = 100;
  int outlier_farms = 20;
  int periods = 7;
  double clean_labour = 0.4;
  double clean_capital = 0.6;
  double outlier_labour = 0.01;
  double outlier_capital = 0.99;
  double clean_effect_mean = 0.0;
  double clean_effect_var = 25.0;
  double outlier_effect_mean = -5.0;
  double outlier_effect_var = 4.0;
  double clean_input_mean = 0.0;
  double clean_input_var = 4.0;
  double outlier_input_mean = -5.0;
  double outlier_input_var = 9.0;
  double noise_var = 1.0;
  // sample II: capital = 2*mean - labour + jitter, jitter sd = this * input sd
  double substitute_jitter = 0.05;
  std::uint64_t seed = 0;
};

struct SimPanel {
  // Log scale; output, labour and capital carry y, l, k. Land and materials
  // are zero (unit raw values) and play no role.
  PanelDataset data;
  std::unordered_set<std::string> outlier_ids;
};

SimPanel generate(const SimConfig& config, SimVariant variant);

// Five-input panel for the proxy-variable estimator. Productivity is a random
// walk observed by the farm; land and labour respond to its innovation,
// capital is predetermined, and materials are the proxy
//   m = omega + c_k k + c_kk k^2,
// so omega_{t-1} is an exact quadratic in (m_{t-1}, k_{t-1}). Contamination
// replaces a share of records by misreported ones (output and one input
// scaled by a large random factor). Output is on the raw (level) scale.
struct ProductionPanelConfig {
  int farms = 400;
  int periods = 8;
  double land = 0.2;
  double labour = 0.2;
  double capital = 0.2;
  double materials = 0.4;
  double persistence = 0.8;     // AR(1) coefficient of land, labour, capital
  double innovation_sd = 0.3;   // sd of the productivity innovation
  double response = 0.5;        // loading of land/labour on the innovation
  double input_sd = 0.4;        // sd of idiosyncratic input shocks
  double proxy_capital = 0.5;
  double proxy_capital_sq = 0.3;
  double noise_sd = 0.1;
  double contamination = 0.0;   // share of misreported records
  double misreport_sd = 1.5;    // sd of the log misreporting factor
  std::uint64_t seed = 0;
};

SimPanel generate_production_panel(const ProductionPanelConfig& config);

}  // namespace robprod
