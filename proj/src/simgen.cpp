#include "robprod/simgen.hpp"

#include <array>
#include <cmath>
#include <random>
#include <vector>
#include <stdexcept>

namespace robprod {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string_view to_string(SimVariant v) noexcept {
  switch (v) {
    case SimVariant::Raw: return "raw";
    case SimVariant::SampleOne: return "sample1";
    case SimVariant::SampleTwo: return "sample2";
  }
  return "?";
}

SimVariant parse_variant(std::string_view name) {
  if (name == "raw") return SimVariant::Raw;
  if (name == "sample1" || name == "sample-i" || name == "I") return SimVariant::SampleOne;
  if (name == "sample2" || name == "sample-ii" || name == "II") return SimVariant::SampleTwo;
  throw std::invalid_argument("unknown simulation variant '" + std::string(name) + "'");
}

namespace {

class Normal {
 public:
  explicit Normal(std::uint64_t seed) : engine_(seed) {}
  double operator()(double mean, double var) {
    return mean + std::sqrt(var) * standard_(engine_);
  }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> standard_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

void check(const SimConfig& c) {
  if (c.periods < 2) throw std::invalid_argument("simulation: periods must be >= 2");
  if (c.clean_farms < 1 || c.outlier_farms < 0) throw std::invalid_argument("simulation: bad farm counts");
  for (double v : {c.clean_effect_var, c.outlier_effect_var, c.clean_input_var, c.outlier_input_var, c.noise_var})
    if (!(v > 0.0)) throw std::invalid_argument("simulation: variances must be positive");
}

}  // namespace

SimPanel generate(const SimConfig& config, SimVariant variant) {
  check(config);
  Normal draw(config.seed);
  SimPanel out;
  out.data.scale = Scale::Log;

  auto emit = [&](int farm, int year, double y, double l, double k) {
    PanelRecord r;
    r.farm_id = std::to_string(farm);
    r.year = year;
    r.output = y;
    r.labour = l;
    r.capital = k;
    out.data.records.push_back(std::move(r));
  };

  for (int f = 1; f <= config.clean_farms; ++f) {
    const double effect = draw(config.clean_effect_mean, config.clean_effect_var);
    for (int t = 1; t <= config.periods; ++t) {
      const double l = draw(config.clean_input_mean, config.clean_input_var);
      const double k = draw(config.clean_input_mean, config.clean_input_var);
      const double y = config.clean_labour * l + config.clean_capital * k + effect + draw(0.0, config.noise_var);
      emit(f, t, y, l, k);
    }
  }
  if (variant == SimVariant::Raw) return out;

  const double jitter_var = std::pow(config.substitute_jitter, 2) * config.outlier_input_var;
  struct Row {
    int farm, year;
    double effect, l, k, noise;
  };
  std::vector<Row> block;
  for (int f = config.clean_farms + 1; f <= config.clean_farms + config.outlier_farms; ++f) {
    const double effect = draw(config.outlier_effect_mean, config.outlier_effect_var);
    for (int t = 1; t <= config.periods; ++t) {
      const double l = draw(config.outlier_input_mean, config.outlier_input_var);
      const double k = variant == SimVariant::SampleOne
                           ? draw(config.outlier_input_mean, config.outlier_input_var)
                           : 2.0 * config.outlier_input_mean - l + draw(0.0, jitter_var);
      block.push_back({f, t, effect, l, k, draw(0.0, config.noise_var)});
    }
  }
  if (variant == SimVariant::SampleOne && block.size() > 2) {
    // zero sample correlation: remove the slope of k on l, keep k's mean and spread
    double ml = 0.0, mk = 0.0;
    for (const auto& r : block) {
      ml += r.l;
      mk += r.k;
    }
    ml /= static_cast<double>(block.size());
    mk /= static_cast<double>(block.size());
    double sll = 0.0, slk = 0.0, skk = 0.0;
    for (const auto& r : block) {
      sll += (r.l - ml) * (r.l - ml);
      slk += (r.l - ml) * (r.k - mk);
      skk += (r.k - mk) * (r.k - mk);
    }
    const double slope = slk / sll;
    const double rescale = std::sqrt(skk / (skk - slope * slk));
    for (auto& r : block) r.k = mk + rescale * ((r.k - mk) - slope * (r.l - ml));
  }
  for (const auto& r : block) {
    const double y = config.outlier_labour * r.l + config.outlier_capital * r.k + r.effect + r.noise;
    emit(r.farm, r.year, y, r.l, r.k);
    out.outlier_ids.insert(record_id(std::to_string(r.farm), r.year));
  }
  return out;
}

SimPanel generate_production_panel(const ProductionPanelConfig& c) {
  if (c.periods < 2 || c.farms < 2) throw std::invalid_argument("production panel: need >= 2 farms and periods");
  if (!(c.persistence > -1.0 && c.persistence < 1.0)) throw std::invalid_argument("production panel: |persistence| must be < 1");
  if (c.contamination < 0.0 || c.contamination >= 1.0) throw std::invalid_argument("production panel: contamination in [0, 1)");

  Normal draw(c.seed);
  auto sd = [&](double mean, double s) { return draw(mean, s * s); };
  const double rho = c.persistence;
  const double stationary_sd = c.input_sd / std::sqrt(1.0 - rho * rho);
  constexpr double kLandMean = 4.0, kLabourMean = 8.0, kCapitalMean = 9.0, kMaterialsMean = 9.0;
  constexpr double kBetweenSd = 0.8;

  SimPanel out;
  out.data.scale = Scale::Raw;
  for (int f = 1; f <= c.farms; ++f) {
    const double mu_a = sd(kLandMean, kBetweenSd);
    const double mu_l = sd(kLabourMean, kBetweenSd);
    const double mu_k = sd(kCapitalMean, kBetweenSd);
    double a = sd(mu_a, stationary_sd);
    double l = sd(mu_l, stationary_sd);
    double k = sd(mu_k, stationary_sd);
    double omega = sd(0.0, 0.5);
    for (int t = 1; t <= c.periods; ++t) {
      if (t > 1) {
        const double xi = sd(0.0, c.innovation_sd);
        omega += xi;
        k = mu_k * (1.0 - rho) + rho * k + sd(0.0, c.input_sd);
        a = mu_a * (1.0 - rho) + rho * a + c.response * xi + sd(0.0, c.input_sd);
        l = mu_l * (1.0 - rho) + rho * l + c.response * xi + sd(0.0, c.input_sd);
      }
      const double kc = k - kCapitalMean;
      const double m = kMaterialsMean + omega + c.proxy_capital * kc + c.proxy_capital_sq * kc * kc;
      double y = c.land * a + c.labour * l + c.capital * k + c.materials * m + omega + sd(0.0, c.noise_sd);

      PanelRecord r;
      r.farm_id = std::to_string(f);
      r.year = 2000 + t;
      r.land = a;
      r.labour = l;
      r.capital = k;
      r.materials = m;
      if (c.contamination > 0.0 && draw.uniform() < c.contamination) {
        y += sd(0.0, c.misreport_sd);
        const auto which = static_cast<int>(draw.uniform() * 4.0);
        const std::array<Measure, 4> inputs = {Measure::Land, Measure::Labour, Measure::Materials, Measure::Capital};
        r.get(inputs[static_cast<std::size_t>(std::min(which, 3))]) += sd(0.0, c.misreport_sd);
        out.outlier_ids.insert(r.id());
      }
      r.output = y;
      for (Measure mm : kAllMeasures) r.get(mm) = std::exp(r.get(mm));
      out.data.records.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace robprod
