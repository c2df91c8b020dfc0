#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "robprod/dataset.hpp"

namespace robprod {

enum class Estimator { Within, Wlp };

std::string_view to_string(Estimator e) noexcept;
Estimator parse_estimator(std::string_view name);

struct ModelSpec {
  Measure dependent = Measure::Output;
  // Cobb-Douglas inputs in reporting order.
  std::vector<Measure> regressors = {Measure::Land, Measure::Labour, Measure::Capital,
                                     Measure::Materials};
  bool year_dummies = true;
  Estimator estimator = Estimator::Wlp;
  // Total degree of the control-function polynomial in (proxy_{t-1}, state_{t-1}).
  int degree = 2;
  Measure proxy = Measure::Materials;
  Measure state = Measure::Capital;
  // Deepest input lag used as an instrument; 1 uses only t-1.
  int instrument_lags = 1;
};

struct WaldTest {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

struct EstimationResult {
  Estimator estimator = Estimator::Within;
  std::vector<std::string> names;  // one per coefficient
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;             // cluster-robust
  std::vector<Measure> inputs;
  std::vector<std::size_t> input_columns;  // positions of `inputs` in coef
  std::vector<std::size_t> tested_columns; // non-intercept, non-dummy coefficients
  std::vector<std::string> instruments;    // 2SLS only
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;
  std::size_t n_params = 0;  // K in RSS / (N - K), absorbed effects included
  std::size_t dropped_singletons = 0;
  double rss = 0.0;
  double scaled_rss = 0.0;
  double scale_elasticity = 0.0;
  std::optional<WaldTest> crs;    // unset when the restriction variance is zero
  std::optional<WaldTest> model;  // unset when the tested block is singular
  Eigen::VectorXd residuals;
  std::vector<std::string> row_ids;

  double coefficient(Measure m) const;
  double std_error(Measure m) const;
};

// Coefficients, cluster-robust covariance and residuals of a linear fit.
struct LinearFit {
  Eigen::VectorXd coef;
  Eigen::MatrixXd cov;
  Eigen::VectorXd residuals;
  std::size_t n_clusters = 0;
};

// Sandwich with finite-sample factor G/(G-1) * (N-1)/(N-K), K = df_params.
// `design` plays the role of the (projected) regressors.
Eigen::MatrixXd cluster_robust_cov(const Eigen::MatrixXd& design, const Eigen::VectorXd& residuals,
                                   std::span<const std::size_t> cluster, std::size_t df_params);

// Column-pivoted QR rank check; throws NumericalError naming the collinear
// columns.
void require_full_rank(const Eigen::MatrixXd& m, std::span<const std::string> names,
                       std::string_view what);

LinearFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                  std::span<const std::size_t> cluster, std::span<const std::string> names,
                  std::size_t df_params);

// Two-stage least squares with instruments `z` (which must contain the
// exogenous columns of `x`).
LinearFit tsls_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                   std::span<const std::size_t> cluster, std::span<const std::string> x_names,
                   std::span<const std::string> z_names, std::size_t df_params);

// Fixed effects by within-farm demeaning. Farms with a single observation
// carry no within variation and are left out (counted in dropped_singletons).
EstimationResult within_fit(const PanelDataset& data, const ModelSpec& spec);

// Proxy-variable IV: y_t on inputs, year dummies and a polynomial in
// (proxy_{t-1}, state_{t-1}); the state variable is exogenous, the other
// inputs are instrumented by their first lags and, for the proxy, by powers
// 2..degree of the current state variable.
EstimationResult wlp_fit(const PanelDataset& data, const ModelSpec& spec);

EstimationResult fit(const PanelDataset& data, const ModelSpec& spec);

// H0: R b = r.
WaldTest wald_linear(const Eigen::VectorXd& coef, const Eigen::MatrixXd& cov,
                     const Eigen::MatrixXd& restriction, const Eigen::VectorXd& target);

// H0: the input elasticities sum to one, chi-square(1) reference.
WaldTest wald_crs(const EstimationResult& result);

// RSS / (N - K). Throws NumericalError when N <= K.
double scaled_rss(const Eigen::VectorXd& residuals, std::size_t n_params);

double chi_square_sf(double statistic, std::size_t df);

}  // namespace robprod
