#include "robprod/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "robprod/errors.hpp"

namespace robprod {

std::string_view to_string(Estimator e) noexcept {
  return e == Estimator::Within ? "within" : "wlp";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "within" || name == "fe") return Estimator::Within;
  if (name == "wlp") return Estimator::Wlp;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

namespace {

std::string_view symbol(Measure m) {
  switch (m) {
    case Measure::Output: return "y";
    case Measure::Labour: return "l";
    case Measure::Land: return "a";
    case Measure::Materials: return "m";
    case Measure::Capital: return "k";
  }
  return "?";
}

std::size_t position_of(const std::vector<Measure>& inputs, Measure m) {
  const auto it = std::find(inputs.begin(), inputs.end(), m);
  if (it == inputs.end())
    throw std::out_of_range("estimation result has no coefficient for " + std::string(to_string(m)));
  return static_cast<std::size_t>(it - inputs.begin());
}

// Records sorted by (farm, year) with a dense cluster index per farm.
struct SortedPanel {
  std::vector<const PanelRecord*> rows;
  std::vector<std::size_t> cluster;
  std::size_t clusters = 0;
};

SortedPanel sort_panel(const PanelDataset& data) {
  SortedPanel s;
  s.rows.reserve(data.size());
  for (const auto& r : data.records) s.rows.push_back(&r);
  std::sort(s.rows.begin(), s.rows.end(), [](const PanelRecord* a, const PanelRecord* b) {
    return a->farm_id != b->farm_id ? a->farm_id < b->farm_id : a->year < b->year;
  });
  s.cluster.resize(s.rows.size());
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    if (i > 0 && s.rows[i]->farm_id != s.rows[i - 1]->farm_id) ++s.clusters;
    s.cluster[i] = s.clusters;
  }
  if (!s.rows.empty()) ++s.clusters;
  return s;
}

void validate(const PanelDataset& data, const ModelSpec& spec) {
  if (data.scale != Scale::Log) throw DataError("estimation requires a log-scale dataset");
  if (spec.regressors.empty()) throw std::invalid_argument("model spec: no regressors");
  if (spec.degree < 1) throw std::invalid_argument("model spec: control-function degree must be >= 1");
  if (spec.instrument_lags < 1) throw std::invalid_argument("model spec: instrument lags must be >= 1");
  for (Measure m : spec.regressors) {
    if (m == spec.dependent) throw std::invalid_argument("model spec: dependent variable used as regressor");
    if (std::count(spec.regressors.begin(), spec.regressors.end(), m) > 1)
      throw std::invalid_argument("model spec: duplicate regressor " + std::string(to_string(m)));
  }
}

void finish(EstimationResult& r, const LinearFit& fitted) {
  r.coef = fitted.coef;
  r.cov = fitted.cov;
  r.residuals = fitted.residuals;
  r.n_clusters = fitted.n_clusters;
  r.n_obs = static_cast<std::size_t>(fitted.residuals.size());
  r.rss = fitted.residuals.squaredNorm();
  r.scaled_rss = scaled_rss(fitted.residuals, r.n_params);
  r.scale_elasticity = 0.0;
  for (std::size_t c : r.input_columns) r.scale_elasticity += r.coef[static_cast<Eigen::Index>(c)];
  try {
    r.crs = wald_crs(r);
  } catch (const NumericalError&) {
    r.crs.reset();
  }
  try {
    const auto q = static_cast<Eigen::Index>(r.tested_columns.size());
    Eigen::MatrixXd restriction = Eigen::MatrixXd::Zero(q, r.coef.size());
    for (Eigen::Index i = 0; i < q; ++i) restriction(i, static_cast<Eigen::Index>(r.tested_columns[i])) = 1.0;
    r.model = wald_linear(r.coef, r.cov, restriction, Eigen::VectorXd::Zero(q));
  } catch (const NumericalError&) {
    r.model.reset();
  }
}

}  // namespace

double EstimationResult::coefficient(Measure m) const {
  return coef[static_cast<Eigen::Index>(input_columns[position_of(inputs, m)])];
}

double EstimationResult::std_error(Measure m) const {
  const auto c = static_cast<Eigen::Index>(input_columns[position_of(inputs, m)]);
  return std::sqrt(cov(c, c));
}

Eigen::MatrixXd cluster_robust_cov(const Eigen::MatrixXd& design, const Eigen::VectorXd& residuals,
                                   std::span<const std::size_t> cluster, std::size_t df_params) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  const std::size_t groups =
      cluster.empty() ? 0 : *std::max_element(cluster.begin(), cluster.end()) + 1;
  if (groups < 2) throw NumericalError("cluster-robust covariance needs at least two clusters");
  if (static_cast<std::size_t>(n) <= df_params)
    throw NumericalError("cluster-robust covariance: N <= K");

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups), k);
  for (Eigen::Index i = 0; i < n; ++i)
    scores.row(static_cast<Eigen::Index>(cluster[static_cast<std::size_t>(i)])) += residuals[i] * design.row(i);
  const Eigen::MatrixXd meat = scores.transpose() * scores;

  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::MatrixXd bread = gram.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  const double g = static_cast<double>(groups);
  const double factor = g / (g - 1.0) * (static_cast<double>(n) - 1.0) /
                        (static_cast<double>(n) - static_cast<double>(df_params));
  Eigen::MatrixXd v = factor * bread * meat * bread;
  return 0.5 * (v + v.transpose());
}

void require_full_rank(const Eigen::MatrixXd& m, std::span<const std::string> names,
                       std::string_view what) {
  if (m.cols() == 0) return;
  if (m.rows() < m.cols())
    throw NumericalError(std::string(what) + ": fewer rows (" + std::to_string(m.rows()) +
                         ") than columns (" + std::to_string(m.cols()) + ")");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  if (qr.rank() == m.cols()) return;
  std::string msg = std::string(what) + " is rank deficient (rank " + std::to_string(qr.rank()) +
                    " of " + std::to_string(m.cols()) + "); collinear columns:";
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index i = qr.rank(); i < m.cols(); ++i) {
    const auto c = static_cast<std::size_t>(perm[i]);
    msg += " " + (c < names.size() ? names[c] : std::to_string(c));
  }
  throw NumericalError(msg);
}

LinearFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                  std::span<const std::size_t> cluster, std::span<const std::string> names,
                  std::size_t df_params) {
  require_full_rank(x, names, "regressor matrix");
  LinearFit f;
  f.coef = x.colPivHouseholderQr().solve(y);
  f.residuals = y - x * f.coef;
  f.cov = cluster_robust_cov(x, f.residuals, cluster, df_params);
  f.n_clusters = cluster.empty() ? 0 : *std::max_element(cluster.begin(), cluster.end()) + 1;
  return f;
}

LinearFit tsls_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const Eigen::MatrixXd& z,
                   std::span<const std::size_t> cluster, std::span<const std::string> x_names,
                   std::span<const std::string> z_names, std::size_t df_params) {
  if (z.cols() < x.cols())
    throw NumericalError("2SLS under-identified: " + std::to_string(z.cols()) + " instruments for " +
                         std::to_string(x.cols()) + " regressors");
  require_full_rank(z, z_names, "instrument matrix");
  const Eigen::MatrixXd projected = z * z.colPivHouseholderQr().solve(x);
  require_full_rank(projected, x_names, "projected regressor matrix (weak or missing instruments)");

  LinearFit f;
  f.coef = projected.colPivHouseholderQr().solve(y);
  f.residuals = y - x * f.coef;
  f.cov = cluster_robust_cov(projected, f.residuals, cluster, df_params);
  f.n_clusters = cluster.empty() ? 0 : *std::max_element(cluster.begin(), cluster.end()) + 1;
  return f;
}

EstimationResult within_fit(const PanelDataset& data, const ModelSpec& spec) {
  validate(data, spec);
  SortedPanel all = sort_panel(data);

  // drop farms with a single observation
  std::vector<std::size_t> farm_size(all.clusters, 0);
  for (std::size_t c : all.cluster) ++farm_size[c];
  SortedPanel s;
  std::map<std::size_t, std::size_t> remap;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < all.rows.size(); ++i) {
    if (farm_size[all.cluster[i]] < 2) {
      ++dropped;
      continue;
    }
    const auto [it, fresh] = remap.emplace(all.cluster[i], remap.size());
    s.rows.push_back(all.rows[i]);
    s.cluster.push_back(it->second);
  }
  s.clusters = remap.size();

  EstimationResult r;
  r.estimator = Estimator::Within;
  r.inputs = spec.regressors;
  r.dropped_singletons = dropped;

  std::vector<int> years;
  for (const auto* rec : s.rows) years.push_back(rec->year);
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  std::vector<int> dummy_years;
  if (spec.year_dummies && years.size() > 1) dummy_years.assign(years.begin() + 1, years.end());

  const auto n = static_cast<Eigen::Index>(s.rows.size());
  const auto k = static_cast<Eigen::Index>(spec.regressors.size() + dummy_years.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = *s.rows[static_cast<std::size_t>(i)];
    y[i] = rec.get(spec.dependent);
    Eigen::Index c = 0;
    for (Measure m : spec.regressors) x(i, c++) = rec.get(m);
    for (int yr : dummy_years) x(i, c++) = rec.year == yr ? 1.0 : 0.0;
  }
  for (std::size_t j = 0; j < spec.regressors.size(); ++j) {
    r.names.emplace_back(to_string(spec.regressors[j]));
    r.input_columns.push_back(j);
    r.tested_columns.push_back(j);
  }
  for (int yr : dummy_years) r.names.push_back("year:" + std::to_string(yr));

  // demean within farm
  std::vector<double> count(s.clusters, 0.0);
  Eigen::VectorXd y_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.clusters));
  Eigen::MatrixXd x_mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s.clusters), k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<Eigen::Index>(s.cluster[static_cast<std::size_t>(i)]);
    count[static_cast<std::size_t>(g)] += 1.0;
    y_mean[g] += y[i];
    x_mean.row(g) += x.row(i);
  }
  for (Eigen::Index g = 0; g < y_mean.size(); ++g) {
    y_mean[g] /= count[static_cast<std::size_t>(g)];
    x_mean.row(g) /= count[static_cast<std::size_t>(g)];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<Eigen::Index>(s.cluster[static_cast<std::size_t>(i)]);
    y[i] -= y_mean[g];
    x.row(i) -= x_mean.row(g);
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (x.col(c).cwiseAbs().maxCoeff() == 0.0)
      throw NumericalError("within_fit: regressor '" + r.names[static_cast<std::size_t>(c)] +
                           "' is constant within every farm and not identified");
  }

  for (const auto* rec : s.rows) r.row_ids.push_back(rec->id());
  // slopes plus one absorbed effect per farm
  r.n_params = static_cast<std::size_t>(k) + s.clusters;
  const LinearFit fitted = ols_fit(y, x, s.cluster, r.names, static_cast<std::size_t>(k));
  finish(r, fitted);
  return r;
}

EstimationResult wlp_fit(const PanelDataset& data, const ModelSpec& spec) {
  validate(data, spec);
  const SortedPanel s = sort_panel(data);
  const int lags = spec.instrument_lags;

  // usable rows: all lags 1..lags present in consecutive years within farm
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    if (i < static_cast<std::size_t>(lags)) continue;
    bool ok = true;
    for (int L = 1; L <= lags && ok; ++L) {
      const std::size_t j = i - static_cast<std::size_t>(L);
      ok = s.cluster[j] == s.cluster[i] && s.rows[j]->year == s.rows[i]->year - L;
    }
    if (ok) use.push_back(i);
  }
  if (use.empty()) throw DataError("wlp_fit: no observation has the required lagged values");

  const bool has_proxy =
      std::find(spec.regressors.begin(), spec.regressors.end(), spec.proxy) != spec.regressors.end();
  std::vector<Measure> endogenous;
  for (Measure m : spec.regressors)
    if (m != spec.state) endogenous.push_back(m);

  std::vector<int> years;
  for (std::size_t i : use) years.push_back(s.rows[i]->year);
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  std::vector<int> dummy_years;
  if (spec.year_dummies && years.size() > 1) dummy_years.assign(years.begin() + 1, years.end());

  // control-function monomials proxy^a * state^b, 1 <= a + b <= degree
  std::vector<std::pair<int, int>> powers;
  for (int total = 1; total <= spec.degree; ++total)
    for (int a = total; a >= 0; --a) powers.emplace_back(a, total - a);

  auto monomial_name = [&](int a, int b) {
    std::string name = "cf:";
    auto part = [&](Measure m, int e) {
      if (e == 0) return;
      if (name.size() > 3) name += "*";
      name += std::string(symbol(m)) + "_lag1";
      if (e > 1) name += "^" + std::to_string(e);
    };
    part(spec.proxy, a);
    part(spec.state, b);
    return name;
  };

  EstimationResult r;
  r.estimator = Estimator::Wlp;
  r.inputs = spec.regressors;

  std::vector<std::string> x_names{"const"};
  for (Measure m : spec.regressors) {
    r.input_columns.push_back(x_names.size());
    r.tested_columns.push_back(x_names.size());
    x_names.emplace_back(to_string(m));
  }
  for (int yr : dummy_years) x_names.push_back("year:" + std::to_string(yr));
  for (const auto& [a, b] : powers) {
    r.tested_columns.push_back(x_names.size());
    x_names.push_back(monomial_name(a, b));
  }

  // instruments: exogenous columns of x, then the excluded ones
  std::vector<std::string> z_names{"const", std::string(to_string(spec.state))};
  for (int yr : dummy_years) z_names.push_back("year:" + std::to_string(yr));
  for (const auto& [a, b] : powers) z_names.push_back(monomial_name(a, b));
  for (Measure m : endogenous)
    if (m != spec.proxy) z_names.push_back(std::string(symbol(m)) + "_lag1");
  if (has_proxy)
    for (int e = 2; e <= spec.degree; ++e) z_names.push_back(std::string(symbol(spec.state)) + "^" + std::to_string(e));
  for (int L = 2; L <= lags; ++L)
    for (Measure m : spec.regressors) z_names.push_back(std::string(symbol(m)) + "_lag" + std::to_string(L));

  const auto n = static_cast<Eigen::Index>(use.size());
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(x_names.size()));
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(z_names.size()));
  std::vector<std::size_t> cluster(use.size());
  std::map<std::size_t, std::size_t> remap;

  for (Eigen::Index row = 0; row < n; ++row) {
    const std::size_t i = use[static_cast<std::size_t>(row)];
    const PanelRecord& cur = *s.rows[i];
    const PanelRecord& prev = *s.rows[i - 1];
    cluster[static_cast<std::size_t>(row)] = remap.emplace(s.cluster[i], remap.size()).first->second;
    y[row] = cur.get(spec.dependent);

    std::vector<double> cf;
    for (const auto& [a, b] : powers)
      cf.push_back(std::pow(prev.get(spec.proxy), a) * std::pow(prev.get(spec.state), b));

    Eigen::Index c = 0;
    x(row, c++) = 1.0;
    for (Measure m : spec.regressors) x(row, c++) = cur.get(m);
    for (int yr : dummy_years) x(row, c++) = cur.year == yr ? 1.0 : 0.0;
    for (double v : cf) x(row, c++) = v;

    c = 0;
    z(row, c++) = 1.0;
    z(row, c++) = cur.get(spec.state);
    for (int yr : dummy_years) z(row, c++) = cur.year == yr ? 1.0 : 0.0;
    for (double v : cf) z(row, c++) = v;
    for (Measure m : endogenous)
      if (m != spec.proxy) z(row, c++) = prev.get(m);
    if (has_proxy)
      for (int e = 2; e <= spec.degree; ++e) z(row, c++) = std::pow(cur.get(spec.state), e);
    for (int L = 2; L <= lags; ++L)
      for (Measure m : spec.regressors) z(row, c++) = s.rows[i - static_cast<std::size_t>(L)]->get(m);

    r.row_ids.push_back(cur.id());
  }

  r.names = x_names;
  r.instruments = z_names;
  r.n_params = x_names.size();
  const LinearFit fitted = tsls_fit(y, x, z, cluster, x_names, z_names, r.n_params);
  finish(r, fitted);
  return r;
}

EstimationResult fit(const PanelDataset& data, const ModelSpec& spec) {
  return spec.estimator == Estimator::Within ? within_fit(data, spec) : wlp_fit(data, spec);
}

double chi_square_sf(double statistic, std::size_t df) {
  if (df == 0) throw std::invalid_argument("chi_square_sf: df must be positive");
  if (!(statistic > 0.0)) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  return boost::math::gamma_q(static_cast<double>(df) / 2.0, statistic / 2.0);
}

WaldTest wald_linear(const Eigen::VectorXd& coef, const Eigen::MatrixXd& cov,
                     const Eigen::MatrixXd& restriction, const Eigen::VectorXd& target) {
  const Eigen::VectorXd diff = restriction * coef - target;
  const Eigen::MatrixXd middle = restriction * cov * restriction.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(middle);
  const double scale = middle.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw NumericalError("Wald test: restriction covariance is zero");
  lu.setThreshold(1e-12);
  if (lu.rank() < middle.rows()) throw NumericalError("Wald test: restriction covariance is singular");
  WaldTest w;
  w.df = static_cast<std::size_t>(restriction.rows());
  w.statistic = diff.dot(lu.solve(diff));
  w.p_value = chi_square_sf(w.statistic, w.df);
  return w;
}

WaldTest wald_crs(const EstimationResult& result) {
  if (result.input_columns.empty()) throw NumericalError("wald_crs: no input coefficients");
  Eigen::MatrixXd restriction = Eigen::MatrixXd::Zero(1, result.coef.size());
  for (std::size_t c : result.input_columns) restriction(0, static_cast<Eigen::Index>(c)) = 1.0;
  return wald_linear(result.coef, result.cov, restriction, Eigen::VectorXd::Ones(1));
}

double scaled_rss(const Eigen::VectorXd& residuals, std::size_t n_params) {
  const auto n = static_cast<std::size_t>(residuals.size());
  if (n <= n_params)
    throw NumericalError("scaled_rss: N = " + std::to_string(n) + " does not exceed K = " +
                         std::to_string(n_params));
  return residuals.squaredNorm() / static_cast<double>(n - n_params);
}

}  // namespace robprod
