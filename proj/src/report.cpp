#include "robprod/report.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "robprod/csv.hpp"
#include "robprod/errors.hpp"

#ifndef ROBPROD_VERSION
#define ROBPROD_VERSION "0.0.0"
#endif

namespace robprod {

namespace {

Json edge_json(const Edge& e) { return Json{{"u", e.u}, {"v", e.v}, {"weight", e.weight}}; }

std::vector<std::string> measure_names(const std::vector<Measure>& ms) {
  std::vector<std::string> out;
  for (Measure m : ms) out.emplace_back(to_string(m));
  return out;
}

Json optional_test(const std::optional<WaldTest>& t) {
  if (!t) return nullptr;
  return Json{{"statistic", t->statistic}, {"df", t->df}, {"p_value", t->p_value}};
}

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

}  // namespace

Json provenance(const std::string& stage) {
  return Json{{"tool", "robprod"}, {"version", ROBPROD_VERSION}, {"stage", stage}};
}

Json to_json(const MstResult& mst) {
  Json edges = Json::array();
  for (const Edge& e : mst.edges) edges.push_back(edge_json(e));
  return Json{{"edges", edges}, {"total_weight", mst.total_weight}};
}

Json to_json(const DecontaminationResult& r) {
  Json trace = Json::array();
  for (const auto& step : r.trace)
    trace.push_back(Json{{"edge", edge_json(step.edge)}, {"largest_component", step.largest_component}});
  Json j{
      {"n", r.n},
      {"p", r.p},
      {"alpha", r.alpha},
      {"breakdown_bound", r.bound},
      {"core_ids", r.core_ids},
      {"non_outlier_ids", r.non_outlier_ids},
      {"outlier_ids", r.outlier_ids},
      {"core_edge_mean", r.core_edge_stats.mean},
      {"core_edge_sd", r.core_edge_stats.stddev},
      {"core_edge_count", r.core_edge_stats.count},
      {"w_crit", r.w_crit ? Json(*r.w_crit) : Json(nullptr)},
      {"reweight_error", r.reweight_error ? Json(*r.reweight_error) : Json(nullptr)},
      {"pruning_trace", trace},
      {"counts", {{"core", r.core.size()}, {"non_outliers", r.non_outliers.size()}, {"outliers", r.outliers.size()}}},
  };
  return j;
}

Json to_json(const TrimResult& r, const TrimRule& rule) {
  return Json{
      {"ratio", std::string(to_string(rule.numerator)) + "/" + std::string(to_string(rule.denominator))},
      {"per_farm", rule.per_farm},
      {"s", rule.scale},
      {"q1", r.q1},
      {"q3", r.q3},
      {"lower", r.lower},
      {"upper", r.upper},
      {"units", r.units},
      {"kept_ids", r.kept_ids},
      {"trimmed_ids", r.trimmed_ids},
      {"counts", {{"kept", r.kept_ids.size()}, {"trimmed", r.trimmed_ids.size()}}},
  };
}

Json to_json(const OutlierClassification& r, const std::vector<std::string>& dims) {
  Json labels = Json::object();
  for (std::size_t i = 0; i < r.ids.size(); ++i) labels[r.ids[i]] = to_string(r.labels[i]);
  return Json{{"dims", dims},
              {"labels", labels},
              {"counts", {{"small", r.small}, {"large", r.large}, {"neither", r.neither}, {"total", r.ids.size()}}}};
}

Json to_json(const ModelSpec& spec) {
  return Json{{"estimator", to_string(spec.estimator)},
              {"dependent", to_string(spec.dependent)},
              {"regressors", measure_names(spec.regressors)},
              {"year_dummies", spec.year_dummies},
              {"degree", spec.degree},
              {"proxy", to_string(spec.proxy)},
              {"state", to_string(spec.state)},
              {"instrument_lags", spec.instrument_lags},
              {"cluster", "farm_id"}};
}

Json to_json(const EstimationResult& r, const ModelSpec& spec) {
  Json inputs = Json::array();
  for (std::size_t j = 0; j < r.inputs.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(r.input_columns[j]);
    const double se = std::sqrt(std::max(0.0, r.cov(c, c)));
    const double p = se > 0.0 ? normal_two_sided_p(r.coef[c] / se) : 0.0;
    inputs.push_back(Json{{"name", to_string(r.inputs[j])}, {"coef", r.coef[c]}, {"se", se}, {"p_value", p}, {"stars", stars(p)}});
  }
  Json all = Json::array();
  for (Eigen::Index c = 0; c < r.coef.size(); ++c)
    all.push_back(Json{{"name", r.names[static_cast<std::size_t>(c)]}, {"coef", r.coef[c]},
                       {"se", std::sqrt(std::max(0.0, r.cov(c, c)))}});
  return Json{{"spec", to_json(spec)},
              {"inputs", inputs},
              {"coefficients", all},
              {"instruments", r.instruments},
              {"N", r.n_obs},
              {"clusters", r.n_clusters},
              {"K", r.n_params},
              {"dropped_singletons", r.dropped_singletons},
              {"elasticity_of_scale", r.scale_elasticity},
              {"crs_test", optional_test(r.crs)},
              {"p_crs", r.crs ? Json(r.crs->p_value) : Json(nullptr)},
              {"model_test", optional_test(r.model)},
              {"p_model", r.model ? Json(r.model->p_value) : Json(nullptr)},
              {"rss", r.rss},
              {"scaled_rss", r.scaled_rss}};
}

Json decontamination_report(const DecontaminationResult& result, const PruneConfig& config) {
  Json j = to_json(result);
  j["provenance"] = provenance("decontaminate");
  j["config"] = Json{{"alpha", config.alpha}, {"standardize", config.standardize}, {"rebuild", "mst"}};
  return j;
}

Json trim_report(const TrimResult& result, const TrimRule& rule, Scale scale) {
  Json j = to_json(result, rule);
  j["provenance"] = provenance("trim");
  j["scale"] = to_string(scale);
  return j;
}

Json classification_report(const OutlierClassification& result, const std::vector<std::string>& dims) {
  Json j = to_json(result, dims);
  j["provenance"] = provenance("classify");
  return j;
}

Json estimation_report(const EstimationResult& result, const ModelSpec& spec) {
  Json j = to_json(result, spec);
  j["provenance"] = provenance("estimate");
  return j;
}

Json pipeline_report(const PipelineResult& result, const PipelineConfig& config) {
  Json schemes = Json::object();
  for (const auto& s : result.schemes) {
    Json entry{{"kept_records", s.kept_records}, {"sample_records", s.sample.size()}};
    if (s.estimate) entry["estimate"] = to_json(*s.estimate, config.model);
    entry["error"] = s.error ? Json(*s.error) : Json(nullptr);
    schemes[s.name] = entry;
  }
  Json j{{"provenance", provenance("pipeline")},
         {"config",
          {{"alpha", config.prune.alpha},
           {"standardize", config.prune.standardize},
           {"cloud_dims", measure_names(config.cloud_dims)},
           {"classify_dims", measure_names(result.classify_dims)},
           {"trim", {{"ratio", std::string(to_string(config.trim.numerator)) + "/" + std::string(to_string(config.trim.denominator))},
                     {"per_farm", config.trim.per_farm},
                     {"s", config.trim.scale}}},
           {"min_run", config.min_run},
           {"model", to_json(config.model)}}},
         {"counts",
          {{"records", result.log_data.size()},
           {"multivariate_outliers", result.decontamination.outliers.size()},
           {"univariate_trimmed", result.trim.trimmed_ids.size()},
           {"small", result.classification.small},
           {"large", result.classification.large},
           {"neither", result.classification.neither}}},
         {"w_crit", result.decontamination.w_crit ? Json(*result.decontamination.w_crit) : Json(nullptr)},
         {"schemes", schemes}};
  return j;
}

void write_pipeline_table(std::ostream& out, const PipelineResult& result) {
  constexpr int kLabel = 16, kCell = 22;
  out << std::left << std::setw(kLabel) << "";
  for (const auto& s : result.schemes) out << std::right << std::setw(kCell) << s.name;
  out << '\n';
  auto cell = [&](const std::string& text) { out << std::right << std::setw(kCell) << text; };
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << v;
    return ss.str();
  };
  auto fmt_p = [&](const std::optional<WaldTest>& t) {
    if (!t) return std::string("n/a");
    return t->p_value < 0.001 ? std::string("<0.001") : fmt(t->p_value);
  };

  std::vector<Measure> inputs;
  for (const auto& s : result.schemes)
    if (s.estimate) {
      inputs = s.estimate->inputs;
      break;
    }
  for (Measure m : inputs) {
    out << std::left << std::setw(kLabel) << to_string(m);
    for (const auto& s : result.schemes) {
      if (!s.estimate) {
        cell("failed");
        continue;
      }
      const double b = s.estimate->coefficient(m);
      const double se = s.estimate->std_error(m);
      const double p = se > 0.0 ? normal_two_sided_p(b / se) : 0.0;
      cell(fmt(b) + stars(p) + " (" + fmt(se) + ")");
    }
    out << '\n';
  }
  auto row = [&](const char* label, auto value) {
    out << std::left << std::setw(kLabel) << label;
    for (const auto& s : result.schemes) cell(s.estimate ? value(*s.estimate) : std::string("-"));
    out << '\n';
  };
  row("N", [](const EstimationResult& e) { return std::to_string(e.n_obs); });
  row("Elast of Scale", [&](const EstimationResult& e) { return fmt(e.scale_elasticity); });
  row("p-value CRS", [&](const EstimationResult& e) { return fmt_p(e.crs); });
  row("p-value Model", [&](const EstimationResult& e) { return fmt_p(e.model); });
  row("RSS", [&](const EstimationResult& e) { return fmt(e.scaled_rss); });
  for (const auto& s : result.schemes)
    if (s.error) out << s.name << ": " << *s.error << '\n';
}

void write_pipeline_csv(std::ostream& out, const PipelineResult& result) {
  out << "scheme,term,coef,se\n";
  for (const auto& s : result.schemes) {
    if (!s.estimate) continue;
    const auto& e = *s.estimate;
    for (Measure m : e.inputs)
      out << s.name << ',' << to_string(m) << ',' << csv::format_double(e.coefficient(m)) << ','
          << csv::format_double(e.std_error(m)) << '\n';
    out << s.name << ",N," << e.n_obs << ",\n";
    out << s.name << ",elasticity_of_scale," << csv::format_double(e.scale_elasticity) << ",\n";
    out << s.name << ",scaled_rss," << csv::format_double(e.scaled_rss) << ",\n";
  }
}

void write_cloud(std::ostream& out, const PointCloud& cloud, const std::vector<std::string>& dim_names) {
  if (dim_names.size() != cloud.dim()) throw std::invalid_argument("write_cloud: wrong number of dimension names");
  out << "id";
  for (const auto& d : dim_names) out << ',' << d;
  out << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << cloud.id(i);
    for (double x : cloud.point(i)) out << ',' << csv::format_double(x);
    out << '\n';
  }
}

NamedCloud read_cloud(std::istream& in, char delimiter) {
  std::size_t line_no = 0;
  const auto header_line = csv::next_line(in, line_no);
  if (!header_line) throw DataError("read_cloud: empty input");
  auto header = csv::split_line(*header_line, delimiter);
  if (header.size() < 2) throw DataError("read_cloud: need an id column and at least one coordinate");
  NamedCloud out{PointCloud(header.size() - 1), {header.begin() + 1, header.end()}};
  std::vector<double> row(header.size() - 1);
  while (const auto line = csv::next_line(in, line_no)) {
    const auto f = csv::split_line(*line, delimiter);
    if (f.size() != header.size())
      throw DataError("read_cloud: line " + std::to_string(line_no) + " has the wrong number of fields");
    for (std::size_t d = 1; d < f.size(); ++d) {
      const auto v = csv::parse_double(f[d]);
      if (!v || !std::isfinite(*v))
        throw DataError("read_cloud: line " + std::to_string(line_no) + ": bad coordinate '" + f[d] + "'");
      row[d - 1] = *v;
    }
    out.cloud.add(f[0], row);
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace robprod
