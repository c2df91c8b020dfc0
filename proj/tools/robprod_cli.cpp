// robprod: pMST decontamination and panel production-function estimation.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "robprod/classify.hpp"
#include "robprod/dataset.hpp"
#include "robprod/errors.hpp"
#include "robprod/estimate.hpp"
#include "robprod/mst.hpp"
#include "robprod/pipeline.hpp"
#include "robprod/pmst.hpp"
#include "robprod/report.hpp"
#include "robprod/simgen.hpp"
#include "robprod/univariate.hpp"

namespace fs = std::filesystem;
using namespace robprod;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

int fail(ExitCode code, const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}}}}.dump()
            << '\n';
  return code;
}

std::ifstream open_input(const std::string& path) {
  if (!fs::exists(path)) throw DataError("input file not found: " + path);
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

template <typename Writer>
void write_file(const std::string& path, Writer&& writer) {
  std::ostringstream ss;
  writer(ss);
  write_text(path, ss.str());
}

std::vector<std::string> names_of(const std::vector<Measure>& ms) {
  std::vector<std::string> out;
  for (Measure m : ms) out.emplace_back(to_string(m));
  return out;
}

// Options shared by every subcommand that reads a panel file.
struct PanelOptions {
  std::string scale = "raw";
  std::string delimiter = ",";
  ColumnMap columns;
  std::string materials = "materials";
  std::string deflators;
  int base_year = 2005;

  void add_to(CLI::App& app) {
    app.add_option("--scale", scale, "Scale of the input values")->check(CLI::IsMember({"raw", "log"}));
    app.add_option("--delimiter", delimiter, "Field delimiter (use '\\t' for TSV)");
    app.add_option("--col-farm", columns.farm_id, "Farm id column");
    app.add_option("--col-year", columns.year, "Year column");
    app.add_option("--col-output", columns.output, "Output column (e.g. SE131)");
    app.add_option("--col-labour", columns.labour, "Labour column (e.g. SE011)");
    app.add_option("--col-land", columns.land, "Land column (e.g. SE025)");
    app.add_option("--col-materials", materials, "Materials column(s), comma separated columns are summed");
    app.add_option("--col-capital", columns.capital, "Capital column (e.g. SE360)");
    app.add_option("--deflators", deflators, "Deflator file (year,series,value); raw input only");
    app.add_option("--base-year", base_year, "Base year of the deflator indices");
  }

  char delim() const {
    if (delimiter == "\\t" || delimiter == "tab") return '\t';
    if (delimiter.size() != 1) throw CLI::ValidationError("--delimiter", "must be a single character");
    return delimiter[0];
  }

  PanelDataset load(const std::string& path, std::size_t* rejected = nullptr) {
    columns.materials.clear();
    std::stringstream ss(materials);
    for (std::string part; std::getline(ss, part, ',');)
      if (!part.empty()) columns.materials.push_back(part);
    auto in = open_input(path);
    LoadResult loaded = load_panel(in, columns, delim(), parse_scale(scale));
    for (const auto& r : loaded.rejects)
      std::cerr << "rejected line " << r.line << " (farm " << r.farm_id << ", year " << r.year
                << "): " << r.reason << '\n';
    if (rejected) *rejected = loaded.rejects.size();
    if (!deflators.empty()) {
      auto din = open_input(deflators);
      loaded.data = deflate(loaded.data, load_deflators(din, base_year, delim()));
    }
    return loaded.data;
  }
};

std::pair<Measure, Measure> parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw CLI::ValidationError("--ratio", "expected numerator/denominator");
  return {parse_measure(text.substr(0, slash)), parse_measure(text.substr(slash + 1))};
}

struct ModelOptions {
  std::string estimator = "wlp";
  int degree = 2;
  bool year_dummies = true;
  std::string cluster = "farm";
  std::string regressors = "land,labour,capital,materials";
  std::string dependent = "output";
  int lags = 1;

  void add_to(CLI::App& app) {
    app.add_option("--estimator", estimator, "within or wlp")->check(CLI::IsMember({"within", "fe", "wlp"}));
    app.add_option("--degree", degree, "Control-function polynomial degree")->check(CLI::PositiveNumber);
    app.add_flag("--year-dummies,!--no-year-dummies", year_dummies, "Include year dummies");
    app.add_option("--cluster", cluster, "Cluster key")->check(CLI::IsMember({"farm"}));
    app.add_option("--regressors", regressors, "Input list in reporting order");
    app.add_option("--dependent", dependent, "Dependent measure");
    app.add_option("--lags", lags, "Deepest input lag used as instrument")->check(CLI::PositiveNumber);
  }

  ModelSpec spec() const {
    ModelSpec s;
    s.estimator = parse_estimator(estimator);
    s.degree = degree;
    s.year_dummies = year_dummies;
    s.regressors = parse_measure_list(regressors);
    s.dependent = parse_measure(dependent);
    s.instrument_lags = lags;
    return s;
  }
};

std::vector<std::size_t> resolve_dims(const std::string& dims, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  if (dims == "all") {
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back(i);
    return out;
  }
  std::stringstream ss(dims);
  for (std::string part; std::getline(ss, part, ',');) {
    auto it = std::find(names.begin(), names.end(), part);
    if (it == names.end()) {
      try {
        it = std::find(names.begin(), names.end(), std::string(to_string(parse_measure(part))));
      } catch (const std::invalid_argument&) {
      }
    }
    if (it == names.end()) throw DataError("dimension '" + part + "' not found in the point cloud header");
    out.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust production-function analysis: pMST decontamination, IQR trimming, "
               "dominance classification and panel estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ROBPROD_VERSION);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a simulated panel");
  std::string variant = "sample1", sim_out, sim_labels;
  std::uint64_t seed = 0;
  SimConfig sim_cfg;
  ProductionPanelConfig prod_cfg;
  sim->add_option("--variant", variant, "raw, sample1, sample2 or production")
      ->check(CLI::IsMember({"raw", "sample1", "sample2", "production"}));
  auto* seed_opt = sim->add_option("--seed", seed, "Master seed (drawn and printed when omitted)");
  sim->add_option("--out", sim_out, "Panel CSV output")->required();
  sim->add_option("--labels", sim_labels, "Ground-truth contamination labels CSV");
  sim->add_option("--farms", sim_cfg.clean_farms, "Clean farms (two-input design) / farms (production)");
  sim->add_option("--outlier-farms", sim_cfg.outlier_farms, "Contaminating farms (two-input design)");
  sim->add_option("--periods", sim_cfg.periods, "Periods per farm");
  sim->add_option("--contamination", prod_cfg.contamination, "Misreported share (production design)");

  // decontaminate
  auto* dec = app.add_subcommand("decontaminate", "pMST decontamination of a point cloud");
  std::string dec_input, dec_panel, dec_report, dec_dump, dec_dims = "all", dec_keep_out, dec_out_out;
  PruneConfig prune;
  PanelOptions dec_panel_opts;
  dec->add_option("--input", dec_input, "Point cloud CSV (id, coordinates)");
  dec->add_option("--panel", dec_panel, "Panel CSV instead of a point cloud");
  dec->add_option("--dims", dec_dims, "Coordinates to use: all or a comma list");
  dec->add_option("--alpha", prune.alpha, "Reweighting probability")->check(CLI::Range(0.0, 1.0));
  dec->add_flag("--standardize", prune.standardize, "z-score coordinates before building the tree");
  dec->add_option("--report", dec_report, "JSON report (default stdout)");
  dec->add_option("--dump-mst", dec_dump, "Write the MST edge list as JSON");
  dec->add_option("--non-outliers-out", dec_keep_out, "Write the non-outlier cloud CSV");
  dec->add_option("--outliers-out", dec_out_out, "Write the outlier cloud CSV");
  dec_panel_opts.add_to(*dec);

  // trim
  auto* trm = app.add_subcommand("trim", "Univariate IQR trimming on a ratio");
  std::string trm_input, trm_report, ratio = "output/capital";
  TrimRule rule;
  bool per_record = false;
  PanelOptions trm_opts;
  trm->add_option("--input", trm_input, "Panel CSV")->required();
  trm->add_option("--ratio", ratio, "numerator/denominator");
  trm->add_flag("--per-farm", rule.per_farm, "Average the ratio per farm (default)");
  trm->add_flag("--per-record", per_record, "Trim single records instead of farms");
  trm->add_option("--s", rule.scale, "IQR scale factor")->check(CLI::PositiveNumber);
  trm->add_option("--report", trm_report, "JSON report (default stdout)");
  trm_opts.add_to(*trm);

  // classify
  auto* cls = app.add_subcommand("classify", "Split outliers into large / small / neither");
  std::string cls_non, cls_out, cls_dims = "all", cls_report;
  cls->add_option("--non-outliers", cls_non, "Non-outlier cloud CSV")->required();
  cls->add_option("--outliers", cls_out, "Outlier cloud CSV")->required();
  cls->add_option("--dims", cls_dims, "all or a comma list of coordinates");
  cls->add_option("--report", cls_report, "JSON report (default stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "Fit the production function on a sample");
  std::string est_sample, est_report;
  ModelOptions est_model;
  PanelOptions est_opts;
  est->add_option("--sample", est_sample, "Panel CSV")->required();
  est->add_option("--report", est_report, "JSON report (default stdout)");
  est_model.add_to(*est);
  est_opts.add_to(*est);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Run every stage and compare the four samples");
  std::string pipe_input, pipe_report, pipe_dir, pipe_format = "json", pipe_dims = "all", pipe_cdims,
                                                 pipe_ratio = "output/capital";
  PipelineConfig pipe_cfg;
  ModelOptions pipe_model;
  PanelOptions pipe_opts;
  bool pipe_per_record = false;
  bool keep_neither = true;
  pipe->add_option("--input", pipe_input, "Panel CSV")->required();
  pipe->add_option("--report", pipe_report, "Comparison report (default stdout)");
  pipe->add_option("--out-dir", pipe_dir, "Write every intermediate file and stage report here");
  pipe->add_option("--format", pipe_format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
  pipe->add_option("--dims", pipe_dims, "Cloud coordinates: all or a measure list");
  pipe->add_option("--classify-dims", pipe_cdims, "Coordinates for the large/small split");
  pipe->add_option("--alpha", pipe_cfg.prune.alpha, "Reweighting probability")->check(CLI::Range(0.0, 1.0));
  pipe->add_flag("--standardize", pipe_cfg.prune.standardize, "z-score coordinates before building the tree");
  pipe->add_option("--ratio", pipe_ratio, "Trim ratio numerator/denominator");
  pipe->add_option("--s", pipe_cfg.trim.scale, "IQR scale factor")->check(CLI::PositiveNumber);
  pipe->add_flag("--per-record", pipe_per_record, "Trim single records instead of farms");
  pipe->add_option("--min-run", pipe_cfg.min_run, "Minimum run of consecutive years")->check(CLI::PositiveNumber);
  pipe->add_flag("--keep-neither,!--drop-neither", keep_neither,
                 "small-large sample keeps outliers labelled neither (only this variant is defined)");
  pipe_model.add_to(*pipe);
  pipe_opts.add_to(*pipe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*sim) {
      if (!*seed_opt) {
        seed = (static_cast<std::uint64_t>(std::random_device{}()) << 32) | std::random_device{}();
        std::cerr << "seed: " << seed << '\n';
      }
      SimPanel panel;
      if (variant == "production") {
        prod_cfg.seed = seed;
        if (sim->count("--farms")) prod_cfg.farms = sim_cfg.clean_farms;
        if (sim->count("--periods")) prod_cfg.periods = sim_cfg.periods;
        panel = generate_production_panel(prod_cfg);
      } else {
        sim_cfg.seed = seed;
        panel = generate(sim_cfg, parse_variant(variant));
      }
      write_file(sim_out, [&](std::ostream& o) { write_panel(o, panel.data); });
      if (!sim_labels.empty()) {
        write_file(sim_labels, [&](std::ostream& o) {
          o << "id,outlier\n";
          for (const auto& r : panel.data.records) o << r.id() << ',' << (panel.outlier_ids.count(r.id()) ? 1 : 0) << '\n';
        });
      }
      Json summary{{"provenance", provenance("simulate")},
                   {"variant", variant},
                   {"seed", seed},
                   {"scale", to_string(panel.data.scale)},
                   {"records", panel.data.size()},
                   {"labelled_outliers", panel.outlier_ids.size()}};
      std::cout << dump(summary);
      return kOk;
    }

    if (*dec) {
      NamedCloud named{PointCloud(1), {}};
      if (!dec_input.empty() == !dec_panel.empty())
        return fail(kUsage, "usage", "decontaminate: give exactly one of --input or --panel");
      if (!dec_input.empty()) {
        auto in = open_input(dec_input);
        named = read_cloud(in);
      } else {
        PanelDataset data = dec_panel_opts.load(dec_panel);
        if (data.scale != Scale::Log) data = log_transform(data);
        const std::vector<Measure> all(kAllMeasures.begin(), kAllMeasures.end());
        named = {to_point_cloud(data, all), names_of(all)};
      }
      const auto dims = resolve_dims(dec_dims, named.dim_names);
      PointCloud cloud = named.cloud.select_dims(dims);
      std::vector<std::string> dim_names;
      for (std::size_t d : dims) dim_names.push_back(named.dim_names[d]);

      const MstResult mst = build_mst(prune.standardize ? standardize_columns(cloud) : cloud);
      if (!dec_dump.empty()) write_text(dec_dump, dump(to_json(mst)));
      const DecontaminationResult result = decontaminate(cloud, mst, prune);
      if (!dec_keep_out.empty())
        write_file(dec_keep_out, [&](std::ostream& o) { write_cloud(o, cloud.subset(result.non_outliers), dim_names); });
      if (!dec_out_out.empty())
        write_file(dec_out_out, [&](std::ostream& o) { write_cloud(o, cloud.subset(result.outliers), dim_names); });
      write_text(dec_report, dump(decontamination_report(result, prune)));
      return result.reweight_error ? kNumerical : kOk;
    }

    if (*trm) {
      const auto [num, den] = parse_ratio(ratio);
      rule.numerator = num;
      rule.denominator = den;
      if (per_record) rule.per_farm = false;
      const PanelDataset data = trm_opts.load(trm_input);
      write_text(trm_report, dump(trim_report(trim(data, rule), rule, data.scale)));
      return kOk;
    }

    if (*cls) {
      auto in_non = open_input(cls_non);
      auto in_out = open_input(cls_out);
      const NamedCloud non = read_cloud(in_non);
      const NamedCloud out = read_cloud(in_out);
      if (non.dim_names != out.dim_names) throw DataError("classify: the two clouds have different coordinates");
      const auto dims = resolve_dims(cls_dims, non.dim_names);
      std::vector<std::string> dim_names;
      for (std::size_t d : dims) dim_names.push_back(non.dim_names[d]);
      const auto boundary = build_boundaries(non.cloud.select_dims(dims));
      const auto labels = classify_outliers(out.cloud.select_dims(dims), boundary);
      write_text(cls_report, dump(classification_report(labels, dim_names)));
      return kOk;
    }

    if (*est) {
      PanelDataset data = est_opts.load(est_sample);
      if (data.scale != Scale::Log) data = log_transform(data);
      const ModelSpec spec = est_model.spec();
      write_text(est_report, dump(estimation_report(fit(data, spec), spec)));
      return kOk;
    }

    if (*pipe) {
      const auto [num, den] = parse_ratio(pipe_ratio);
      pipe_cfg.trim.numerator = num;
      pipe_cfg.trim.denominator = den;
      pipe_cfg.trim.per_farm = !pipe_per_record;
      pipe_cfg.cloud_dims = parse_measure_list(pipe_dims);
      if (!pipe_cdims.empty()) pipe_cfg.classify_dims = parse_measure_list(pipe_cdims);
      pipe_cfg.model = pipe_model.spec();
      if (!keep_neither) return fail(kUsage, "usage", "pipeline: only the keep-neither small-large sample is defined");

      const PanelDataset data = pipe_opts.load(pipe_input);
      const PipelineResult result = run_pipeline(data, pipe_cfg);

      if (!pipe_dir.empty()) {
        fs::create_directories(pipe_dir);
        auto path = [&](const std::string& name) { return (fs::path(pipe_dir) / name).string(); };
        const auto cloud_names = names_of(pipe_cfg.cloud_dims);
        const auto class_names = names_of(result.classify_dims);
        const PointCloud class_cloud = to_point_cloud(result.log_data, result.classify_dims);
        write_file(path("cloud.csv"), [&](std::ostream& o) { write_cloud(o, result.cloud, cloud_names); });
        write_text(path("decontaminate.json"), dump(decontamination_report(result.decontamination, pipe_cfg.prune)));
        write_file(path("non_outliers.csv"), [&](std::ostream& o) {
          write_cloud(o, class_cloud.subset(result.decontamination.non_outliers), class_names);
        });
        write_file(path("outliers.csv"), [&](std::ostream& o) {
          write_cloud(o, class_cloud.subset(result.decontamination.outliers), class_names);
        });
        write_file(path("trim-input.csv"), [&](std::ostream& o) { write_panel(o, data); });
        write_text(path("trim.json"), dump(trim_report(result.trim, pipe_cfg.trim, data.scale)));
        write_text(path("classify.json"), dump(classification_report(result.classification, class_names)));
        for (const auto& s : result.schemes) {
          write_file(path("sample-" + s.name + ".csv"), [&](std::ostream& o) { write_panel(o, s.sample); });
          if (s.estimate)
            write_text(path("estimate-" + s.name + ".json"), dump(estimation_report(*s.estimate, pipe_cfg.model)));
        }
        write_text(path("pipeline.json"), dump(pipeline_report(result, pipe_cfg)));
      }

      if (pipe_format == "json") {
        write_text(pipe_report, dump(pipeline_report(result, pipe_cfg)));
      } else if (pipe_format == "csv") {
        write_file(pipe_report, [&](std::ostream& o) { write_pipeline_csv(o, result); });
      } else {
        write_file(pipe_report, [&](std::ostream& o) { write_pipeline_table(o, result); });
      }
      for (const auto& s : result.schemes)
        if (s.error) return kNumerical;
      return kOk;
    }
  } catch (const CLI::ValidationError& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const DataError& e) {
    return fail(kData, "data", e.what());
  } catch (const NumericalError& e) {
    return fail(kNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(kData, "error", e.what());
  }
  return kOk;
}
