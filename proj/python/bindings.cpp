#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

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

namespace py = pybind11;
using namespace robprod;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

PointCloud make_cloud(const Array& points, const std::optional<std::vector<std::string>>& ids) {
  if (points.ndim() != 2) throw std::invalid_argument("points must be a 2-d array");
  const auto n = static_cast<std::size_t>(points.shape(0));
  const auto p = static_cast<std::size_t>(points.shape(1));
  if (p == 0) throw std::invalid_argument("points need at least one column");
  std::vector<double> coords(points.data(), points.data() + n * p);
  std::vector<std::string> names;
  if (ids) {
    if (ids->size() != n) throw std::invalid_argument("ids length does not match the number of rows");
    names = *ids;
  } else {
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  }
  return PointCloud(p, std::move(coords), std::move(names));
}

char delimiter_of(const std::string& d) {
  if (d == "\\t" || d == "\t") return '\t';
  if (d.size() != 1) throw std::invalid_argument("delimiter must be a single character");
  return d[0];
}

std::vector<Measure> measures(const std::vector<std::string>& names) {
  std::vector<Measure> out;
  for (const auto& n : names) out.push_back(parse_measure(n));
  return out;
}

ModelSpec model_spec(const std::string& estimator, int degree, bool year_dummies,
                     const std::optional<std::vector<std::string>>& regressors,
                     const std::string& dependent, int lags) {
  ModelSpec spec;
  spec.estimator = parse_estimator(estimator);
  spec.degree = degree;
  spec.year_dummies = year_dummies;
  if (regressors) spec.regressors = measures(*regressors);
  spec.dependent = parse_measure(dependent);
  spec.instrument_lags = lags;
  return spec;
}

PanelDataset read_panel(const std::string& path, const std::string& scale, const std::string& delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("input file not found: " + path);
  return load_panel(in, {}, delimiter_of(delimiter), parse_scale(scale)).data;
}

py::array_t<double> column(const PanelDataset& data, const std::string& measure) {
  const Measure m = parse_measure(measure);
  py::array_t<double> out(static_cast<py::ssize_t>(data.size()));
  auto v = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < data.size(); ++i) v(static_cast<py::ssize_t>(i)) = data.records[i].get(m);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust production-function estimation with pruned minimum spanning trees";
  m.attr("__version__") = ROBPROD_VERSION;

  static py::exception<DataError> data_error(m, "DataError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DataError& e) {
      data_error(e.what());
    } catch (const NumericalError& e) {
      numerical_error(e.what());
    }
  });

  py::class_<PanelDataset>(m, "Panel")
      .def(py::init<>())
      .def_static("read_csv", &read_panel, py::arg("path"), py::arg("scale") = "raw",
                  py::arg("delimiter") = ",")
      .def_static(
          "from_csv_text",
          [](const std::string& text, const std::string& scale, const std::string& delimiter) {
            std::istringstream in(text);
            return load_panel(in, {}, delimiter_of(delimiter), parse_scale(scale)).data;
          },
          py::arg("text"), py::arg("scale") = "raw", py::arg("delimiter") = ",")
      .def("to_csv_text",
           [](const PanelDataset& d) {
             std::ostringstream out;
             write_panel(out, d);
             return out.str();
           })
      .def("__len__", &PanelDataset::size)
      .def_property_readonly("scale", [](const PanelDataset& d) { return std::string(to_string(d.scale)); })
      .def("ids",
           [](const PanelDataset& d) {
             std::vector<std::string> out;
             for (const auto& r : d.records) out.push_back(r.id());
             return out;
           })
      .def("farms",
           [](const PanelDataset& d) {
             std::vector<std::string> out;
             for (const auto& r : d.records) out.push_back(r.farm_id);
             return out;
           })
      .def("years",
           [](const PanelDataset& d) {
             std::vector<int> out;
             for (const auto& r : d.records) out.push_back(r.year);
             return out;
           })
      .def("column", &column, py::arg("measure"))
      .def("log", &log_transform)
      .def(
          "restrict",
          [](const PanelDataset& d, const std::vector<std::string>& ids) {
            return restrict_to(d, {ids.begin(), ids.end()});
          },
          py::arg("ids"))
      .def(
          "points",
          [](const PanelDataset& d, const std::vector<std::string>& dims) {
            const auto ms = measures(dims);
            const PointCloud c = to_point_cloud(d, ms);
            py::array_t<double> out({static_cast<py::ssize_t>(c.size()), static_cast<py::ssize_t>(c.dim())});
            std::copy(c.coords().begin(), c.coords().end(), out.mutable_data());
            return out;
          },
          py::arg("dims") = std::vector<std::string>{"output", "labour", "land", "materials", "capital"});

  m.def(
      "simulate",
      [](const std::string& variant, std::uint64_t seed, int farms, int outlier_farms, int periods,
         double contamination) {
        SimPanel sim;
        if (variant == "production") {
          ProductionPanelConfig cfg;
          cfg.seed = seed;
          if (farms > 0) cfg.farms = farms;
          if (periods > 0) cfg.periods = periods;
          cfg.contamination = contamination;
          sim = generate_production_panel(cfg);
        } else {
          SimConfig cfg;
          cfg.seed = seed;
          if (farms > 0) cfg.clean_farms = farms;
          if (outlier_farms >= 0) cfg.outlier_farms = outlier_farms;
          if (periods > 0) cfg.periods = periods;
          sim = generate(cfg, parse_variant(variant));
        }
        std::vector<std::string> outliers(sim.outlier_ids.begin(), sim.outlier_ids.end());
        std::sort(outliers.begin(), outliers.end());
        return py::make_tuple(std::move(sim.data), outliers);
      },
      py::arg("variant") = "sample1", py::arg("seed") = 0, py::arg("farms") = 0,
      py::arg("outlier_farms") = -1, py::arg("periods") = 0, py::arg("contamination") = 0.0);

  m.def(
      "build_mst",
      [](const Array& points) { return to_python(to_json(build_mst(make_cloud(points, std::nullopt)))); },
      py::arg("points"));

  m.def(
      "critical_length",
      [](double mean, double stddev, std::size_t m, double alpha) {
        return critical_length(EdgeStats{mean, stddev, m}, alpha);
      },
      py::arg("mean"), py::arg("stddev"), py::arg("m"), py::arg("alpha"));

  m.def(
      "decontaminate",
      [](const Array& points, const std::optional<std::vector<std::string>>& ids, double alpha,
         bool standardize) {
        PruneConfig cfg{alpha, standardize};
        const auto result = decontaminate(make_cloud(points, ids), cfg);
        return to_python(decontamination_report(result, cfg));
      },
      py::arg("points"), py::arg("ids") = py::none(), py::arg("alpha") = 0.95,
      py::arg("standardize") = false);

  m.def(
      "classify",
      [](const Array& non_outliers, const Array& outliers,
         const std::optional<std::vector<std::string>>& ids) {
        const PointCloud non = make_cloud(non_outliers, std::nullopt);
        const PointCloud out = make_cloud(outliers, ids);
        if (non.dim() != out.dim()) throw DataError("classify: dimension mismatch");
        const auto result = classify_outliers(out, build_boundaries(non));
        std::vector<std::string> labels;
        for (auto l : result.labels) labels.emplace_back(to_string(l));
        return labels;
      },
      py::arg("non_outliers"), py::arg("outliers"), py::arg("ids") = py::none());

  m.def(
      "trim",
      [](const PanelDataset& data, const std::string& numerator, const std::string& denominator,
         double s, bool per_farm) {
        TrimRule rule{s, parse_measure(numerator), parse_measure(denominator), per_farm};
        return to_python(trim_report(trim(data, rule), rule, data.scale));
      },
      py::arg("panel"), py::arg("numerator") = "output", py::arg("denominator") = "capital",
      py::arg("s") = 1.5, py::arg("per_farm") = true);

  m.def(
      "estimate",
      [](const PanelDataset& data, const std::string& estimator, int degree, bool year_dummies,
         const std::optional<std::vector<std::string>>& regressors, const std::string& dependent, int lags) {
        const ModelSpec spec = model_spec(estimator, degree, year_dummies, regressors, dependent, lags);
        const PanelDataset logged = data.scale == Scale::Log ? data : log_transform(data);
        return to_python(estimation_report(fit(logged, spec), spec));
      },
      py::arg("panel"), py::arg("estimator") = "wlp", py::arg("degree") = 2, py::arg("year_dummies") = true,
      py::arg("regressors") = py::none(), py::arg("dependent") = "output", py::arg("lags") = 1);

  m.def(
      "run_pipeline",
      [](const PanelDataset& data, const std::vector<std::string>& dims,
         const std::optional<std::vector<std::string>>& classify_dims, double alpha, bool standardize,
         const std::string& numerator, const std::string& denominator, double s, bool per_farm,
         int min_run, const std::string& estimator, int degree, bool year_dummies,
         const std::optional<std::vector<std::string>>& regressors) {
        PipelineConfig cfg;
        cfg.prune = PruneConfig{alpha, standardize};
        cfg.cloud_dims = measures(dims);
        if (classify_dims) cfg.classify_dims = measures(*classify_dims);
        cfg.trim = TrimRule{s, parse_measure(numerator), parse_measure(denominator), per_farm};
        cfg.min_run = min_run;
        cfg.model = model_spec(estimator, degree, year_dummies, regressors, "output", 1);
        return to_python(pipeline_report(run_pipeline(data, cfg), cfg));
      },
      py::arg("panel"),
      py::arg("dims") = std::vector<std::string>{"output", "labour", "land", "materials", "capital"},
      py::arg("classify_dims") = py::none(), py::arg("alpha") = 0.95, py::arg("standardize") = false,
      py::arg("numerator") = "output", py::arg("denominator") = "capital", py::arg("s") = 1.5,
      py::arg("per_farm") = true, py::arg("min_run") = 4, py::arg("estimator") = "wlp",
      py::arg("degree") = 2, py::arg("year_dummies") = true, py::arg("regressors") = py::none());
}
