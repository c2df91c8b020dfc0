#include "robprod/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "robprod/csv.hpp"
#include "robprod/errors.hpp"

namespace robprod {

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::Output: return "output";
    case Measure::Labour: return "labour";
    case Measure::Land: return "land";
    case Measure::Materials: return "materials";
    case Measure::Capital: return "capital";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "output" || s == "y") return Measure::Output;
  if (s == "labour" || s == "labor" || s == "l") return Measure::Labour;
  if (s == "land" || s == "a") return Measure::Land;
  if (s == "materials" || s == "m") return Measure::Materials;
  if (s == "capital" || s == "k") return Measure::Capital;
  throw std::invalid_argument("unknown measure '" + std::string(name) + "'");
}

std::vector<Measure> parse_measure_list(std::string_view list) {
  if (list == "all") return {kAllMeasures.begin(), kAllMeasures.end()};
  std::vector<Measure> out;
  for (const auto& part : csv::split_line(list, ',')) {
    if (!part.empty()) out.push_back(parse_measure(part));
  }
  if (out.empty()) throw std::invalid_argument("empty measure list");
  return out;
}

std::string_view to_string(Scale s) noexcept {
  switch (s) {
    case Scale::Raw: return "raw";
    case Scale::Deflated: return "deflated";
    case Scale::Log: return "log";
  }
  return "?";
}

Scale parse_scale(std::string_view name) {
  if (name == "raw") return Scale::Raw;
  if (name == "deflated") return Scale::Deflated;
  if (name == "log") return Scale::Log;
  throw std::invalid_argument("unknown scale '" + std::string(name) + "'");
}

double PanelRecord::get(Measure m) const noexcept {
  switch (m) {
    case Measure::Output: return output;
    case Measure::Labour: return labour;
    case Measure::Land: return land;
    case Measure::Materials: return materials;
    case Measure::Capital: return capital;
  }
  return output;
}

double& PanelRecord::get(Measure m) noexcept {
  switch (m) {
    case Measure::Output: return output;
    case Measure::Labour: return labour;
    case Measure::Land: return land;
    case Measure::Materials: return materials;
    case Measure::Capital: return capital;
  }
  return output;
}

std::string record_id(std::string_view farm_id, int year) {
  std::string id(farm_id);
  id += ':';
  id += std::to_string(year);
  return id;
}

std::string PanelRecord::id() const { return record_id(farm_id, year); }

namespace {

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "na" || field == "." || field == "NaN";
}

}  // namespace

LoadResult load_panel(std::istream& in, const ColumnMap& columns, char delimiter, Scale scale) {
  if (scale == Scale::Deflated)
    throw std::invalid_argument("load_panel: input scale must be raw or log");
  std::size_t line_no = 0;
  const auto header_line = csv::next_line(in, line_no);
  if (!header_line) throw DataError("load_panel: empty input, expected a header row");
  const auto header = csv::split_line(*header_line, delimiter);

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("load_panel: required column '" + name + "' not found");
    return static_cast<std::size_t>(it - header.begin());
  };
  if (columns.materials.empty()) throw DataError("load_panel: no materials column mapped");

  const std::size_t c_farm = column_of(columns.farm_id);
  const std::size_t c_year = column_of(columns.year);
  const std::array<std::pair<Measure, std::size_t>, 4> single = {{
      {Measure::Output, column_of(columns.output)},
      {Measure::Labour, column_of(columns.labour)},
      {Measure::Land, column_of(columns.land)},
      {Measure::Capital, column_of(columns.capital)},
  }};
  std::vector<std::size_t> c_materials;
  for (const auto& name : columns.materials) c_materials.push_back(column_of(name));

  LoadResult result;
  result.data.scale = scale;
  std::unordered_map<std::string, std::size_t> seen;

  while (const auto line = csv::next_line(in, line_no)) {
    const auto fields = csv::split_line(*line, delimiter);
    if (fields.size() != header.size())
      throw DataError("load_panel: line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, header has " +
                      std::to_string(header.size()));

    PanelRecord rec;
    rec.farm_id = fields[c_farm];
    if (rec.farm_id.empty()) throw DataError("load_panel: line " + std::to_string(line_no) + ": empty farm id");
    const auto year = csv::parse_int(fields[c_year]);
    if (!year) throw DataError("load_panel: line " + std::to_string(line_no) + ": unparseable year '" + fields[c_year] + "'");
    rec.year = static_cast<int>(*year);

    std::string reason;
    auto read = [&](std::size_t col) -> double {
      const auto& f = fields[col];
      if (is_missing(f)) {
        if (reason.empty()) reason = "missing measure '" + header[col] + "'";
        return 0.0;
      }
      const auto v = csv::parse_double(f);
      if (!v) throw DataError("load_panel: line " + std::to_string(line_no) + ": unparseable value '" + f + "' in column '" + header[col] + "'");
      if (!std::isfinite(*v) && reason.empty()) reason = "non-finite measure '" + header[col] + "'";
      return *v;
    };
    for (const auto& [measure, col] : single) rec.get(measure) = read(col);
    rec.materials = 0.0;
    for (std::size_t col : c_materials) rec.materials += read(col);

    if (reason.empty() && scale == Scale::Raw) {
      for (Measure m : kAllMeasures) {
        if (!(rec.get(m) > 0.0)) {
          reason = "non-positive measure '" + std::string(to_string(m)) + "'";
          break;
        }
      }
    }

    const std::string key = rec.id();
    if (const auto it = seen.find(key); it != seen.end())
      throw DataError("load_panel: duplicate record (farm " + rec.farm_id + ", year " +
                      std::to_string(rec.year) + ") on lines " + std::to_string(it->second) +
                      " and " + std::to_string(line_no));
    seen.emplace(key, line_no);

    if (!reason.empty()) {
      result.rejects.push_back({line_no, rec.farm_id, fields[c_year], reason});
      continue;
    }
    result.data.records.push_back(std::move(rec));
  }
  return result;
}

void write_panel(std::ostream& out, const PanelDataset& data, char delimiter) {
  out << "farm_id" << delimiter << "year";
  for (Measure m : kAllMeasures) out << delimiter << to_string(m);
  out << '\n';
  for (const auto& r : data.records) {
    out << r.farm_id << delimiter << r.year;
    for (Measure m : kAllMeasures) out << delimiter << csv::format_double(r.get(m));
    out << '\n';
  }
}

const std::map<int, double>& DeflatorTable::series(PriceSeries s) const noexcept {
  switch (s) {
    case PriceSeries::Output: return output;
    case PriceSeries::Investment: return investment;
    case PriceSeries::Consumption: return consumption;
  }
  return output;
}

DeflatorTable DeflatorTable::normalized() const {
  DeflatorTable out = *this;
  for (auto* series : {&out.output, &out.investment, &out.consumption}) {
    const auto base = series->find(base_year);
    if (base == series->end())
      throw DataError("deflators: base year " + std::to_string(base_year) + " missing from a series");
    const double b = base->second;
    for (auto& [year, value] : *series) value /= b;
  }
  return out;
}

DeflatorTable load_deflators(std::istream& in, int base_year, char delimiter) {
  std::size_t line_no = 0;
  const auto header_line = csv::next_line(in, line_no);
  if (!header_line) throw DataError("load_deflators: empty input");
  const auto header = csv::split_line(*header_line, delimiter);
  if (header.size() != 3 || header[0] != "year" || header[1] != "series" || header[2] != "value")
    throw DataError("load_deflators: expected header 'year,series,value'");

  DeflatorTable table;
  table.base_year = base_year;
  while (const auto line = csv::next_line(in, line_no)) {
    const auto f = csv::split_line(*line, delimiter);
    if (f.size() != 3) throw DataError("load_deflators: line " + std::to_string(line_no) + ": expected 3 fields");
    const auto year = csv::parse_int(f[0]);
    const auto value = csv::parse_double(f[2]);
    if (!year || !value || !(*value > 0.0))
      throw DataError("load_deflators: line " + std::to_string(line_no) + ": bad year or value");
    std::map<int, double>* target = nullptr;
    if (f[1] == "output") target = &table.output;
    else if (f[1] == "investment") target = &table.investment;
    else if (f[1] == "consumption") target = &table.consumption;
    else throw DataError("load_deflators: line " + std::to_string(line_no) + ": unknown series '" + f[1] + "'");
    if (!target->emplace(static_cast<int>(*year), *value).second)
      throw DataError("load_deflators: duplicate entry for " + f[1] + " " + f[0]);
  }
  return table;
}

PanelDataset deflate(const PanelDataset& data, const DeflatorTable& deflators) {
  if (data.scale != Scale::Raw) throw DataError("deflate: dataset must be on the raw scale");
  const DeflatorTable table = deflators.normalized();
  auto index = [&](PriceSeries s, const char* name, int year) {
    const auto& series = table.series(s);
    const auto it = series.find(year);
    if (it == series.end())
      throw DataError(std::string("deflate: no ") + name + " index for year " + std::to_string(year));
    return it->second;
  };
  PanelDataset out = data;
  out.scale = Scale::Deflated;
  for (auto& r : out.records) {
    r.output /= index(PriceSeries::Output, "output", r.year);
    r.capital /= index(PriceSeries::Investment, "investment", r.year);
    r.materials /= index(PriceSeries::Consumption, "consumption", r.year);
  }
  return out;
}

PanelDataset log_transform(const PanelDataset& data) {
  if (data.scale == Scale::Log) throw DataError("log_transform: dataset is already on the log scale");
  PanelDataset out = data;
  out.scale = Scale::Log;
  for (auto& r : out.records) {
    for (Measure m : kAllMeasures) {
      double& v = r.get(m);
      if (!(v > 0.0))
        throw DataError("log_transform: non-positive " + std::string(to_string(m)) + " in record " + r.id());
      v = std::log(v);
    }
  }
  return out;
}

PointCloud to_point_cloud(const PanelDataset& data, std::span<const Measure> dims) {
  if (data.scale != Scale::Log) throw DataError("to_point_cloud: dataset must be on the log scale");
  if (dims.empty()) throw std::invalid_argument("to_point_cloud: no dimensions selected");
  PointCloud cloud(dims.size());
  std::vector<double> row(dims.size());
  for (const auto& r : data.records) {
    for (std::size_t d = 0; d < dims.size(); ++d) row[d] = r.get(dims[d]);
    cloud.add(r.id(), row);
  }
  return cloud;
}

PanelDataset filter_min_consecutive(const PanelDataset& data,
                                    const std::unordered_set<std::string>& keep, int min_run) {
  if (min_run < 1) throw std::invalid_argument("filter_min_consecutive: min run must be >= 1");

  std::map<std::string, std::set<int>> years;
  for (const auto& r : data.records)
    if (keep.count(r.id())) years[r.farm_id].insert(r.year);

  std::set<std::pair<std::string, int>> retained;
  for (const auto& [farm, ys] : years) {
    std::vector<int> run;
    auto flush = [&] {
      if (static_cast<int>(run.size()) >= min_run)
        for (int y : run) retained.emplace(farm, y);
      run.clear();
    };
    for (int y : ys) {
      if (!run.empty() && y != run.back() + 1) flush();
      run.push_back(y);
    }
    flush();
  }

  PanelDataset out;
  out.scale = data.scale;
  for (const auto& r : data.records)
    if (retained.count({r.farm_id, r.year})) out.records.push_back(r);
  return out;
}

std::unordered_set<std::string> all_ids(const PanelDataset& data) {
  std::unordered_set<std::string> ids;
  for (const auto& r : data.records) ids.insert(r.id());
  return ids;
}

PanelDataset restrict_to(const PanelDataset& data, const std::unordered_set<std::string>& keep) {
  PanelDataset out;
  out.scale = data.scale;
  for (const auto& r : data.records)
    if (keep.count(r.id())) out.records.push_back(r);
  return out;
}

}  // namespace robprod
