#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "robprod/point_cloud.hpp"

namespace robprod {

enum class Measure { Output, Labour, Land, Materials, Capital };

inline constexpr std::array<Measure, 5> kAllMeasures = {
    Measure::Output, Measure::Labour, Measure::Land, Measure::Materials, Measure::Capital};

std::string_view to_string(Measure m) noexcept;
// Accepts the canonical names plus the single-letter symbols y, l, a, m, k.
Measure parse_measure(std::string_view name);
std::vector<Measure> parse_measure_list(std::string_view list);

enum class Scale { Raw, Deflated, Log };

std::string_view to_string(Scale s) noexcept;
Scale parse_scale(std::string_view name);

struct PanelRecord {
  std::string farm_id;
  int year = 0;
  double output = 0.0;     // currency units
  double labour = 0.0;     // hours
  double land = 0.0;       // hectares
  double materials = 0.0;  // currency units
  double capital = 0.0;    // currency units

  double get(Measure m) const noexcept;
  double& get(Measure m) noexcept;
  // "farm_id:year"
  std::string id() const;
};

std::string record_id(std::string_view farm_id, int year);

struct PanelDataset {
  std::vector<PanelRecord> records;
  Scale scale = Scale::Raw;

  std::size_t size() const noexcept { return records.size(); }
};

// Source column names for each role. Several materials columns are summed.
struct ColumnMap {
  std::string farm_id = "farm_id";
  std::string year = "year";
  std::string output = "output";
  std::string labour = "labour";
  std::string land = "land";
  std::vector<std::string> materials = {"materials"};
  std::string capital = "capital";
};

struct RejectedRow {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string farm_id;
  std::string year;
  std::string reason;
};

struct LoadResult {
  PanelDataset data;
  std::vector<RejectedRow> rejects;
};

// Parses delimited text with a header row. Rows with a missing measure, or a
// non-positive one when `scale` is Raw, go to `rejects`. Throws DataError on
// structural problems and on duplicate (farm_id, year) keys.
LoadResult load_panel(std::istream& in, const ColumnMap& columns = {}, char delimiter = ',',
                      Scale scale = Scale::Raw);

// Writes farm_id,year,output,labour,land,materials,capital at round-trip precision.
void write_panel(std::ostream& out, const PanelDataset& data, char delimiter = ',');

enum class PriceSeries { Output, Investment, Consumption };

struct DeflatorTable {
  int base_year = 2005;
  std::map<int, double> output;
  std::map<int, double> investment;
  std::map<int, double> consumption;

  const std::map<int, double>& series(PriceSeries s) const noexcept;
  // Each series divided by its base-year value.
  DeflatorTable normalized() const;
};

// year,series,value with a header row; series in {output, investment, consumption}.
DeflatorTable load_deflators(std::istream& in, int base_year, char delimiter = ',');

// Output / output index, capital / investment index, materials / consumption
// index; labour and land are physical and stay as they are. The table is
// normalized to its base year first.
PanelDataset deflate(const PanelDataset& data, const DeflatorTable& deflators);

PanelDataset log_transform(const PanelDataset& data);

// One point per record, coordinates in the order of `dims`
// (default: output, labour, land, materials, capital), ids "farm:year".
PointCloud to_point_cloud(const PanelDataset& data,
                          std::span<const Measure> dims = kAllMeasures);

// Keeps records whose id is in `keep`, then within each farm only the records
// lying in maximal runs of at least `min_run` consecutive years.
PanelDataset filter_min_consecutive(const PanelDataset& data,
                                    const std::unordered_set<std::string>& keep, int min_run = 4);

std::unordered_set<std::string> all_ids(const PanelDataset& data);

PanelDataset restrict_to(const PanelDataset& data, const std::unordered_set<std::string>& keep);

}  // namespace robprod
