#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lef/field.hpp"
#include "lef/flow.hpp"
#include "lef/spectrum.hpp"

namespace lef::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// Minimal CSV table: a header row and string cells, written UTF-8 with LF
/// line endings. Cells containing commas or quotes are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// t, dt, energy, sup_norm, residual, dissipation, energy_rate, nodal_count.
CsvTable trajectory_table(const Trajectory& tr);

Json domain_to_json(const DomainSpec& d);
DomainSpec domain_from_json(const Json& j);
Json group_to_json(const SymmetryGroup& g);
SymmetryGroup group_from_json(const Json& j);
Json grid_to_json(const Grid& g);
GridPtr grid_from_json(const Json& j);

Json trajectory_summary(const Trajectory& tr);
Json threshold_summary(const ThresholdResult& r);
Json spectrum_to_json(const SpectrumReport& r);
Json energy_to_json(const EnergyReport& e);
Json nodal_to_json(const NodalDecomposition& d, const SymmetryGroup* group = nullptr);

/// Field dump: one line of JSON (grid descriptor, time, count, plus `extra`),
/// a newline, then the values as little-endian float64 in node order
/// (row-major over (ring, angle) on polar grids, lattice order on cartesian ones).
void write_field(const ScalarField& v, const std::filesystem::path& path, const Json& extra = Json::object());

struct FieldDump {
  ScalarField field;
  Json header;
};

FieldDump read_field(const std::filesystem::path& path);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace lef::io
