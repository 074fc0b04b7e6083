#include "lef/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lef::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("CSV table needs at least one column");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  rows_.push_back(std::move(cells));
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  out += '\n';
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, mode);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return f;
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  append_row(out, header_);
  for (const auto& r : rows_) append_row(out, r);
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  auto f = open_out(path, std::ios::out | std::ios::binary);
  f << str();
}

CsvTable trajectory_table(const Trajectory& tr) {
  CsvTable t({"t", "dt", "energy", "sup_norm", "residual", "dissipation", "energy_rate", "nodal_count"});
  for (const auto& s : tr.samples)
    t.add_row({format_double(s.t), format_double(s.dt), format_double(s.energy), format_double(s.sup_norm),
               s.residual < 0.0 ? "" : format_double(s.residual), format_double(s.dissipation),
               format_double(s.energy_rate), s.nodal_count < 0 ? "" : std::to_string(s.nodal_count)});
  return t;
}

Json domain_to_json(const DomainSpec& d) {
  Json j;
  j["shape"] = d.name();
  if (d.parameters().empty()) throw std::invalid_argument("domain '" + d.name() + "' is a generic mask and cannot be serialized");
  const auto& p = d.parameters();
  if (d.name() == "disk" || d.name() == "squircle") j["radius"] = p[0];
  else if (d.name() == "annulus") {
    j["inner"] = p[0];
    j["outer"] = p[1];
  } else if (d.name() == "square") j["half_width"] = p[0];
  else if (d.name() == "ellipse") {
    j["semi_x"] = p[0];
    j["semi_y"] = p[1];
  }
  return j;
}

DomainSpec domain_from_json(const Json& j) {
  const std::string shape = j.value("shape", "disk");
  if (shape == "disk") return DomainSpec::disk(j.value("radius", 1.0));
  if (shape == "annulus") return DomainSpec::annulus(j.value("inner", 0.5), j.value("outer", 1.0));
  if (shape == "squircle") return DomainSpec::squircle(j.value("radius", 1.0));
  if (shape == "square") return DomainSpec::square(j.value("half_width", 1.0));
  if (shape == "ellipse") return DomainSpec::ellipse(j.value("semi_x", 1.0), j.value("semi_y", 1.0));
  throw std::invalid_argument("unknown domain shape '" + shape + "'");
}

Json group_to_json(const SymmetryGroup& g) {
  return {{"kind", g.kind() == GroupKind::cyclic ? "cyclic" : "dihedral"}, {"order", g.order()}, {"axis", g.axis_angle()}};
}

SymmetryGroup group_from_json(const Json& j) {
  const std::string kind = j.value("kind", "cyclic");
  const int order = j.value("order", 4);
  if (kind == "cyclic") return SymmetryGroup::cyclic(order);
  if (kind == "dihedral") return SymmetryGroup::dihedral(order, j.value("axis", 0.0));
  throw std::invalid_argument("unknown group kind '" + kind + "'");
}

Json grid_to_json(const Grid& g) {
  Json j;
  j["kind"] = g.kind() == GridKind::polar ? "polar" : "cartesian";
  j["domain"] = domain_to_json(g.domain());
  if (g.kind() == GridKind::polar) {
    j["n_r"] = g.n_r();
    j["n_theta"] = g.n_theta();
  } else {
    j["n_cells"] = g.n_cells();
  }
  j["nodes"] = g.size();
  return j;
}

GridPtr grid_from_json(const Json& j) {
  const DomainSpec d = domain_from_json(j.at("domain"));
  const std::string kind = j.value("kind", "polar");
  if (kind == "polar") return Grid::polar(d, j.at("n_r").get<int>(), j.at("n_theta").get<int>());
  if (kind == "cartesian") return Grid::cartesian(d, j.at("n_cells").get<int>());
  throw std::invalid_argument("unknown grid kind '" + kind + "'");
}

Json energy_to_json(const EnergyReport& e) {
  return {{"grad_norm_sq", e.grad_norm_sq}, {"lp1_norm_pow", e.lp1_norm_pow}, {"energy", e.energy},
          {"scaled_energy", e.scaled_energy}, {"nehari_residual", e.nehari_residual()}};
}

Json trajectory_summary(const Trajectory& tr) {
  Json j;
  j["outcome"] = to_string(tr.outcome);
  j["reason"] = tr.reason;
  j["steps"] = tr.steps;
  j["final_time"] = tr.final_time();
  j["final_residual"] = tr.final_residual;
  j["final_sup_norm"] = tr.samples.empty() ? 0.0 : tr.samples.back().sup_norm;
  j["final_energy"] = tr.samples.empty() ? 0.0 : tr.samples.back().energy;
  j["decay_threshold"] = tr.decay_threshold;
  j["blowup_threshold"] = tr.blowup_threshold;
  j["energy_violations"] = tr.energy_violations;
  j["max_energy_increase"] = tr.max_energy_increase;
  j["min_residual"] = tr.min_residual;
  return j;
}

Json threshold_summary(const ThresholdResult& r) {
  Json j;
  j["ok"] = r.ok;
  j["lambda_star"] = r.lambda_star;
  j["lambda_lo"] = r.lambda_lo;
  j["lambda_hi"] = r.lambda_hi;
  j["bisection_width"] = r.bisection_width;
  j["flow_residual"] = r.flow_residual;
  j["omega_residual"] = r.omega_residual;
  j["polished"] = r.polished;
  if (r.polished) j["polish_distance"] = r.polish_distance;
  j["newton_iterations"] = r.newton_iterations;
  j["blowup_sign"] = r.blowup_sign;
  j["sign_changing"] = r.sign_changing();
  j["diagnostics"] = r.diagnostics;
  Json probes = Json::array();
  for (const auto& p : r.probes)
    probes.push_back({{"lambda", p.lambda}, {"outcome", to_string(p.outcome)}, {"t_end", p.t_end},
                      {"min_residual", p.min_residual}, {"blowup_sign", p.blowup_sign}});
  j["probes"] = probes;
  return j;
}

Json spectrum_to_json(const SpectrumReport& r) {
  Json j;
  j["morse_index"] = r.morse_index;
  j["eigenvalues"] = r.eigenvalues;
  j["residuals"] = r.residuals;
  j["elliptic_residual"] = r.elliptic_residual;
  j["inertia_consistent"] = r.inertia_consistent;
  if (r.symmetric_morse_index) {
    j["symmetric_morse_index"] = *r.symmetric_morse_index;
    j["symmetric_eigenvalues"] = *r.symmetric_eigenvalues;
  }
  if (r.half_domain) {
    j["half_domain"] = {{"mu", r.half_domain->mu},
                        {"odd_extension_residual", r.half_domain->odd_extension_residual},
                        {"full_spectrum_gap", r.half_domain->full_spectrum_gap},
                        {"half_nodes", r.half_domain->half_nodes}};
  }
  return j;
}

Json nodal_to_json(const NodalDecomposition& d, const SymmetryGroup* group) {
  Json j;
  j["tau"] = d.tau;
  j["count"] = d.count();
  j["positive"] = d.positive_count();
  j["negative"] = d.negative_count();
  j["nodal_line_touches_boundary"] = d.nodal_line_touches_boundary();
  if (d.grid->domain().contains_origin()) {
    const auto o = contains_origin(d);
    j["origin_domain"] = o ? Json(*o) : Json(nullptr);
  }
  std::vector<DomainSymmetry> sym;
  if (group) sym = domain_symmetry_check(d, *group);
  Json doms = Json::array();
  for (const auto& dom : d.domains) {
    Json e = {{"id", dom.id}, {"sign", dom.sign}, {"nodes", dom.node_count},
              {"touches_boundary", dom.touches_boundary}, {"contains_origin", dom.contains_origin}};
    if (group) {
      e["symmetric"] = sym[static_cast<std::size_t>(dom.id - 1)].symmetric;
      e["mismatch_fraction"] = sym[static_cast<std::size_t>(dom.id - 1)].mismatch_fraction;
    }
    doms.push_back(e);
  }
  j["domains"] = doms;
  j["adjacency"] = d.adjacency;
  return j;
}

namespace {

void put_le(std::ostream& os, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  unsigned char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_field(const ScalarField& v, const std::filesystem::path& path, const Json& extra) {
  Json h;
  h["format"] = "lef-field";
  h["version"] = 1;
  h["dtype"] = "float64-le";
  h["count"] = v.size();
  h["time"] = v.time();
  h["grid"] = grid_to_json(v.grid_ref());
  for (const auto& [k, val] : extra.items()) h[k] = val;
  auto f = open_out(path, std::ios::out | std::ios::binary);
  f << h.dump() << '\n';
  for (double x : v.values()) put_le(f, x);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

FieldDump read_field(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path.string() + ": missing header line");
  FieldDump out;
  try {
    out.header = Json::parse(line);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }
  if (out.header.value("format", "") != "lef-field") throw std::runtime_error(path.string() + ": not a field dump");
  const GridPtr grid = grid_from_json(out.header.at("grid"));
  const std::size_t n = out.header.at("count").get<std::size_t>();
  if (n != grid->size()) throw std::runtime_error(path.string() + ": value count does not match the grid");
  std::vector<unsigned char> raw(8 * n);
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(f.gcount()) != raw.size()) throw std::runtime_error(path.string() + ": truncated data");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = get_le(raw.data() + 8 * i);
  out.field = ScalarField(grid, std::move(values), out.header.value("time", 0.0));
  return out;
}

void write_json(const Json& j, const std::filesystem::path& path) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace lef::io
