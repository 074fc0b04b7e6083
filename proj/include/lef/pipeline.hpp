#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lef/flow.hpp"
#include "lef/io.hpp"
#include "lef/spectrum.hpp"

namespace lef {

/// Experiment configuration, read from a JSON file. Every key is optional;
/// unknown keys are rejected.
struct RunConfig {
  std::string command = "pipeline";  ///< radial-sweep | constants | flow | pipeline | spectrum
  std::vector<double> p_list{8.0};
  std::optional<double> alpha;       ///< empty: minimizer of f

  io::Json domain = {{"shape", "disk"}, {"radius", 1.0}};
  io::Json group = {{"kind", "cyclic"}, {"order", 4}, {"axis", 0.0}};
  std::string grid_kind = "polar";
  int n_r = 256;
  int n_theta = 16;
  int n_cells = 128;

  // flow
  double dt_max = 1e-3;
  double c_stab = 0.1;
  double t_max = 50.0;
  double decay_factor = 1e-6;
  double blowup_factor = 1e4;
  double steady_tol = 1e-6;
  int project_every = 10;
  std::string initial = "bump";  ///< flow command datum: bump | eigenmode | ground | file
  double amplitude = 1.0;
  std::string initial_field;     ///< dump path when initial == "file"
  bool threshold = false;        ///< flow command: bisect along the datum instead of evolving it

  // threshold search
  double rel_width = 1e-3;
  double scan_rel_width = 1e-3;
  int ratios = 16;
  double theta_min = 0.0;
  double theta_max = 1.5707963267948966;
  int refine_steps = 40;
  bool polish = true;
  int max_restarts = 2;
  bool morse = true;

  std::string output_dir = "lef-out";
  std::uint64_t seed = 0;  ///< shuffles the order in which rays are scheduled

  double p() const { return p_list.front(); }
  DomainSpec make_domain() const;
  SymmetryGroup make_group() const;
  GridPtr make_grid() const;
  FlowConfig flow_config() const;
  RayScanConfig scan_config() const;
  std::vector<double> ray_angles() const;
};

RunConfig config_from_json(const io::Json& j);
io::Json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ConstantsReport {
  double four_pi_e = 0.0;
  double bound = 0.0;  ///< 4.97 * 4 pi e
  double alpha_bar = 0.0;
  double f_alpha_bar = 0.0;
  double f_prime_alpha_bar = 0.0;
  double f_fifth = 0.0;
  bool ok() const { return f_alpha_bar <= f_fifth && f_fifth <= kBoundFactor; }
  io::CsvTable table() const;
};

ConstantsReport run_constants();

/// One row per p: pE of the annulus and ball building blocks, their sum,
/// the large-p bounds and convergence columns. Solver failures are recorded
/// in the status column.
io::CsvTable run_radial_sweep(const std::vector<double>& p_list, std::optional<double> alpha);

struct FlowRunReport {
  io::Json summary;
  bool ok = false;
};

/// Evolves (or bisects along) the configured initial datum; writes the
/// trajectory CSV, the final field and a JSON summary to the output directory.
FlowRunReport run_flow(const RunConfig& c);

struct PipelineStage {
  std::string label;       ///< "initial" or "restart-k"
  double theta = 0.0;
  double t1 = 0.0, t2 = 0.0, lambda_star = 0.0;
  double pE_v0 = 0.0;
  double pE_candidate = 0.0;
  double residual = -1.0;
  int domains = 0;
  bool sign_changing = false;
  std::string field_file;
};

struct PipelineReport {
  double p = 0.0;
  double alpha = 0.0;
  std::string domain, group;
  io::Json grid = io::Json::object();
  io::Json config = io::Json::object();
  bool admissible = false;
  std::vector<PipelineStage> stages;
  std::optional<ScalarField> candidate;
  std::optional<ScalarField> v0;
  double pE_v0 = 0.0;
  double pE_candidate = 0.0;
  double residual = -1.0;
  double symmetry_defect = -1.0;
  std::vector<double> per_domain_pE;
  io::Json nodal = io::Json::object();
  io::Json morse = io::Json::object();
  std::optional<SpectrumReport> spectrum;
  int restart_count = 0;
  std::vector<std::string> errors;
  std::vector<CheckResult> checks;
  io::Json scan = io::Json::array();

  bool passed() const;
  io::Json to_json() const;
};

/// The construction end to end: radial building blocks on the grid, ray scan
/// and threshold bisection, nodal and spectral audit, nodal restarts. Stage
/// failures are recorded in `errors`; admissibility failure throws before any
/// computation. Writes report.json and field dumps when `write` is set.
PipelineReport run_pipeline(const RunConfig& c, bool write = true);

/// Spectrum audit of a dumped field; p comes from the dump header unless given.
io::Json run_spectrum(const std::filesystem::path& field, std::optional<double> p,
                      std::optional<SymmetryGroup> group);

}  // namespace lef
