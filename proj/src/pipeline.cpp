#include "lef/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "lef/energy.hpp"
#include "lef/errors.hpp"
#include "lef/nodal.hpp"
#include "lef/radial.hpp"

namespace lef {

using io::format_double;
using io::Json;

DomainSpec RunConfig::make_domain() const { return io::domain_from_json(domain); }
SymmetryGroup RunConfig::make_group() const { return io::group_from_json(group); }

GridPtr RunConfig::make_grid() const {
  const DomainSpec d = make_domain();
  if (grid_kind == "polar") return Grid::polar(d, n_r, n_theta);
  if (grid_kind == "cartesian") return Grid::cartesian(d, n_cells);
  throw std::invalid_argument("unknown grid kind '" + grid_kind + "'");
}

FlowConfig RunConfig::flow_config() const {
  FlowConfig f;
  f.dt_max = dt_max;
  f.c_stab = c_stab;
  f.t_max = t_max;
  f.decay_factor = decay_factor;
  f.blowup_factor = blowup_factor;
  f.steady_tol = steady_tol;
  f.project_every = project_every;
  if (project_every > 0) f.group = make_group();
  return f;
}

RayScanConfig RunConfig::scan_config() const {
  RayScanConfig s;
  s.threshold.flow = flow_config();
  s.threshold.rel_width = rel_width;
  s.threshold.polish = polish;
  s.scan_rel_width = scan_rel_width;
  s.refine_steps = refine_steps;
  return s;
}

std::vector<double> RunConfig::ray_angles() const {
  std::vector<double> out;
  if (ratios == 1) return {theta_min};
  for (int i = 0; i < ratios; ++i) out.push_back(theta_min + (theta_max - theta_min) * i / (ratios - 1));
  return out;
}

namespace {

template <class T>
void take(const Json& j, const char* key, T& dst, std::set<std::string>& seen) {
  if (j.contains(key)) {
    dst = j.at(key).get<T>();
    seen.insert(key);
  }
}

void validate(const RunConfig& c) {
  static const std::set<std::string> commands{"radial-sweep", "constants", "flow", "pipeline", "spectrum"};
  if (!commands.count(c.command)) throw std::invalid_argument("unknown command '" + c.command + "'");
  if (c.p_list.empty()) throw std::invalid_argument("p list is empty");
  for (double p : c.p_list)
    if (!(p > 1.0)) throw std::invalid_argument("every p must exceed 1");
  if (c.alpha && !(*c.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (c.n_r < 2 || c.n_theta < 4 || c.n_cells < 2) throw std::invalid_argument("grid resolution too small");
  for (double x : {c.dt_max, c.c_stab, c.t_max, c.decay_factor, c.blowup_factor, c.steady_tol, c.rel_width, c.scan_rel_width})
    if (!(x > 0.0)) throw std::invalid_argument("flow and threshold parameters must be positive");
  if (!(c.decay_factor < c.blowup_factor)) throw std::invalid_argument("decay threshold must be below blow-up threshold");
  if (c.ratios < 1) throw std::invalid_argument("ratios must be >= 1");
  if (c.max_restarts < 0) throw std::invalid_argument("max_restarts must be >= 0");
}

void check_section(const Json& sec, const std::string& name, std::initializer_list<const char*> keys) {
  if (!sec.is_object()) throw std::invalid_argument("config section '" + name + "' must be an object");
  for (const auto& [key, val] : sec.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      throw std::invalid_argument("unknown config key '" + name + "." + key + "'");
}
}  // namespace

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  RunConfig c;
  std::set<std::string> seen;
  take(j, "command", c.command, seen);
  if (j.contains("p")) {
    seen.insert("p");
    if (j["p"].is_array()) c.p_list = j["p"].get<std::vector<double>>();
    else c.p_list = {j["p"].get<double>()};
  }
  if (j.contains("alpha")) {
    seen.insert("alpha");
    if (j["alpha"].is_string()) {
      if (j["alpha"].get<std::string>() != "optimal") throw std::invalid_argument("alpha must be a number or \"optimal\"");
      c.alpha.reset();
    } else {
      c.alpha = j["alpha"].get<double>();
    }
  }
  if (j.contains("domain")) {
    seen.insert("domain");
    c.domain = j["domain"];
  }
  if (j.contains("group")) {
    seen.insert("group");
    c.group = j["group"];
  }
  if (j.contains("grid")) {
    seen.insert("grid");
    const Json& g = j["grid"];
    check_section(g, "grid", {"kind", "n_r", "n_theta", "n_cells"});
    c.grid_kind = g.value("kind", c.grid_kind);
    c.n_r = g.value("n_r", c.n_r);
    c.n_theta = g.value("n_theta", c.n_theta);
    c.n_cells = g.value("n_cells", c.n_cells);
  }
  if (j.contains("flow")) {
    seen.insert("flow");
    const Json& f = j["flow"];
    check_section(f, "flow", {"dt_max", "c_stab", "t_max", "decay_factor", "blowup_factor", "steady_tol",
                              "project_every", "initial", "amplitude", "initial_field", "threshold"});
    c.dt_max = f.value("dt_max", c.dt_max);
    c.c_stab = f.value("c_stab", c.c_stab);
    c.t_max = f.value("t_max", c.t_max);
    c.decay_factor = f.value("decay_factor", c.decay_factor);
    c.blowup_factor = f.value("blowup_factor", c.blowup_factor);
    c.steady_tol = f.value("steady_tol", c.steady_tol);
    c.project_every = f.value("project_every", c.project_every);
    c.initial = f.value("initial", c.initial);
    c.amplitude = f.value("amplitude", c.amplitude);
    c.initial_field = f.value("initial_field", c.initial_field);
    c.threshold = f.value("threshold", c.threshold);
  }
  if (j.contains("threshold")) {
    seen.insert("threshold");
    const Json& t = j["threshold"];
    check_section(t, "threshold", {"rel_width", "scan_rel_width", "ratios", "theta_min", "theta_max",
                                   "refine_steps", "polish", "max_restarts"});
    c.rel_width = t.value("rel_width", c.rel_width);
    c.scan_rel_width = t.value("scan_rel_width", c.scan_rel_width);
    c.ratios = t.value("ratios", c.ratios);
    c.theta_min = t.value("theta_min", c.theta_min);
    c.theta_max = t.value("theta_max", c.theta_max);
    c.refine_steps = t.value("refine_steps", c.refine_steps);
    c.polish = t.value("polish", c.polish);
    c.max_restarts = t.value("max_restarts", c.max_restarts);
  }
  take(j, "morse", c.morse, seen);
  take(j, "output_dir", c.output_dir, seen);
  take(j, "seed", c.seed, seen);
  for (const auto& [key, val] : j.items())
    if (!seen.count(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  validate(c);
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["p"] = c.p_list;
  j["alpha"] = c.alpha ? Json(*c.alpha) : Json("optimal");
  j["domain"] = c.domain;
  j["group"] = c.group;
  j["grid"] = {{"kind", c.grid_kind}, {"n_r", c.n_r}, {"n_theta", c.n_theta}, {"n_cells", c.n_cells}};
  j["flow"] = {{"dt_max", c.dt_max}, {"c_stab", c.c_stab}, {"t_max", c.t_max}, {"decay_factor", c.decay_factor},
               {"blowup_factor", c.blowup_factor}, {"steady_tol", c.steady_tol}, {"project_every", c.project_every},
               {"initial", c.initial}, {"amplitude", c.amplitude}, {"initial_field", c.initial_field},
               {"threshold", c.threshold}};
  j["threshold"] = {{"rel_width", c.rel_width}, {"scan_rel_width", c.scan_rel_width}, {"ratios", c.ratios},
                    {"theta_min", c.theta_min}, {"theta_max", c.theta_max}, {"refine_steps", c.refine_steps},
                    {"polish", c.polish}, {"max_restarts", c.max_restarts}};
  j["morse"] = c.morse;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  return j;
}

RunConfig load_config(const std::filesystem::path& path) { return config_from_json(io::read_json(path)); }

ConstantsReport run_constants() {
  ConstantsReport r;
  r.four_pi_e = kFourPiE;
  r.bound = kBoundFactor * kFourPiE;
  const AlphaOptimum opt = minimize_f();
  r.alpha_bar = opt.alpha_bar;
  r.f_alpha_bar = opt.f_value;
  r.f_prime_alpha_bar = opt.derivative;
  r.f_fifth = f_alpha(0.2);
  return r;
}

io::CsvTable ConstantsReport::table() const {
  io::CsvTable t({"name", "value", "provenance"});
  t.add_row({"four_pi_e", format_double(four_pi_e), "exact"});
  t.add_row({"bound_4.97_four_pi_e", format_double(bound), "literature"});
  t.add_row({"alpha_bar", format_double(alpha_bar), "computed"});
  t.add_row({"f_alpha_bar", format_double(f_alpha_bar), "computed"});
  t.add_row({"f_prime_alpha_bar", format_double(f_prime_alpha_bar), "computed"});
  t.add_row({"f_one_fifth", format_double(f_fifth), "literature"});
  return t;
}

io::CsvTable run_radial_sweep(const std::vector<double>& p_list, std::optional<double> alpha_opt) {
  if (p_list.empty()) throw std::invalid_argument("radial sweep needs at least one p");
  const double alpha = alpha_opt ? *alpha_opt : minimize_f().alpha_bar;
  io::CsvTable t({"p", "alpha", "pE_annulus", "pE_ball", "sum", "bound", "annulus_bound", "ball_limit", "limit",
                  "p_grad_ball_unit", "delta_ball_unit", "delta_sum", "provenance", "status"});
  const double annulus_bound = kFourPiE * std::exp(2.0 * alpha - 1.0) / alpha;
  const double ball_limit = kFourPiE * std::exp(4.0 * alpha);
  std::vector<io::CsvTable> rows(p_list.size(), io::CsvTable(t.header()));
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    const double p = p_list[i];
    try {
      const UpperBoundReport ub = upper_bound_report(p, alpha);
      const EnergyReport w = radial_energy(solve_ball(p, 1.0), p);
      const double pg = p * w.grad_norm_sq;
      rows[i].add_row({format_double(p), format_double(alpha), format_double(ub.annulus_scaled_energy),
                       format_double(ub.ball_scaled_energy), format_double(ub.sum), format_double(ub.target),
                       format_double(annulus_bound), format_double(ball_limit), format_double(ub.limit),
                       format_double(pg), format_double(std::abs(pg - kEightPiE) / kEightPiE),
                       format_double(std::abs(ub.sum - ub.limit) / ub.limit), "computed", "ok"});
    } catch (const std::exception& e) {
      std::vector<std::string> cells(t.header().size(), "");
      cells[0] = format_double(p);
      cells[1] = format_double(alpha);
      cells[12] = "computed";
      cells[13] = std::string("error: ") + e.what();
      rows[i].add_row(cells);
    }
  }
  for (const auto& r : rows) t.add_row(r.rows().front());
  return t;
}

namespace {

double inscribed_radius(const DomainSpec& d) {
  if (d.shape() != ShapeKind::mask) return d.outer_radius();
  double r = d.extent();
  for (int k = 0; k < 720; ++k) r = std::min(r, norm(d.boundary_point(2.0 * std::numbers::pi * k / 720)));
  return r;
}

ScalarField initial_datum(const RunConfig& c, const GridPtr& grid, double p) {
  if (c.initial == "file") {
    auto dump = io::read_field(c.initial_field);
    if (dump.field.grid_ref().size() != grid->size()) throw std::invalid_argument("initial field grid does not match the configured grid");
    return c.amplitude * ScalarField(grid, dump.field.values());
  }
  if (c.initial == "bump") {
    const double R = inscribed_radius(grid->domain());
    return c.amplitude * sample_field(grid, [R](Point x) {
             const double s = norm(x) / R;
             return s < 1.0 ? 1.0 - s * s : 0.0;
           });
  }
  if (c.initial == "eigenmode") {
    const auto ep = lowest_eigenpairs(assemble_linearized(ScalarField(grid), 2.0), 1);
    ScalarField v(grid, ep.vectors.front());
    if (std::accumulate(v.values().begin(), v.values().end(), 0.0) < 0.0) v *= -1.0;
    return (c.amplitude / v.sup_norm()) * v;
  }
  if (c.initial == "ground") {
    return c.amplitude * to_field(solve_ball(p, inscribed_radius(grid->domain())), grid);
  }
  throw std::invalid_argument("unknown initial datum '" + c.initial + "'");
}

}  // namespace

FlowRunReport run_flow(const RunConfig& c) {
  const double p = c.p();
  const GridPtr grid = c.make_grid();
  const ScalarField v0 = initial_datum(c, grid, p);
  const std::filesystem::path out = c.output_dir;
  FlowRunReport rep;
  rep.summary["config"] = config_to_json(c);
  rep.summary["pE_v0"] = field_energy(v0, p).scaled_energy;
  if (c.threshold) {
    ThresholdConfig tc = c.scan_config().threshold;
    const ThresholdResult r = threshold_bisect(v0, p, tc);
    rep.summary["threshold"] = io::threshold_summary(r);
    rep.ok = r.ok;
    if (r.omega_candidate.size()) {
      io::write_field(r.omega_candidate, out / "omega.bin", {{"p", p}});
      rep.summary["pE_omega"] = field_energy(r.omega_candidate, p).scaled_energy;
      rep.summary["nodal"] = io::nodal_to_json(decompose(r.omega_candidate));
    }
    io::write_field(r.v0, out / "v0.bin", {{"p", p}});
  } else {
    FlowConfig fc = c.flow_config();
    fc.record_nodal_count = true;
    fc.record_every = 10;
    const Trajectory tr = evolve(v0, p, fc);
    io::trajectory_table(tr).write(out / "trajectory.csv");
    io::write_field(tr.final_field, out / "final.bin", {{"p", p}, {"outcome", to_string(tr.outcome)}});
    rep.summary["trajectory"] = io::trajectory_summary(tr);
    rep.ok = tr.energy_violations == 0;
  }
  io::write_json(rep.summary, out / "flow.json");
  return rep;
}

bool PipelineReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Json PipelineReport::to_json() const {
  Json j;
  j["config"] = config;
  j["p"] = p;
  j["alpha"] = alpha;
  j["domain"] = domain;
  j["group"] = group;
  j["grid"] = grid;
  j["admissible"] = admissible;
  Json st = Json::array();
  for (const auto& s : stages)
    st.push_back({{"label", s.label}, {"theta", s.theta}, {"t1", s.t1}, {"t2", s.t2}, {"lambda_star", s.lambda_star},
                  {"pE_v0", s.pE_v0}, {"pE_candidate", s.pE_candidate}, {"residual", s.residual},
                  {"domains", s.domains}, {"sign_changing", s.sign_changing}, {"field_file", s.field_file}});
  j["stages"] = st;
  if (!stages.empty()) {
    j["chosen"] = {{"t1", stages.front().t1}, {"t2", stages.front().t2}, {"lambda_star", stages.front().lambda_star},
                   {"theta", stages.front().theta}};
  }
  j["energy_ledger"] = {{"pE_v0", pE_v0}, {"pE_candidate", pE_candidate}, {"per_domain_pE", per_domain_pE},
                        {"cap", kBoundFactor * kFourPiE * 1.10}};
  j["residual"] = residual;
  j["symmetry_defect"] = symmetry_defect;
  j["nodal"] = nodal;
  j["morse"] = morse;
  j["restart_count"] = restart_count;
  Json ch = Json::array();
  for (const auto& c : checks) ch.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  j["checks"] = ch;
  j["passed"] = passed();
  j["errors"] = errors;
  j["scan"] = scan;
  return j;
}

namespace {

Json scan_to_json(const RayScanResult& s) {
  std::vector<const RayOutcome*> rays;
  for (const auto& r : s.rays) rays.push_back(&r);
  std::stable_sort(rays.begin(), rays.end(), [](auto* a, auto* b) { return a->theta < b->theta; });
  Json out = Json::array();
  for (const auto* r : rays)
    out.push_back({{"theta", r->theta}, {"refined", r->refined}, {"ok", r->result.ok},
                   {"lambda_star", r->result.lambda_star}, {"bisection_width", r->result.bisection_width},
                   {"blowup_sign", r->result.blowup_sign}, {"sign_changing", r->sign_changing},
                   {"omega_residual", r->result.omega_residual}, {"probes", r->result.probes.size()},
                   {"diagnostics", r->result.diagnostics}});
  return out;
}

std::string describe(double x) { return format_double(x); }

}  // namespace

PipelineReport run_pipeline(const RunConfig& c, bool write) {
  PipelineReport rep;
  const double p = c.p();
  const DomainSpec domain = c.make_domain();
  const SymmetryGroup group = c.make_group();
  rep.p = p;
  rep.domain = domain.name();
  rep.group = group.name();
  require_admissible(group, domain);
  rep.admissible = true;

  const GridPtr grid = c.make_grid();
  rep.grid = io::grid_to_json(*grid);
  rep.config = config_to_json(c);
  if (!grid->conforms_to(group)) throw std::invalid_argument("grid does not conform to " + group.name());
  rep.alpha = c.alpha ? *c.alpha : minimize_f().alpha_bar;
  const std::filesystem::path out = c.output_dir;

  // Radial building blocks on the inscribed disk.
  const double R = inscribed_radius(domain);
  const double a = R * std::exp(-rep.alpha * p);
  ScalarField u1, u2;
  try {
    u1 = to_field(solve_annulus(p, a, R), grid);
    u2 = to_field(solve_ball(p, a), grid, -1.0);
  } catch (const std::exception& e) {
    rep.errors.push_back(std::string("building blocks: ") + e.what());
    rep.checks.push_back({"building blocks", false, e.what()});
    return rep;
  }
  if (u1.is_zero() || u2.is_zero()) {
    rep.errors.push_back("building blocks are not resolved by the grid (inner radius " + describe(a) + ")");
    rep.checks.push_back({"building blocks", false, "unresolved"});
    return rep;
  }

  std::vector<double> angles = c.ray_angles();
  if (c.seed != 0) std::shuffle(angles.begin(), angles.end(), std::mt19937_64(c.seed));
  const RayScanConfig scfg = c.scan_config();
  const SymmetryProjector projector(*grid, group);

  RayScanResult scan = ray_scan(u1, u2, p, angles, scfg);
  rep.scan = scan_to_json(scan);

  auto record_stage = [&](const std::string& label, const RayScanResult& s) -> const ThresholdResult* {
    const RayOutcome* best = s.best ? &s.rays[*s.best] : nullptr;
    if (!best) {
      rep.errors.push_back(label + ": no sign-changing threshold candidate along " + std::to_string(s.rays.size()) + " rays");
      return nullptr;
    }
    const ThresholdResult& r = best->result;
    PipelineStage st;
    st.label = label;
    st.theta = best->theta;
    st.lambda_star = r.lambda_star;
    st.t1 = r.lambda_star * std::cos(best->theta);
    st.t2 = r.lambda_star * std::sin(best->theta);
    st.pE_v0 = field_energy(r.v0, p).scaled_energy;
    st.pE_candidate = field_energy(r.omega_candidate, p).scaled_energy;
    st.residual = elliptic_residual(r.omega_candidate, p);
    st.domains = decompose(r.omega_candidate).count();
    st.sign_changing = r.sign_changing();
    if (write) {
      st.field_file = label + "-candidate.bin";
      io::write_field(r.omega_candidate, out / st.field_file, {{"p", p}, {"group", io::group_to_json(group)}});
      io::write_field(r.v0, out / (label + "-v0.bin"), {{"p", p}});
    }
    rep.stages.push_back(st);
    return &r;
  };

  const ThresholdResult* best = record_stage("initial", scan);
  if (best) {
    rep.v0 = best->v0;
    rep.candidate = best->omega_candidate;
    rep.pE_v0 = rep.stages.back().pE_v0;
  }

  // Restarts while the candidate has more than two nodal domains.
  std::vector<RestartResult> restarts;
  while (rep.candidate && rep.restart_count < c.max_restarts) {
    const NodalDecomposition d = decompose(*rep.candidate);
    if (d.count() <= 2) break;
    try {
      restarts.push_back(restart_from_nodal_pair(*rep.candidate, d, p, angles, scfg));
    } catch (const std::exception& e) {
      rep.errors.push_back(std::string("restart: ") + e.what());
      break;
    }
    ++rep.restart_count;
    const auto& rr = restarts.back();
    const ThresholdResult* next = record_stage("restart-" + std::to_string(rep.restart_count), rr.scan);
    if (!next) break;
    rep.candidate = next->omega_candidate;
  }

  if (rep.candidate) {
    const ScalarField& u = *rep.candidate;
    const EnergyReport e = field_energy(u, p);
    rep.pE_candidate = e.scaled_energy;
    rep.residual = elliptic_residual(u, p);
    rep.symmetry_defect = symmetry_defect(u, group) / u.sup_norm();
    const NodalDecomposition d = decompose(u);
    rep.nodal = io::nodal_to_json(d, &group);
    for (const auto& r : per_domain_energy(u, d, p)) rep.per_domain_pE.push_back(r.scaled_energy);
    if (c.morse) {
      try {
        rep.spectrum = morse_index(u, p, &group);
        rep.morse = io::spectrum_to_json(*rep.spectrum);
      } catch (const std::exception& ex) {
        rep.errors.push_back(std::string("morse: ") + ex.what());
      }
    }

    const double cap = kBoundFactor * kFourPiE * 1.10;
    rep.checks.push_back({"sign-changing candidate", d.positive_count() > 0 && d.negative_count() > 0,
                          std::to_string(d.positive_count()) + " positive, " + std::to_string(d.negative_count()) + " negative domains"});
    rep.checks.push_back({"elliptic residual < 1e-6", rep.residual < 1e-6, describe(rep.residual)});
    rep.checks.push_back({"symmetry defect < 1e-8", rep.symmetry_defect < 1e-8, describe(rep.symmetry_defect)});
    rep.checks.push_back({"nodal line off the boundary", !d.nodal_line_touches_boundary(), ""});
    if (domain.contains_origin()) {
      const auto o = contains_origin(d);
      rep.checks.push_back({"origin inside one domain", o.has_value(), o ? "domain " + std::to_string(*o) : "origin in the zero band"});
    }
    rep.checks.push_back({"pE(candidate) <= pE(v0)", rep.pE_candidate <= rep.pE_v0 * (1.0 + 1e-10),
                          describe(rep.pE_candidate) + " vs " + describe(rep.pE_v0)});
    rep.checks.push_back({"pE(v0) <= 4.97*4pi*e*1.10", rep.pE_v0 <= cap, describe(rep.pE_v0) + " vs " + describe(cap)});
    rep.checks.push_back({"two nodal domains", d.count() == 2, std::to_string(d.count()) + " domains"});
    bool ledger = true;
    for (std::size_t k = 1; k < rep.stages.size(); ++k) {
      const double drop = rep.stages[k - 1].pE_candidate - rep.stages[k].pE_candidate;
      const int removed = rep.stages[k - 1].domains - rep.stages[k].domains;
      if (drop < 0.0 || (removed > 0 && drop < 0.85 * kFourPiE * removed)) ledger = false;
    }
    if (rep.stages.size() > 1) rep.checks.push_back({"restart ledger drop >= 0.85*4pi*e per domain", ledger, ""});
    rep.checks.push_back({"restart count <= 2", rep.restart_count <= 2, std::to_string(rep.restart_count)});
  } else {
    rep.checks.push_back({"sign-changing candidate", false, "none found"});
  }

  if (write) {
    io::write_field(u1, out / "u1.bin", {{"p", p}});
    io::write_field(u2, out / "u2.bin", {{"p", p}});
    io::write_json(rep.to_json(), out / "report.json");
  }
  return rep;
}

Json run_spectrum(const std::filesystem::path& path, std::optional<double> p_opt, std::optional<SymmetryGroup> group) {
  const io::FieldDump dump = io::read_field(path);
  double p = 0.0;
  if (p_opt) p = *p_opt;
  else if (dump.header.contains("p")) p = dump.header["p"].get<double>();
  else throw std::invalid_argument("exponent p missing: not in the dump header and not given");
  if (!group && dump.header.contains("group")) group = io::group_from_json(dump.header["group"]);
  Json j;
  j["field"] = path.string();
  j["p"] = p;
  const ScalarField& u = dump.field;
  j["energy"] = io::energy_to_json(field_energy(u, p));
  const NodalDecomposition d = decompose(u);
  j["nodal"] = io::nodal_to_json(d, group ? &*group : nullptr);
  const SpectrumReport s = morse_index(u, p, group ? &*group : nullptr);
  j["spectrum"] = io::spectrum_to_json(s);
  if (group) j["group"] = io::group_to_json(*group);
  return j;
}

}  // namespace lef
