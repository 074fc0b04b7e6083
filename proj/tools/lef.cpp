// lef: command-line front end. Exit codes: 0 all checks pass, 1 a check
// failed, 2 usage or runtime error.
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lef/energy.hpp"
#include "lef/io.hpp"
#include "lef/pipeline.hpp"
#include "lef/radial.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

// "cyclic:4", "dihedral:4" or "dihedral:4:0.3926990817"
lef::SymmetryGroup parse_group(const std::string& s) {
  std::stringstream ss(s);
  std::string kind, order, axis;
  std::getline(ss, kind, ':');
  std::getline(ss, order, ':');
  std::getline(ss, axis, ':');
  if (order.empty()) throw std::invalid_argument("group must look like cyclic:4 or dihedral:4[:axis]");
  if (kind == "cyclic") return lef::SymmetryGroup::cyclic(std::stoi(order));
  if (kind == "dihedral") return lef::SymmetryGroup::dihedral(std::stoi(order), axis.empty() ? 0.0 : std::stod(axis));
  throw std::invalid_argument("unknown group kind '" + kind + "'");
}

lef::RunConfig config_with_overrides(const std::string& path, const std::string& out, const std::string& command) {
  lef::RunConfig c = lef::load_config(path);
  c.command = command;
  if (!out.empty()) c.output_dir = out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign-changing Lane-Emden solutions from the semilinear heat flow"};
  app.require_subcommand(1);

  auto* constants = app.add_subcommand("constants", "Constants of the energy estimate (CSV)");
  std::string constants_out;
  constants->add_option("--out", constants_out, "Write the CSV here instead of stdout");

  auto* radial = app.add_subcommand("radial", "Radial energy sweep over p (CSV)");
  std::string p_arg = "20,50,100,200", alpha_arg = "optimal", radial_out, profiles_dir;
  radial->add_option("--p", p_arg, "Comma-separated exponents");
  radial->add_option("--alpha", alpha_arg, "Concentration parameter or 'optimal'");
  radial->add_option("--out", radial_out, "Write the CSV here instead of stdout");
  radial->add_option("--profiles", profiles_dir, "Also write (r, u) profile CSVs into this directory");

  auto* flow = app.add_subcommand("flow", "Evolve or bisect one initial datum");
  std::string flow_config, flow_out;
  flow->add_option("--config", flow_config, "JSON run configuration")->required();
  flow->add_option("--out", flow_out, "Output directory (overrides the config)");

  auto* pipeline = app.add_subcommand("pipeline", "Threshold construction with nodal and spectral audit");
  std::string pipe_config, pipe_out;
  pipeline->add_option("--config", pipe_config, "JSON run configuration")->required();
  pipeline->add_option("--out", pipe_out, "Output directory (overrides the config)");

  auto* spectrum = app.add_subcommand("spectrum", "Morse index and nodal audit of a field dump");
  std::string field_path, group_arg, spectrum_out;
  double p_override = 0.0;
  spectrum->add_option("--field", field_path, "Field dump")->required();
  spectrum->add_option("--p", p_override, "Exponent (default: from the dump header)");
  spectrum->add_option("--group", group_arg, "cyclic:h or dihedral:h[:axis]");
  spectrum->add_option("--out", spectrum_out, "Write the JSON report here as well");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*constants) {
      const lef::ConstantsReport r = lef::run_constants();
      const auto table = r.table();
      if (constants_out.empty()) std::cout << table.str();
      else table.write(constants_out);
      return r.ok() ? 0 : 1;
    }
    if (*radial) {
      const auto ps = parse_list(p_arg);
      std::optional<double> alpha;
      if (alpha_arg != "optimal") alpha = std::stod(alpha_arg);
      const auto table = lef::run_radial_sweep(ps, alpha);
      if (radial_out.empty()) std::cout << table.str();
      else table.write(radial_out);
      if (!profiles_dir.empty()) {
        const double a = alpha ? *alpha : lef::minimize_f().alpha_bar;
        for (double p : ps) {
          auto write_profile = [&](const lef::RadialProfile& prof, const std::string& name) {
            lef::io::CsvTable t({"r", "u"});
            for (std::size_t i = 0; i < prof.size(); ++i)
              t.add_row({lef::io::format_double(prof.r[i]), lef::io::format_double(prof.u[i])});
            t.write(std::filesystem::path(profiles_dir) / (name + "_p" + lef::io::format_double(p) + ".csv"));
          };
          write_profile(lef::solve_ball(p, 1.0), "ball");
          write_profile(lef::solve_annulus(p, std::exp(-a * p), 1.0), "annulus");
        }
      }
      for (const auto& row : table.rows())
        if (row.back() != "ok") return 1;
      return 0;
    }
    if (*flow) {
      const auto c = config_with_overrides(flow_config, flow_out, "flow");
      const auto rep = lef::run_flow(c);
      std::cout << rep.summary.dump(2) << '\n';
      return rep.ok ? 0 : 1;
    }
    if (*pipeline) {
      const auto c = config_with_overrides(pipe_config, pipe_out, "pipeline");
      const auto rep = lef::run_pipeline(c);
      for (const auto& ch : rep.checks)
        std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << (ch.detail.empty() ? "" : " (" + ch.detail + ")") << '\n';
      for (const auto& e : rep.errors) std::cout << "ERROR " << e << '\n';
      std::cout << "report: " << (std::filesystem::path(c.output_dir) / "report.json").string() << '\n';
      return rep.passed() ? 0 : 1;
    }
    if (*spectrum) {
      std::optional<double> p;
      if (p_override > 0.0) p = p_override;
      std::optional<lef::SymmetryGroup> group;
      if (!group_arg.empty()) group = parse_group(group_arg);
      const auto j = lef::run_spectrum(field_path, p, group);
      std::cout << j.dump(2) << '\n';
      if (!spectrum_out.empty()) lef::io::write_json(j, spectrum_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "lef: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
