#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fhadmm/config.hpp"
#include "fhadmm/errors.hpp"
#include "fhadmm/io.hpp"
#include "fhadmm/oracle.hpp"
#include "fhadmm/stepper.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fhadmm;

namespace {

enum ExitCode { Ok = 0, Failure = 1, BadConfig = 2, NoConvergence = 3, IoFailure = 4 };

struct Options {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<long long> seed;
  std::optional<int> order;
  std::vector<std::string> sets;
  bool quiet = false;
  bool csv = false;
};

std::vector<std::string> overrides(const Options& o) {
  std::vector<std::string> out = o.sets;
  if (o.output_dir) out.push_back("run.output_dir=" + *o.output_dir);
  if (o.seed) out.push_back("run.seed=" + std::to_string(*o.seed));
  if (o.order) out.push_back("scheme.order=" + std::to_string(*o.order));
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_json(const RunConfig& c, ConfigMode mode) {
  json j;
  j["grid"] = {{"dim", c.dim}, {"length", c.length}};
  if (mode == ConfigMode::Run) j["grid"]["n"] = c.n;
  j["potential"] = {{"form", to_string(c.form)}, {"theta0", c.theta0}, {"eps", c.eps}};
  j["scheme"] = {{"order", c.order}, {"a_stab", c.a_stab}};
  if (mode == ConfigMode::Run) j["scheme"]["tau"] = c.tau;
  j["admm"] = {{"alpha", c.alpha},
               {"rho_u", {{"coefficient", c.rho_u.coefficient}, {"tau_exponent", c.rho_u.exponent}}},
               {"rho_w", {{"coefficient", c.rho_w.coefficient}, {"tau_exponent", c.rho_w.exponent}}},
               {"gamma", c.gamma},
               {"max_iter", c.max_iter},
               {"stopping", c.rule == StoppingRule::TwoTerm ? "two_term" : "four_term"},
               {"warm_start_w", c.warm_start_w}};
  j["run"] = {{"t_final", c.t_final}, {"seed", c.seed}, {"output_dir", c.output_dir}};
  j["initial"] = {{"preset", c.initial.preset}};
  if (c.initial.preset == "random_uniform")
    j["initial"].update({{"offset", c.initial.offset}, {"low", c.initial.low}, {"high", c.initial.high}});
  if (c.initial.preset == "constant") j["initial"]["value"] = c.initial.value;
  if (mode == ConfigMode::Convergence)
    j["convergence"] = {{"ladder", c.ladder},
                        {"refinement", c.refinement == Refinement::Quadratic ? "quadratic" : "linear"},
                        {"tau_coeff", c.tau_coeff}};
  return j;
}

fs::path prepare_output(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory " + dir);
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed to write " + path.string());
}

std::string snapshot_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u_%06d", step);
  return buf;
}

int cmd_run(const Options& opt) {
  const RunConfig cfg = load_config(opt.config, ConfigMode::Run, overrides(opt));
  const fs::path out = prepare_output(cfg.output_dir);
  const Grid g = cfg.grid();
  const StepContext ctx = cfg.step_context();
  const Stepper stepper(g, ctx);
  const int steps = Stepper::step_count(cfg.t_final, cfg.tau);
  const ScalarField u0 = cfg.initial_field(g);

  std::ofstream diag(out / "diagnostics.csv");
  if (!diag) throw IoError("cannot open " + (out / "diagnostics.csv").string() + " for writing");
  write_diagnostics_header(diag);

  json snapshots = json::array();
  auto save_snapshot = [&](int step, double time, const ScalarField& u) {
    const std::string name = snapshot_name(step);
    write_field(out / (name + ".field"), u);
    if (opt.csv) write_field_csv(out / (name + ".csv"), u);
    snapshots.push_back({{"step", step}, {"time", time}, {"file", name + ".field"}});
  };
  save_snapshot(0, 0.0, u0);

  if (!opt.quiet)
    std::cout << "run: N=" << cfg.n << " dim=" << cfg.dim << " order=" << cfg.order << " tau=" << cfg.tau
              << " steps=" << steps << std::endl;

  json summary;
  summary["command"] = "run";
  summary["config"] = config_json(cfg, ConfigMode::Run);
  summary["steps_planned"] = steps;

  long long total_iterations = 0;
  int max_iterations = 0;
  int completed = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_abs_drift = 0.0;
  double max_energy_increase = -std::numeric_limits<double>::infinity();
  double last_energy = energy(u0, ctx.potential);
  const double initial_energy = last_energy;
  StepReport last{};
  const int every = std::max(1, steps / 10);
  const auto t0 = std::chrono::steady_clock::now();

  auto finish_summary = [&](const std::string& status) {
    summary["status"] = status;
    summary["steps_completed"] = completed;
    summary["total_admm_iterations"] = total_iterations;
    summary["max_admm_iterations"] = max_iterations;
    summary["initial_energy"] = initial_energy;
    summary["final_energy"] = completed ? json(last.energy) : json(nullptr);
    summary["max_energy_increase"] = number_or_null(max_energy_increase);
    summary["max_abs_mass_drift"] = max_abs_drift;
    summary["min_bound_margin"] = number_or_null(min_margin);
    summary["final_time"] = completed ? last.time : 0.0;
    summary["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary["snapshots"] = snapshots;
    write_json(out / "summary.json", summary);
  };

  try {
    stepper.run(u0, cfg.t_final, [&](const StepReport& r, const ScalarField& u) {
      write_diagnostics_row(diag, r);
      if (!diag) throw IoError("failed to write diagnostics.csv");
      ++completed;
      last = r;
      total_iterations += r.admm_iterations;
      max_iterations = std::max(max_iterations, r.admm_iterations);
      min_margin = std::min({min_margin, r.one_minus_max, r.one_plus_min, r.iterate_margin});
      max_abs_drift = std::max(max_abs_drift, std::abs(r.mass_drift));
      max_energy_increase = std::max(max_energy_increase, r.energy - last_energy);
      last_energy = r.energy;
      if (stepper.snapshot_due(r.step_index, steps)) save_snapshot(r.step_index, r.time, u);
      if (!opt.quiet && (r.step_index % every == 0 || r.step_index == steps))
        std::cout << "step " << r.step_index << "/" << steps << " t=" << r.time << " its=" << r.admm_iterations
                  << " energy=" << r.energy << std::endl;
    });
  } catch (const ConvergenceError&) {
    diag.flush();
    finish_summary("non_convergence");
    throw;
  } catch (const DomainError&) {
    diag.flush();
    finish_summary("non_convergence");
    throw;
  }
  diag.close();
  if (!diag) throw IoError("failed to write diagnostics.csv");
  finish_summary("ok");
  if (!opt.quiet) std::cout << "wrote " << completed << " steps to " << out.string() << std::endl;
  return Ok;
}

int cmd_convergence(const Options& opt) {
  const RunConfig cfg = load_config(opt.config, ConfigMode::Convergence, overrides(opt));
  const fs::path out = prepare_output(cfg.output_dir);
  ConvergenceConfig cc = cfg.convergence_config();
  if (!opt.quiet)
    cc.progress = [](int n, int done, int total) {
      if (done == total) std::cout << "N=" << n << " finished " << total << " steps" << std::endl;
    };
  const auto t0 = std::chrono::steady_clock::now();
  const ConvergenceResult res = convergence_study(cc);

  std::ofstream csv(out / "convergence.csv");
  if (!csv) throw IoError("cannot open " + (out / "convergence.csv").string() + " for writing");
  write_convergence_csv(csv, res.rows);
  csv.close();
  if (!csv) throw IoError("failed to write convergence.csv");

  const std::string table = render_convergence_table(res.rows);
  std::ofstream txt(out / "convergence_table.txt");
  if (!txt) throw IoError("cannot open " + (out / "convergence_table.txt").string() + " for writing");
  txt << table;
  txt.close();
  if (!txt) throw IoError("failed to write convergence_table.txt");

  json rows = json::array();
  for (const ConvergenceRow& r : res.rows)
    rows.push_back({{"n_coarse", r.n_coarse},
                    {"n_fine", r.n_fine},
                    {"h_coarse", r.h_coarse},
                    {"h_fine", r.h_fine},
                    {"delta_l2", r.delta_l2},
                    {"rate", number_or_null(r.rate)}});
  json summary;
  summary["command"] = "convergence";
  summary["status"] = "ok";
  summary["config"] = config_json(cfg, ConfigMode::Convergence);
  summary["rows"] = rows;
  summary["min_bound_margin"] = res.min_bound_margin;
  summary["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_json(out / "summary.json", summary);
  if (!opt.quiet) std::cout << table;
  return Ok;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("-c,--config", o.config, "Configuration file (key = value)")->required();
  cmd->add_option("-o,--output-dir", o.output_dir, "Output directory (overrides run.output_dir)");
  cmd->add_option("--seed", o.seed, "Random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--order", o.order, "Scheme order 1 or 2 (overrides scheme.order)");
  cmd->add_option("--set", o.sets, "Override any configuration key, key=value");
  cmd->add_flag("-q,--quiet", o.quiet, "Suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADMM solver for the logarithmic Cahn-Hilliard convex-splitting schemes"};
  app.require_subcommand(1);
  Options opt;
  CLI::App* run = app.add_subcommand("run", "Integrate one configuration in time");
  add_common(run, opt);
  run->add_flag("--csv", opt.csv, "Also export every snapshot as CSV");
  CLI::App* conv = app.add_subcommand("convergence", "Cauchy-difference convergence study over a mesh ladder");
  add_common(conv, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Ok : BadConfig;
  }

  try {
    if (run->parsed()) return cmd_run(opt);
    return cmd_convergence(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return BadConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return NoConvergence;
  } catch (const DomainError& e) {
    std::cerr << "solver left the admissible range: " << e.what() << '\n';
    return NoConvergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return IoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Failure;
  }
}
