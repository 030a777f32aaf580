#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fhadmm/admm.hpp"
#include "fhadmm/grid.hpp"
#include "fhadmm/potential.hpp"
#include "fhadmm/spectral.hpp"

namespace fhadmm {

struct StepContext {
  PotentialParams potential;
  SchemeParams scheme;
  AdmmParams admm;
  /// Seed w2 of each solve with the previous step's chemical potential
  /// instead of zero.
  bool warm_start_w = false;
  /// Snapshot every `snapshot_stride` steps; 0 selects `snapshot_count`
  /// evenly spaced snapshots.
  int snapshot_stride = 0;
  int snapshot_count = 10;
};

struct StepReport {
  int step_index = 0;
  double time = 0.0;
  int admm_iterations = 0;
  double criterion = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  /// M(u^{n+1}) - M(u^0)
  double mass_drift = 0.0;
  double one_minus_max = 0.0;
  double one_plus_min = 0.0;
  /// Smallest bound margin seen over all ADMM iterates of this step.
  double iterate_margin = 0.0;
};

struct StepOutcome {
  ScalarField u_next;
  /// w2 at termination, the discrete chemical potential.
  ScalarField w_next;
  StepReport report;
  AdmmReport admm;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::pair<double, ScalarField>> snapshots;
  std::vector<StepReport> reports;
};

using StepObserver = std::function<void(const StepReport&, const ScalarField&)>;

/// Time integrator bound to one grid; owns the spectral symbol shared by all solves.
class Stepper {
public:
  Stepper(const Grid& g, StepContext ctx);

  const StepContext& context() const noexcept { return ctx_; }
  const LaplacianSymbol& symbol() const noexcept { return symbol_; }

  /// `mass0` is the reference for mass_drift (defaults to M(u_n)).
  StepOutcome step_first(const ScalarField& u_n, std::optional<double> mass0 = std::nullopt,
                         const ScalarField* w_guess = nullptr,
                         std::function<void(const IterationInfo&)> on_iteration = {}) const;
  StepOutcome step_second(const ScalarField& u_n, const ScalarField& u_nm1, std::optional<double> mass0 = std::nullopt,
                          const ScalarField* w_guess = nullptr,
                          std::function<void(const IterationInfo&)> on_iteration = {}) const;

  /// Integrates to t_final, which must be an integer multiple of tau. The
  /// second-order scheme is started with one first-order step.
  Trajectory run(const ScalarField& u0, double t_final, const StepObserver& observer = {}) const;

  /// Whether step `step` of `steps` is stored as a snapshot by run().
  bool snapshot_due(int step, int steps) const;

  /// Number of steps for t_final, or ConfigError if tau does not divide it.
  static int step_count(double t_final, double tau);

private:
  StepOutcome finish(AdmmResult&& r, const ScalarField& u_n, std::optional<double> mass0) const;

  Grid grid_;
  StepContext ctx_;
  LaplacianSymbol symbol_;
};

StepOutcome step_first(const ScalarField& u_n, const StepContext& ctx);
StepOutcome step_second(const ScalarField& u_n, const ScalarField& u_nm1, const StepContext& ctx);
Trajectory run(const ScalarField& u0, double t_final, const StepContext& ctx, const StepObserver& observer = {});

}  // namespace fhadmm
