#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fhadmm/admm.hpp"
#include "fhadmm/grid.hpp"
#include "fhadmm/oracle.hpp"
#include "fhadmm/potential.hpp"
#include "fhadmm/stepper.hpp"

namespace fhadmm {

/// Flat `key = value` entries with dotted section names. `#` starts a
/// comment; blank lines are ignored.
struct KeyValues {
  std::map<std::string, std::string> entries;
  /// Source line of each entry (0 for overrides).
  std::map<std::string, int> lines;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  void set(const std::string& key, const std::string& value);
};

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Applies a `key=value` override string.
void apply_override(KeyValues& kv, const std::string& assignment);

enum class PotentialForm { Original, Modified };
enum class ConfigMode { Run, Convergence };

struct InitialCondition {
  /// cosine_product, random_uniform or constant.
  std::string preset = "cosine_product";
  double offset = 0.0;
  double low = 0.0;
  double high = 0.0;
  double value = 0.0;
};

struct RunConfig {
  int dim = 2;
  int n = 0;
  double length = 0.0;

  PotentialForm form = PotentialForm::Original;
  double theta0 = 0.0;
  double eps = 0.0;

  int order = 1;
  double tau = 0.0;
  double a_stab = 1.0 / 16.0;

  double alpha = 0.5;
  TauPowerLaw rho_u{1.0, 0.0};
  TauPowerLaw rho_w{1.0, 0.0};
  double gamma = 1e-8;
  int max_iter = 100000;
  StoppingRule rule = StoppingRule::TwoTerm;
  bool warm_start_w = false;

  double t_final = 0.0;
  std::uint64_t seed = 42;
  int snapshot_stride = 0;
  int snapshot_count = 10;
  std::string output_dir = "output";

  InitialCondition initial;

  std::vector<int> ladder;
  Refinement refinement = Refinement::Quadratic;
  double tau_coeff = 0.4;

  Grid grid() const { return Grid(dim, n, length); }
  PotentialParams potential() const;
  SchemeParams scheme() const;
  AdmmParams admm(double tau) const;
  StepContext step_context() const;
  ScalarField initial_field(const Grid& g) const;
  ConvergenceConfig convergence_config() const;
};

/// Validates every key and range. Unknown keys, missing required keys and
/// out-of-range values raise ConfigError naming the key.
RunConfig parse_config(const KeyValues& kv, ConfigMode mode);
RunConfig load_config(const std::filesystem::path& path, ConfigMode mode,
                      const std::vector<std::string>& overrides = {});

/// Accepts a literal ("0.5") or a power of the time step ("tau^-0.5",
/// "2*tau^0.5").
TauPowerLaw parse_tau_law(const std::string& text, const std::string& key);

std::string to_string(PotentialForm form);

}  // namespace fhadmm
