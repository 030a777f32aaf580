#include "fhadmm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fhadmm/errors.hpp"
#include "fhadmm/initial.hpp"

namespace fhadmm {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "grid.dim",           "grid.n",           "grid.length",           "potential.form",
      "potential.theta0",   "potential.eps",    "scheme.order",          "scheme.tau",
      "scheme.a_stab",      "admm.alpha",       "admm.rho_u",            "admm.rho_w",
      "admm.gamma",         "admm.max_iter",    "admm.stopping",         "admm.warm_start_w",
      "run.t_final",        "run.seed",         "run.snapshot_stride",   "run.snapshot_count",
      "run.output_dir",     "initial.preset",   "initial.offset",        "initial.low",
      "initial.high",       "initial.value",    "convergence.ladder",    "convergence.refinement",
      "convergence.tau_coeff"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("expected a finite number, got '" + text + "'", key);
  return v;
}

long long to_integer(const std::string& text, const std::string& key) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + text + "'", key);
  return v;
}

int to_int(const std::string& text, const std::string& key) {
  const long long v = to_integer(text, key);
  if (v < -1000000000LL || v > 1000000000LL) throw ConfigError("integer out of range", key);
  return static_cast<int>(v);
}

bool to_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("expected true or false, got '" + text + "'", key);
}

class Reader {
public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string* find(const std::string& key) const {
    auto it = kv_.entries.find(key);
    return it == kv_.entries.end() ? nullptr : &it->second;
  }
  const std::string& require(const std::string& key) const {
    if (const std::string* v = find(key)) return *v;
    throw ConfigError("required key is missing", key);
  }

  void number(const std::string& key, double& out, bool required = false) const {
    if (const std::string* v = required ? &require(key) : find(key)) out = to_double(*v, key);
  }
  void integer(const std::string& key, int& out, bool required = false) const {
    if (const std::string* v = required ? &require(key) : find(key)) out = to_int(*v, key);
  }
  void flag(const std::string& key, bool& out) const {
    if (const std::string* v = find(key)) out = to_bool(*v, key);
  }

private:
  const KeyValues& kv_;
};

std::vector<int> parse_ladder(std::string text) {
  const std::string key = "convergence.ladder";
  std::replace(text.begin(), text.end(), '[', ' ');
  std::replace(text.begin(), text.end(), ']', ' ');
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<int> ladder;
  std::string item;
  while (in >> item) ladder.push_back(to_int(item, key));
  if (ladder.empty()) throw ConfigError("ladder is empty", key);
  if (ladder.size() < 2) throw ConfigError("need at least two resolutions", key);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 2) throw ConfigError("resolutions must be at least 2", key);
    if (i > 0 && ladder[i] != 2 * ladder[i - 1]) throw ConfigError("each resolution must double the previous one", key);
  }
  return ladder;
}

void check_interior(double v, const std::string& key) {
  if (!(std::abs(v) < 1.0)) throw ConfigError("initial values must lie strictly inside (-1, 1)", key);
}

}  // namespace

void KeyValues::set(const std::string& key, const std::string& value) {
  entries[key] = value;
  lines.emplace(key, 0);
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'", trim(text));
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (kv.has(key)) throw ConfigError("line " + std::to_string(number) + ": duplicate key", key);
    kv.entries[key] = value;
    kv.lines[key] = number;
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_key_values(in);
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must have the form key=value, got '" + assignment + "'");
  const std::string key = trim(std::string_view(assignment).substr(0, eq));
  if (key.empty()) throw ConfigError("override has an empty key");
  kv.set(key, trim(std::string_view(assignment).substr(eq + 1)));
}

TauPowerLaw parse_tau_law(const std::string& text, const std::string& key) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  const auto pos = s.find("tau");
  if (pos == std::string::npos) {
    const double v = to_double(s, key);
    if (!(v > 0.0)) throw ConfigError("must be positive", key);
    return {v, 0.0};
  }
  TauPowerLaw law;
  if (pos > 0) {
    if (s[pos - 1] != '*') throw ConfigError("expected 'c*tau^p', got '" + text + "'", key);
    law.coefficient = to_double(s.substr(0, pos - 1), key);
  }
  const std::string rest = s.substr(pos + 3);
  if (rest.empty())
    law.exponent = 1.0;
  else if (rest[0] == '^')
    law.exponent = to_double(rest.substr(1), key);
  else
    throw ConfigError("expected 'tau^p', got '" + text + "'", key);
  if (!(law.coefficient > 0.0)) throw ConfigError("must be positive", key);
  return law;
}

std::string to_string(PotentialForm form) { return form == PotentialForm::Original ? "original" : "modified"; }

PotentialParams RunConfig::potential() const {
  return form == PotentialForm::Original ? PotentialParams::original(theta0, eps)
                                         : PotentialParams::modified(theta0, eps);
}

SchemeParams RunConfig::scheme() const { return SchemeParams{order, tau, a_stab}; }

AdmmParams RunConfig::admm(double step) const {
  AdmmParams a;
  a.alpha = alpha;
  a.rho_u = rho_u.at(step);
  a.rho_w = rho_w.at(step);
  a.gamma = gamma;
  a.max_iter = max_iter;
  a.rule = rule;
  return a;
}

StepContext RunConfig::step_context() const {
  StepContext ctx;
  ctx.potential = potential();
  ctx.scheme = scheme();
  ctx.admm = admm(tau);
  ctx.warm_start_w = warm_start_w;
  ctx.snapshot_stride = snapshot_stride;
  ctx.snapshot_count = snapshot_count;
  return ctx;
}

ScalarField RunConfig::initial_field(const Grid& g) const {
  if (initial.preset == "cosine_product") return cosine_product(g);
  if (initial.preset == "random_uniform") return random_uniform(g, initial.offset, initial.low, initial.high, seed);
  return constant_field(g, initial.value);
}

ConvergenceConfig RunConfig::convergence_config() const {
  ConvergenceConfig c;
  c.dim = dim;
  c.length = length;
  c.ladder = ladder;
  c.order = order;
  c.refinement = refinement;
  c.tau_coeff = tau_coeff;
  c.t_final = t_final;
  c.potential = potential();
  c.a_stab = a_stab;
  c.admm = admm(1.0);
  c.rho_u = rho_u;
  c.rho_w = rho_w;
  const RunConfig self = *this;
  c.initial = [self](const Grid& g) { return self.initial_field(g); };
  return c;
}

RunConfig parse_config(const KeyValues& kv, ConfigMode mode) {
  for (const auto& [key, value] : kv.entries)
    if (!known_keys().count(key)) throw ConfigError("unknown key", key);

  const Reader r(kv);
  const bool run = mode == ConfigMode::Run;
  RunConfig c;

  r.integer("grid.dim", c.dim);
  if (c.dim != 2 && c.dim != 3) throw ConfigError("dimension must be 2 or 3", "grid.dim");
  r.number("grid.length", c.length, true);
  if (!(c.length > 0.0)) throw ConfigError("domain length must be positive", "grid.length");
  if (run) {
    r.integer("grid.n", c.n, true);
    if (c.n < 2) throw ConfigError("need at least 2 cells per axis", "grid.n");
  }

  if (const std::string* form = r.find("potential.form")) {
    if (*form == "original")
      c.form = PotentialForm::Original;
    else if (*form == "modified")
      c.form = PotentialForm::Modified;
    else
      throw ConfigError("expected 'original' or 'modified', got '" + *form + "'", "potential.form");
  }
  r.number("potential.theta0", c.theta0, true);
  if (!(c.theta0 > 0.0)) throw ConfigError("theta0 must be positive", "potential.theta0");
  r.number("potential.eps", c.eps, true);
  if (!(c.eps > 0.0)) throw ConfigError("eps must be positive", "potential.eps");

  r.integer("scheme.order", c.order);
  if (c.order != 1 && c.order != 2) throw ConfigError("order must be 1 or 2", "scheme.order");
  if (run) {
    r.number("scheme.tau", c.tau, true);
    if (!(c.tau > 0.0)) throw ConfigError("time step must be positive", "scheme.tau");
  }
  r.number("scheme.a_stab", c.a_stab);
  if (!(c.a_stab >= 0.0)) throw ConfigError("stabilization must be non-negative", "scheme.a_stab");

  r.number("admm.alpha", c.alpha);
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie strictly inside (0, 1)", "admm.alpha");
  if (const std::string* v = r.find("admm.rho_u")) c.rho_u = parse_tau_law(*v, "admm.rho_u");
  if (const std::string* v = r.find("admm.rho_w")) c.rho_w = parse_tau_law(*v, "admm.rho_w");
  r.number("admm.gamma", c.gamma);
  if (!(c.gamma > 0.0)) throw ConfigError("stopping tolerance must be positive", "admm.gamma");
  r.integer("admm.max_iter", c.max_iter);
  if (c.max_iter < 1) throw ConfigError("max_iter must be at least 1", "admm.max_iter");
  if (const std::string* v = r.find("admm.stopping")) {
    if (*v == "two_term")
      c.rule = StoppingRule::TwoTerm;
    else if (*v == "four_term")
      c.rule = StoppingRule::FourTerm;
    else
      throw ConfigError("expected 'two_term' or 'four_term', got '" + *v + "'", "admm.stopping");
  }
  r.flag("admm.warm_start_w", c.warm_start_w);

  r.number("run.t_final", c.t_final, true);
  if (!(c.t_final > 0.0)) throw ConfigError("final time must be positive", "run.t_final");
  if (const std::string* v = r.find("run.seed")) {
    const long long s = to_integer(*v, "run.seed");
    if (s < 0) throw ConfigError("seed must be non-negative", "run.seed");
    c.seed = static_cast<std::uint64_t>(s);
  }
  r.integer("run.snapshot_stride", c.snapshot_stride);
  if (c.snapshot_stride < 0) throw ConfigError("snapshot stride must be non-negative", "run.snapshot_stride");
  r.integer("run.snapshot_count", c.snapshot_count);
  if (c.snapshot_count < 0) throw ConfigError("snapshot count must be non-negative", "run.snapshot_count");
  if (const std::string* v = r.find("run.output_dir")) {
    if (v->empty()) throw ConfigError("output directory must not be empty", "run.output_dir");
    c.output_dir = *v;
  }

  c.initial.preset = r.require("initial.preset");
  if (c.initial.preset == "random_uniform") {
    r.number("initial.offset", c.initial.offset);
    r.number("initial.low", c.initial.low, true);
    r.number("initial.high", c.initial.high, true);
    if (!(c.initial.low <= c.initial.high)) throw ConfigError("low must not exceed high", "initial.high");
    check_interior(c.initial.offset + c.initial.low, "initial.low");
    check_interior(c.initial.offset + c.initial.high, "initial.high");
  } else if (c.initial.preset == "constant") {
    r.number("initial.value", c.initial.value, true);
    check_interior(c.initial.value, "initial.value");
  } else if (c.initial.preset != "cosine_product") {
    throw ConfigError("unknown preset '" + c.initial.preset + "'", "initial.preset");
  }

  if (run) {
    Stepper::step_count(c.t_final, c.tau);
    c.admm(c.tau).validate();
  } else {
    c.ladder = parse_ladder(r.require("convergence.ladder"));
    c.refinement = c.order == 1 ? Refinement::Quadratic : Refinement::Linear;
    if (const std::string* v = r.find("convergence.refinement")) {
      if (*v == "quadratic")
        c.refinement = Refinement::Quadratic;
      else if (*v == "linear")
        c.refinement = Refinement::Linear;
      else
        throw ConfigError("expected 'quadratic' or 'linear', got '" + *v + "'", "convergence.refinement");
    }
    c.tau_coeff = c.refinement == Refinement::Quadratic ? 0.4 : 0.8;
    r.number("convergence.tau_coeff", c.tau_coeff);
    if (!(c.tau_coeff > 0.0)) throw ConfigError("must be positive", "convergence.tau_coeff");
    for (int n : c.ladder) {
      const double h = c.length / n;
      const double step = c.refinement == Refinement::Quadratic ? c.tau_coeff * h * h : c.tau_coeff * h;
      Stepper::step_count(c.t_final, step);
      c.admm(step).validate();
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, ConfigMode mode, const std::vector<std::string>& overrides) {
  KeyValues kv = read_key_values(path);
  for (const std::string& o : overrides) apply_override(kv, o);
  return parse_config(kv, mode);
}

}  // namespace fhadmm
