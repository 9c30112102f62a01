// SPDX-License-Identifier: Apache-2.0
#include "core/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/harness.hpp"

namespace weylab {

namespace {

const std::vector<std::string> kExperiments = {"weyl_sweep",        "critical_sweep",
                                               "mollifier_rates",   "sublevel_lemma",
                                               "flow_bounds",       "oscillatory_decay",
                                               "smoothed_counting"};

const std::vector<std::string> kRequired = {"model", "energy", "epsilon", "delta0", "t0",
                                            "window", "Cbar", "cbar", "seed"};

const std::vector<std::string> kOptional = {
    "potential", "dimension",  "holder_exponent", "x_extent",      "xi_extent",
    "h_grid",    "h_max",      "h_min",           "h_points",      "extra_epsilon",
    "variant",   "stencil_order", "grid_points",  "confinement_gap", "samples",
    "output_dir"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string number_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

  double real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
      issues_.push_back(key + ": '" + text + "' is not a finite number");
    return v;
  }

  long long integer(const std::string& key, const std::string& text) {
    long long v = 0;
    const char* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) issues_.push_back(key + ": '" + text + "' is not an integer");
    return v;
  }

  std::vector<double> list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(real(key, trim(item)));
    return out;
  }

 private:
  std::vector<std::string>& issues_;
};

OperatorVariant parse_variant(const std::string& s, std::vector<std::string>& issues) {
  if (s == "raw") return OperatorVariant::raw;
  if (s == "plus") return OperatorVariant::plus;
  if (s == "minus") return OperatorVariant::minus;
  issues.push_back("variant: '" + s + "' is not one of raw, plus, minus");
  return OperatorVariant::raw;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

}  // namespace

std::vector<std::string> required_config_keys() { return kRequired; }
std::vector<std::string> experiment_names() { return kExperiments; }
bool is_experiment(const std::string& name) {
  return std::find(kExperiments.begin(), kExperiments.end(), name) != kExperiments.end();
}

ExperimentConfig parse_config(const std::string& text, const std::string& experiment) {
  std::vector<std::string> issues;
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const bool known = std::find(kRequired.begin(), kRequired.end(), key) != kRequired.end() ||
                       std::find(kOptional.begin(), kOptional.end(), key) != kOptional.end();
    if (!known) {
      issues.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      continue;
    }
    if (!values.emplace(key, value).second)
      issues.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  std::vector<std::string> missing;
  for (const auto& k : kRequired)
    if (!values.count(k)) missing.push_back(k);
  if (!missing.empty()) issues.push_back("missing required keys: " + join(missing, ", "));

  ExperimentConfig c;
  Reader r(issues);
  for (const auto& [key, v] : values) {
    if (key == "model") c.model = v;
    else if (key == "potential") c.potential = v;
    else if (key == "dimension") c.dimension = static_cast<int>(r.integer(key, v));
    else if (key == "holder_exponent") c.holder_exponent = r.real(key, v);
    else if (key == "energy") c.energy = r.real(key, v);
    else if (key == "epsilon") c.epsilon = r.real(key, v);
    else if (key == "delta0") c.delta0 = r.real(key, v);
    else if (key == "t0") c.t0 = r.real(key, v);
    else if (key == "window") c.window = r.real(key, v);
    else if (key == "Cbar") c.cbar_upper = r.real(key, v);
    else if (key == "cbar") c.cbar_lower = r.real(key, v);
    else if (key == "seed") {
      const long long s = r.integer(key, v);
      if (s < 0) issues.push_back("seed: must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "x_extent") c.x_extent = r.real(key, v);
    else if (key == "xi_extent") c.xi_extent = r.real(key, v);
    else if (key == "h_grid") c.h_grid = r.list(key, v);
    else if (key == "h_max") c.h_max = r.real(key, v);
    else if (key == "h_min") c.h_min = r.real(key, v);
    else if (key == "h_points") c.h_points = static_cast<int>(r.integer(key, v));
    else if (key == "extra_epsilon") c.extra_epsilon = r.real(key, v);
    else if (key == "variant") c.variant = parse_variant(v, issues);
    else if (key == "stencil_order") c.stencil_order = static_cast<int>(r.integer(key, v));
    else if (key == "grid_points") c.grid_points = static_cast<int>(r.integer(key, v));
    else if (key == "confinement_gap") c.confinement_gap = r.real(key, v);
    else if (key == "samples") {
      const long long s = r.integer(key, v);
      if (s < 0) issues.push_back("samples: must be nonnegative");
      c.samples = static_cast<std::size_t>(s);
    } else if (key == "output_dir") c.output_dir = v;
  }

  if (missing.empty() && issues.empty()) {
    for (auto& s : validate_config(c, experiment)) issues.push_back(std::move(s));
  }
  if (!issues.empty())
    throw Error(ErrorCode::config, "invalid configuration:\n  " + join(issues, "\n  "));
  return c;
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "model = " << c.model << '\n';
  if (!c.potential.empty()) os << "potential = " << c.potential << '\n';
  if (c.dimension != 0) os << "dimension = " << c.dimension << '\n';
  os << "holder_exponent = " << number_text(c.holder_exponent) << '\n';
  os << "energy = " << number_text(c.energy) << '\n';
  os << "epsilon = " << number_text(c.epsilon) << '\n';
  os << "delta0 = " << number_text(c.delta0) << '\n';
  os << "t0 = " << number_text(c.t0) << '\n';
  os << "window = " << number_text(c.window) << '\n';
  os << "Cbar = " << number_text(c.cbar_upper) << '\n';
  os << "cbar = " << number_text(c.cbar_lower) << '\n';
  os << "seed = " << c.seed << '\n';
  os << "x_extent = " << number_text(c.x_extent) << '\n';
  os << "xi_extent = " << number_text(c.xi_extent) << '\n';
  if (!c.h_grid.empty()) {
    os << "h_grid = ";
    for (std::size_t i = 0; i < c.h_grid.size(); ++i)
      os << (i ? ", " : "") << number_text(c.h_grid[i]);
    os << '\n';
  }
  os << "h_max = " << number_text(c.h_max) << '\n';
  os << "h_min = " << number_text(c.h_min) << '\n';
  os << "h_points = " << c.h_points << '\n';
  os << "extra_epsilon = " << number_text(c.extra_epsilon) << '\n';
  os << "variant = " << variant_name(c.variant) << '\n';
  os << "stencil_order = " << c.stencil_order << '\n';
  os << "grid_points = " << c.grid_points << '\n';
  os << "confinement_gap = " << number_text(c.confinement_gap) << '\n';
  os << "samples = " << c.samples << '\n';
  if (!c.output_dir.empty()) os << "output_dir = " << c.output_dir << '\n';
  return os.str();
}

BuiltinModel resolve_model(const ExperimentConfig& c) {
  BuiltinModel m = [&]() -> BuiltinModel {
    if (c.model != "custom") return builtin_model(c.model);
    if (c.dimension < 1 || c.dimension > kMaxDim)
      throw Error(ErrorCode::config, "custom model needs dimension in 1.." +
                                         std::to_string(kMaxDim));
    if (c.potential.empty()) throw Error(ErrorCode::config, "custom model needs a potential");
    const int d = c.dimension;
    std::vector<SymbolTerm> terms;
    for (int i = 0; i < d; ++i) {
      MultiIndex e{};
      e[i] = 1;
      terms.push_back({e, e, make_constant_field(1.0, d)});
    }
    terms.push_back({MultiIndex{}, MultiIndex{}, make_field(parse_expression(c.potential), d)});
    return {SymbolModel("custom", d, 1, terms, 1.0, c.holder_exponent), PhaseBox{d, 3.0, 3.0}};
  }();
  if (c.x_extent > 0.0) m.box.x_extent = c.x_extent;
  if (c.xi_extent > 0.0) m.box.xi_extent = c.xi_extent;
  return m;
}

std::vector<double> resolve_h_grid(const ExperimentConfig& c) {
  if (!c.h_grid.empty()) return c.h_grid;
  if (c.h_min > 0.0) return log_spaced_grid(c.h_max, c.h_min, c.h_points);
  return geometric_h_grid(c.h_max, std::sqrt(2.0), c.h_points);
}

std::vector<std::string> validate_config(const ExperimentConfig& c, const std::string& experiment) {
  std::vector<std::string> issues;
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  if (!experiment.empty() && !is_experiment(experiment))
    issues.push_back("unknown experiment '" + experiment + "'");

  double r0 = c.holder_exponent;
  int m0 = 1;
  try {
    const auto m = resolve_model(c);
    r0 = m.model.holder_exponent();
    m0 = m.model.order();
  } catch (const std::exception& e) {
    issues.push_back(std::string("model: ") + e.what());
  }

  const double lo = 1.0 / (2.0 + r0);
  if (!(c.delta0 > lo && c.delta0 < 0.5))
    issues.push_back("delta0 = " + fmt(c.delta0) + " violates the smoothing-scale constraint " +
                     "1/(2 + r0) < delta0 < 1/2 with r0 = " + fmt(r0) + ", i.e. (" + fmt(lo) +
                     ", 0.5)");
  if (!(c.cbar_upper > 1.0))
    issues.push_back("Cbar = " + fmt(c.cbar_upper) + " must exceed 1");
  if (!(c.cbar_lower > 0.0)) issues.push_back("cbar = " + fmt(c.cbar_lower) + " must be positive");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0))
    issues.push_back("epsilon = " + fmt(c.epsilon) + " must lie in (0, 1)");
  if (!(c.extra_epsilon >= 0.0 && c.extra_epsilon < 1.0))
    issues.push_back("extra_epsilon = " + fmt(c.extra_epsilon) + " must lie in [0, 1)");
  if (!(c.t0 > 0.0)) issues.push_back("t0 = " + fmt(c.t0) + " must be positive");
  if (!(c.window > 0.0)) issues.push_back("window = " + fmt(c.window) + " must be positive");
  if (c.x_extent < 0.0 || c.xi_extent < 0.0) issues.push_back("box extents must be nonnegative");
  if (c.stencil_order != 2 && c.stencil_order != 4)
    issues.push_back("stencil_order must be 2 or 4");
  if (c.grid_points < 0) issues.push_back("grid_points must be nonnegative");
  if (!(c.confinement_gap > 0.0)) issues.push_back("confinement_gap must be positive");
  if (c.h_grid.empty()) {
    if (!(c.h_max > 0.0 && c.h_max < 1.0)) issues.push_back("h_max must lie in (0, 1)");
    if (c.h_min < 0.0 || c.h_min > c.h_max) issues.push_back("h_min must lie in [0, h_max]");
    if (c.h_points < 1) issues.push_back("h_points must be at least 1");
  } else {
    for (double h : c.h_grid)
      if (!(h > 0.0 && h < 1.0)) issues.push_back("h_grid entry " + fmt(h) + " outside (0, 1)");
  }

  if (experiment == "critical_sweep") {
    const double bound = 0.5 * (1.0 - 1.0 / (4.0 * m0 - 1.0));
    if (!(c.delta0 > bound))
      issues.push_back("delta0 = " + fmt(c.delta0) +
                       " violates the critical-energy condition (1 - 1/(4 m0 - 1))/2 < delta0 " +
                       "with m0 = " + std::to_string(m0) + ", i.e. delta0 > " + fmt(bound));
  }
  return issues;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.energy = 1.0;
  c.epsilon = 0.1;
  c.t0 = 1.0;
  c.window = 0.5;
  c.cbar_upper = 2.0;
  c.cbar_lower = 2.0;
  c.seed = 1;
  const std::vector<double> sweep_grid{0.1, 0.071, 0.05, 0.035, 0.025};
  if (experiment == "weyl_sweep") {
    c.model = "separable_harmonic_2d";
    c.holder_exponent = 0.5;
    c.delta0 = 0.45;
    c.h_grid = sweep_grid;
  } else if (experiment == "critical_sweep") {
    c.model = "double_well_2d";
    c.holder_exponent = 0.9;
    c.delta0 = 0.4;
    c.h_grid = sweep_grid;
  } else if (experiment == "mollifier_rates") {
    c.model = "custom";
    c.potential = "cutoff(x1, 1.5, 3) * abspow(x1, 2.5)";
    c.dimension = 1;
    c.holder_exponent = 0.5;
    c.delta0 = 0.41;
    c.h_max = 0.1;
    c.h_min = 1e-4;
    c.h_points = 7;
  } else if (experiment == "sublevel_lemma") {
    c.model = "double_well_2d";
    c.holder_exponent = 0.9;
    c.delta0 = 0.4;
    c.h_grid = {1e-1, 1e-2, 1e-3, 1e-4};
    c.samples = 200;
  } else if (experiment == "flow_bounds") {
    c.model = "double_well_2d";
    c.holder_exponent = 0.9;
    c.delta0 = 0.4;
    c.t0 = 0.1;
    c.h_grid = {1e-2};
    c.samples = 100;
  } else if (experiment == "oscillatory_decay") {
    c.model = "harmonic";
    c.holder_exponent = 0.5;
    c.delta0 = 0.41;
    c.h_max = 1e-2;
    c.h_min = std::pow(10.0, -3.5);
    c.h_points = 4;
  } else if (experiment == "smoothed_counting") {
    c.model = "harmonic";
    c.holder_exponent = 0.5;
    c.delta0 = 0.45;
    c.energy = 0.5;
    c.window = 0.3;
    c.h_grid = {0.05, 0.025, 0.0125};
  } else {
    throw Error(ErrorCode::unknown_experiment, "unknown experiment '" + experiment + "'");
  }
  return c;
}

}  // namespace weylab
