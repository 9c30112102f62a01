// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/operator.hpp"
#include "core/symbols.hpp"

namespace weylab {

// One experiment as a key = value document; '#' starts a comment.
struct ExperimentConfig {
  std::string model;               // built-in name, or "custom" with potential and dimension
  std::string potential;           // custom: a = |xi|^2 + V(x)
  int dimension = 0;               // custom only
  double holder_exponent = 1.0;    // custom only
  double energy = 0.0;
  double epsilon = 0.0;
  double delta0 = 0.0;
  double t0 = 0.0;
  double window = 0.0;             // c in |a0 - E| <= c
  double cbar_upper = 0.0;         // Cbar
  double cbar_lower = 0.0;         // cbar
  std::uint64_t seed = 0;
  double x_extent = 0.0;           // 0 keeps the model's box
  double xi_extent = 0.0;
  std::vector<double> h_grid;      // explicit grid; when empty h_max, h_min, h_points apply
  double h_max = 0.1;
  double h_min = 0.0;              // 0 selects h_max / sqrt(2)^(h_points - 1)
  int h_points = 6;
  double extra_epsilon = 0.05;
  OperatorVariant variant = OperatorVariant::raw;
  int stencil_order = 4;
  int grid_points = 0;             // nonzero overrides the per-h grid size
  double confinement_gap = 2.0;
  std::size_t samples = 0;         // 0 keeps each experiment's default sample count
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

std::vector<std::string> required_config_keys();
std::vector<std::string> experiment_names();
bool is_experiment(const std::string& name);

// Parses and validates; throws Error(config) listing every violation.
// An empty experiment skips experiment-specific conditions.
ExperimentConfig parse_config(const std::string& text, const std::string& experiment = "");
std::string emit_config(const ExperimentConfig& config);

// Violations of the parameter constraints; empty when the configuration is admissible.
std::vector<std::string> validate_config(const ExperimentConfig& config,
                                         const std::string& experiment = "");

// Reference configuration for each registered experiment.
ExperimentConfig default_config(const std::string& experiment);

BuiltinModel resolve_model(const ExperimentConfig& config);
std::vector<double> resolve_h_grid(const ExperimentConfig& config);

}  // namespace weylab
