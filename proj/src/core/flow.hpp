// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/symbols.hpp"

namespace weylab {

struct FlowTrajectory {
  PhaseVector start;
  std::vector<double> times;
  std::vector<PhaseVector> states;
  double energy_drift = 0.0;
  std::size_t integrator_steps = 0;
};

// d/dt theta = J grad p(theta), J = [[0, I], [-I, 0]], by the 3-stage Gauss-Legendre
// collocation method with step doubling until two successive solutions agree to tol.
// times may be in any order; theta_0 = v0 exactly.
FlowTrajectory integrate_flow(const SymbolModel& model, const PhaseVector& v0,
                              const std::vector<double>& times, double tol = 1e-11);
PhaseVector flow_map(const SymbolModel& model, const PhaseVector& v0, double t, double tol = 1e-11);

// J grad p(v).
PhaseVector hamiltonian_field(const SymbolModel& model, const PhaseVector& v);

// Determinant of the central finite-difference Jacobian of the time-t flow.
double flow_jacobian_determinant(const SymbolModel& model, const PhaseVector& v, double t,
                                 double step = 1e-5);

struct DisplacementWitness {
  PhaseVector point;
  double t = 0.0;
  double displacement = 0.0;
  double gradient_term = 0.0;   // |t grad p(v)|
};

struct DisplacementReport {
  std::size_t samples = 0;
  std::vector<double> t_grid;
  double gradient_floor = 0.0;           // cbar h^delta0
  std::size_t lower_violations = 0;      // |theta_t v - v| < |t grad p| / 2
  std::size_t upper_violations = 0;      // beyond C1 |t grad p| on the check half
  std::size_t taylor_violations = 0;     // beyond C2 t^2 |grad p| on the check half
  double c1 = 0.0;                       // fitted on the calibration half, with safety factor
  double c2 = 0.0;
  double c1_observed = 0.0;              // max ratio over all samples
  double c2_observed = 0.0;
  double min_lower_ratio = 0.0;          // min |theta_t v - v| / |t grad p|
  double t0_empirical = 0.0;             // largest grid |t| with no lower violation up to it
  double max_energy_drift = 0.0;
  double max_group_defect = 0.0;         // |theta_{t+s} - theta_t theta_s|
  double max_reversibility_defect = 0.0; // |theta_{-t} theta_t v - v|
  double max_jacobian_defect = 0.0;      // |det D theta_t - 1|
  double max_symbol_gradient_gap = 0.0;  // |grad p - grad a0| when p differs from a0
  std::vector<DisplacementWitness> witnesses;
};

struct DisplacementOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  double energy = 1.0;
  double window = 0.5;            // |a0 - E| <= window
  double calibration_factor = 2.0;
  std::size_t invariant_samples = 10;
};

// Samples from {|grad a0| > cbar h^delta0, |a0 - E| <= c} in the box; the flow is that of p.
DisplacementReport check_displacement_bounds(const SymbolModel& a0, const SymbolModel& p,
                                             const PhaseBox& box, const std::vector<double>& t_grid,
                                             double cbar, double delta0, double h,
                                             const DisplacementOptions& options = {});

}  // namespace weylab
