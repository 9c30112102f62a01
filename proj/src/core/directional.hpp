// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "core/fit.hpp"
#include "core/symbols.hpp"

namespace weylab {

// Directions adapted to a point with Hessian rank >= 2: e1, e2 follow two Hessian rows
// with maximal spanned area, e3 is a pure momentum direction.
struct DirectionFrame {
  PhaseVector center;
  std::array<int, 2> rows{};          // phase coordinates j(1), j(2)
  std::array<PhaseVector, 3> directions;
  std::array<double, 2> theta{};      // e_k . grad d_{j(k)} a0 at the center
  double radius = 0.0;                // ball radius on which d/ds u_k > theta_k / 2
  PhaseMatrix basis;                  // columns: e1, e2, e3, completion
  PhaseMatrix inverse;                // change of variables W
  double det_w = 0.0;                 // |det W|
};

DirectionFrame build_direction_frame(const SymbolModel& model, const PhaseVector& center,
                                     std::uint64_t seed = 1, int monotonicity_samples = 512);

// Measure of {s : v + s e_k in B(center, radius) and |grad a0| <= Cbar h^delta0}, k in {1,2,3}.
double directional_measure(const SymbolModel& model, const DirectionFrame& frame, int k,
                           const PhaseVector& v, double h, double delta0, double cbar,
                           int samples = 10000);

struct DirectionalSweep {
  int direction = 0;
  double expected_exponent = 0.0;
  std::vector<double> h_grid;
  std::vector<double> max_measure;   // max over probes per h
  double constant = 0.0;             // calibrated at the largest h
  std::size_t probes = 0;
  std::size_t violations = 0;
  LinearFit fit;
};

// Probes are the center plus uniform points of the frame ball.
DirectionalSweep directional_sweep(const SymbolModel& model, const DirectionFrame& frame, int k,
                                   const std::vector<double>& h_grid, double delta0, double cbar,
                                   std::size_t probes, std::uint64_t seed, int m0 = 1);

// Monte Carlo volume of B(center, radius) and {|grad a0| <= Cbar h^delta0}.
struct BallVolume {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};
BallVolume ball_sublevel_volume(const SymbolModel& model, const DirectionFrame& frame, double h,
                                double delta0, double cbar, std::size_t samples,
                                std::uint64_t seed);

// Fubini-type volume bounds in frame coordinates, pulled back by |det W|^-1.
struct FubiniBound {
  double product = 0.0;   // bounds in e1, e2, e3 times ball widths in the completion
  double single = 0.0;    // bound in e1 times ball widths in all other frame directions
};
FubiniBound fubini_bound(const DirectionFrame& frame, const std::array<double, 3>& slice_bounds);

}  // namespace weylab
