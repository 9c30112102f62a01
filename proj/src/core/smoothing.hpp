// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "core/fit.hpp"
#include "core/operator.hpp"

namespace weylab {

// gamma0: bump exp(-1/(1-(2t/t0)^2)) on [-t0/2, t0/2]; gamma1 = gamma0*gamma0 / (gamma0*gamma0)(0);
// gamma_tilde(l) = (2 pi h)^-1 int gamma1(t) exp(i t l / h) dt = h^-1 g(l / h) >= 0;
// window(l) = int_Z gamma_tilde(l - mu) dmu.
class MollifiedCounter {
 public:
  MollifiedCounter(double t0, double h, double e1, double e2, std::size_t node_budget = 4096);

  double t0() const { return t0_; }
  double h() const { return h_; }
  double e1() const { return e1_; }
  double e2() const { return e2_; }

  double gamma0(double t) const;
  double gamma1(double t) const;
  double gamma_tilde(double lambda) const;
  double window(double lambda) const;
  double indicator(double lambda) const { return lambda >= e1_ && lambda <= e2_ ? 1.0 : 0.0; }

  // Integral of gamma_tilde over the real line.
  double unit_mass() const { return 2.0 * cumulative_.back(); }
  // Scaled distance u with 1/2 - int_0^u g <= tol.
  double tail_radius(double tol) const;
  // Half-width in energy of the zone around E1, E2 where |window - indicator| may exceed tol.
  double edge_halfwidth(double tol) const { return h_ * tail_radius(tol); }
  std::size_t nodes() const { return nodes_.size(); }

 private:
  double profile(double w) const;       // g
  double cumulative(double u) const;    // int_0^u g for u >= 0
  double t0_, h_, e1_, e2_;
  double norm_ = 0.0;                   // int gamma0^2
  double step_ = 0.0;
  double cutoff_ = 0.0;                 // g negligible beyond
  std::vector<double> nodes_, weights_; // rule on [0, t0/2] for the cosine transform
  std::vector<double> cumulative_;      // int_0^{k step} g
};

// Sum of window(lambda_i) over a complete eigenvalue list.
double smoothed_count(const SpectrumSlice& slice, const MollifiedCounter& counter);

struct GapReport {
  int decay_order = 0;
  double constant = 0.0;            // C_N from the worst eigenvalue
  std::size_t violations = 0;
  std::size_t eigenvalues = 0;
  double sharp = 0.0;               // #{lambda in Z}
  double smoothed = 0.0;
  std::size_t edge_count = 0;       // eigenvalues within the edge zones
  double edge_halfwidth = 0.0;
  LinearFit tail_fit;               // log |window - indicator| vs log(1 + distance/h)
  std::size_t tail_points = 0;
};

GapReport sharp_vs_smoothed_gap(const SpectrumSlice& slice, const MollifiedCounter& counter,
                                int decay_order, double edge_tolerance = 1e-6);

}  // namespace weylab
