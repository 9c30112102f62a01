// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace weylab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct PolySublevelQuery {
  std::vector<double> coefficients;  // ascending powers
  double tau = 0.0;
  Interval domain;
  double measure = 0.0;
  std::vector<Interval> intervals;   // open components of {|F| < tau} within the domain
};

double poly_eval(std::span<const double> ascending, double s);

// All distinct real roots of a polynomial inside [lo, hi], sorted, polished to 1e-12.
// Exact Sturm isolation up to degree 12, companion eigenvalues above.
std::vector<double> real_roots(std::span<const double> ascending, double lo, double hi);

// Exact measure of {s in I : |F(s)| < tau}.
PolySublevelQuery poly_sublevel_measure(std::span<const double> ascending, double tau,
                                        Interval domain);

struct SublevelTrial {
  int trial = 0;
  int degree = 0;
  std::vector<double> coefficients;
  std::vector<double> measures;  // per h
  std::vector<bool> violated;    // per h
};

struct SublevelLemmaReport {
  double delta0 = 0.0;
  double c_scale = 1.0;  // tau = (c_scale * h)^delta0
  std::vector<double> h_grid;
  std::vector<double> c_m;  // calibrated constant per degree 1..m_max (index m-1)
  std::vector<SublevelTrial> trials;
  int violations = 0;
};

SublevelLemmaReport verify_sublevel_lemma(std::uint64_t seed, int trials, int m_max, double delta0,
                                          std::span<const double> h_grid, double c_scale = 1.0);

}  // namespace weylab
