// SPDX-License-Identifier: Apache-2.0
#include "core/directional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace weylab {

namespace {

PhaseVector uniform_in_ball(const PhaseVector& center, double radius, CounterStream& rng) {
  const int n = static_cast<int>(center.size());
  PhaseVector g(n);
  for (int k = 0; k < n; ++k) {
    const double u1 = std::max(rng.uniform(), 1e-300), u2 = rng.uniform();
    g[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
  }
  const double norm = g.norm();
  const double r = radius * std::pow(rng.uniform(), 1.0 / n);
  return center + (norm > 0.0 ? g * (r / norm) : PhaseVector(PhaseVector::Zero(n)));
}

// Chord {s : |v + s e - c| < r} for a unit vector e.
bool ball_chord(const PhaseVector& c, double r, const PhaseVector& e, const PhaseVector& v,
                double& lo, double& hi) {
  const PhaseVector w = v - c;
  const double b = w.dot(e);
  const double disc = b * b - (w.squaredNorm() - r * r);
  if (disc <= 0.0) return false;
  const double sq = std::sqrt(disc);
  lo = -b - sq;
  hi = -b + sq;
  return true;
}

}  // namespace

DirectionFrame build_direction_frame(const SymbolModel& model, const PhaseVector& center,
                                     std::uint64_t seed, int monotonicity_samples) {
  const int n = model.phase_dimension();
  const int d = model.dimension();
  if (center.size() != n) throw Error(ErrorCode::dimension_mismatch, "frame center has wrong dimension");
  if (d < 2) throw Error(ErrorCode::hypothesis, "a momentum direction independent of e1, e2 needs d >= 2");
  const CriticalPointReport report = classify_point(model, center);
  if (report.hessian_rank < 2) {
    throw Error(ErrorCode::hypothesis,
                "Hessian rank " + std::to_string(report.hessian_rank) + " < 2 at the frame center");
  }
  const PhaseMatrix& H = report.hessian;
  const double tol = rank_tolerance(report.hessian_eigenvalues);
  double best_area = 0.0;
  int j1 = -1, j2 = -1;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double na = H.row(a).squaredNorm(), nb = H.row(b).squaredNorm();
      const double ab = H.row(a).dot(H.row(b));
      const double area = std::sqrt(std::max(0.0, na * nb - ab * ab));
      if (area > best_area * (1.0 + 1e-12)) {
        best_area = area;
        j1 = a;
        j2 = b;
      }
    }
  }
  if (j1 < 0 || best_area <= tol * tol) {
    throw Error(ErrorCode::degenerate, "Hessian rows at the frame center are pairwise parallel");
  }
  DirectionFrame f;
  f.center = center;
  f.rows = {j1, j2};
  for (int k = 0; k < 2; ++k) {
    const PhaseVector row = H.row(f.rows[k]).transpose();
    PhaseVector e = row / row.norm();
    if (e.head(d).norm() < 1e-8) {
      // Pure momentum direction: tilt into position space, orthogonal to the row.
      e[0] += 0.5;
      e /= e.norm();
    }
    f.directions[k] = e;
    f.theta[k] = e.dot(row);
  }
  {
    const PhaseVector& a = f.directions[0];
    const PhaseVector& b = f.directions[1];
    if (std::abs(std::abs(a.dot(b)) - 1.0) < 1e-10) {
      throw Error(ErrorCode::degenerate, "directions e1 and e2 are parallel");
    }
  }
  // Completion by canonical vectors with the largest residual, momentum first for e3.
  std::vector<PhaseVector> ortho;
  auto residual = [&](const PhaseVector& v) {
    PhaseVector r = v;
    for (const auto& q : ortho) r -= q.dot(r) * q;
    return r;
  };
  auto push = [&](const PhaseVector& v) {
    PhaseVector r = residual(v);
    ortho.push_back(r / r.norm());
  };
  push(f.directions[0]);
  push(f.directions[1]);
  std::vector<PhaseVector> columns{f.directions[0], f.directions[1]};
  auto pick = [&](int from, int to) {
    int best = -1;
    double best_norm = 0.0;
    for (int j = from; j < to; ++j) {
      PhaseVector unit = PhaseVector::Unit(n, j);
      bool used = false;
      for (const auto& c : columns) used = used || c.isApprox(unit);
      if (used) continue;
      const double r = residual(unit).norm();
      if (r > best_norm + 1e-12) {
        best_norm = r;
        best = j;
      }
    }
    if (best < 0 || best_norm < 1e-10) return false;
    const PhaseVector unit = PhaseVector::Unit(n, best);
    push(unit);
    columns.push_back(unit);
    return true;
  };
  if (!pick(d, n)) throw Error(ErrorCode::degenerate, "no momentum direction completes e1, e2");
  f.directions[2] = columns[2];
  while (static_cast<int>(columns.size()) < n) {
    if (!pick(0, n)) throw Error(ErrorCode::numerical, "basis completion failed");
  }
  f.basis.resize(n, n);
  for (int c = 0; c < n; ++c) f.basis.col(c) = columns[c];
  f.inverse = f.basis.inverse();
  f.det_w = std::abs(f.inverse.determinant());
  // Shrink the ball until the slice derivatives stay above theta_k / 2.
  double radius = 0.5;
  for (; radius > 1e-6; radius *= 0.5) {
    bool ok = true;
    CounterStream rng(seed, 0xba11ULL);
    for (int i = 0; i < monotonicity_samples && ok; ++i) {
      const PhaseVector v = i == 0 ? center : uniform_in_ball(center, radius, rng);
      const PhaseMatrix Hv = model.hessian(v);
      for (int k = 0; k < 2 && ok; ++k) {
        const double slope = Hv.row(f.rows[k]).dot(f.directions[k]);
        ok = slope > 0.5 * f.theta[k];
      }
    }
    if (ok) break;
  }
  if (radius <= 1e-6) throw Error(ErrorCode::degenerate, "slice monotonicity fails on every ball");
  f.radius = radius;
  return f;
}

double directional_measure(const SymbolModel& model, const DirectionFrame& frame, int k,
                           const PhaseVector& v, double h, double delta0, double cbar,
                           int samples) {
  if (k < 1 || k > 3) throw Error(ErrorCode::invalid_argument, "direction index must be 1, 2 or 3");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be > 0");
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "at least two slice samples are required");
  const PhaseVector& e = frame.directions[k - 1];
  double lo = 0.0, hi = 0.0;
  if (!ball_chord(frame.center, frame.radius, e, v, lo, hi)) return 0.0;
  const double bound = cbar * std::pow(h, delta0);
  auto member = [&](double s) { return model.gradient(v + s * e).norm() <= bound; };
  const double step = (hi - lo) / (samples - 1);
  double total = 0.0;
  double prev_s = lo;
  bool prev_in = member(lo);
  double start = lo;
  for (int i = 1; i < samples; ++i) {
    const double s = i + 1 == samples ? hi : lo + step * i;
    const bool in = member(s);
    if (in != prev_in) {
      double a = prev_s, b = s;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        if (member(m) == prev_in) a = m;
        else b = m;
      }
      const double edge = 0.5 * (a + b);
      if (prev_in) total += edge - start;
      else start = edge;
    }
    prev_in = in;
    prev_s = s;
  }
  if (prev_in) total += hi - start;
  return total;
}

DirectionalSweep directional_sweep(const SymbolModel& model, const DirectionFrame& frame, int k,
                                   const std::vector<double>& h_grid, double delta0, double cbar,
                                   std::size_t probes, std::uint64_t seed, int m0) {
  if (h_grid.size() < 2) throw Error(ErrorCode::invalid_argument, "sweep needs at least two h values");
  DirectionalSweep out;
  out.direction = k;
  out.expected_exponent = k == 3 ? delta0 / (2 * m0 - 1) : delta0;
  out.h_grid = h_grid;
  out.probes = probes;
  std::vector<PhaseVector> points{frame.center};
  CounterStream rng(seed, 0x9b0be5ULL);
  while (points.size() < probes) points.push_back(uniform_in_ball(frame.center, frame.radius, rng));
  std::vector<std::vector<double>> measures(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    double worst = 0.0;
    for (const auto& p : points) {
      const double m = directional_measure(model, frame, k, p, h_grid[i], delta0, cbar);
      measures[i].push_back(m);
      worst = std::max(worst, m);
    }
    out.max_measure.push_back(worst);
  }
  const std::size_t top = static_cast<std::size_t>(
      std::max_element(h_grid.begin(), h_grid.end()) - h_grid.begin());
  out.constant = out.max_measure[top] / std::pow(h_grid[top], out.expected_exponent);
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    const double limit = out.constant * std::pow(h_grid[i], out.expected_exponent);
    for (double m : measures[i]) {
      if (m > limit * (1.0 + 1e-9)) ++out.violations;
    }
  }
  out.fit = log_log_fit(h_grid, out.max_measure);
  return out;
}

BallVolume ball_sublevel_volume(const SymbolModel& model, const DirectionFrame& frame, double h,
                                double delta0, double cbar, std::size_t samples,
                                std::uint64_t seed) {
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "at least two samples are required");
  const int n = model.phase_dimension();
  const double bound = cbar * std::pow(h, delta0);
  CounterStream rng(seed, 0xb0a11ULL);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    if (model.gradient(uniform_in_ball(frame.center, frame.radius, rng)).norm() <= bound) ++hits;
  }
  const double ball = std::pow(3.141592653589793, 0.5 * n) / std::tgamma(0.5 * n + 1.0) *
                      std::pow(frame.radius, n);
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  BallVolume out;
  out.value = ball * p;
  out.std_error = ball * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

FubiniBound fubini_bound(const DirectionFrame& frame, const std::array<double, 3>& slice_bounds) {
  const int n = static_cast<int>(frame.center.size());
  auto width = [&](int k) { return 2.0 * frame.radius * frame.inverse.row(k).norm(); };
  const double pullback = 1.0 / frame.det_w;
  FubiniBound out;
  out.product = slice_bounds[0] * slice_bounds[1] * slice_bounds[2] * pullback;
  out.single = slice_bounds[0] * pullback;
  for (int k = 3; k < n; ++k) out.product *= width(k);
  for (int k = 1; k < n; ++k) out.single *= width(k);
  return out;
}

}  // namespace weylab
