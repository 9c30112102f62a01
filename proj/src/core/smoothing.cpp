// SPDX-License-Identifier: Apache-2.0
#include "core/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace weylab {

namespace {
constexpr double kPi = 3.141592653589793;
constexpr int kPanelNodes = 16;
}  // namespace

MollifiedCounter::MollifiedCounter(double t0, double h, double e1, double e2,
                                   std::size_t node_budget)
    : t0_(t0), h_(h), e1_(e1), e2_(e2) {
  if (!(t0 > 0.0)) throw Error(ErrorCode::invalid_argument, "t0 must be > 0");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be > 0");
  if (!(e1 <= e2)) throw Error(ErrorCode::invalid_argument, "window needs E1 <= E2");
  const GaussRule& rule = gauss_legendre(kPanelNodes);
  // Frequencies up to w_max need w_max * panel_width <= 4.
  const double w_max = 4000.0 / t0;
  const auto panels_needed = static_cast<std::size_t>(std::ceil(w_max * 0.5 * t0 / 4.0));
  const std::size_t panels = std::max<std::size_t>(8, std::min(panels_needed, node_budget / kPanelNodes));
  const double half = 0.5 * t0;
  const double pw = half / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    for (int i = 0; i < kPanelNodes; ++i) {
      nodes_.push_back(pw * (static_cast<double>(p) + 0.5 * (rule.nodes[i] + 1.0)));
      weights_.push_back(0.5 * pw * rule.weights[i]);
    }
  }
  const double resolved = 4.0 / pw;
  for (std::size_t i = 0; i < nodes_.size(); ++i) norm_ += 2.0 * weights_[i] * std::pow(gamma0(nodes_[i]), 2);
  // Locate where g becomes negligible relative to g(0).
  step_ = kPi / t0;
  const double g0 = profile(0.0);
  double w = 0.0;
  int small = 0;
  while (small < 4) {
    w += step_;
    if (w > resolved) {
      const auto need = static_cast<std::size_t>(std::ceil(w * half / 4.0)) * kPanelNodes * 2;
      throw Error(ErrorCode::numerical,
                  "cosine transform of the bump is not resolved up to its decay; at least " +
                      std::to_string(need) + " quadrature nodes are required");
    }
    small = profile(w) < 1e-22 * g0 ? small + 1 : 0;
  }
  cutoff_ = w;
  cumulative_.push_back(0.0);
  for (double a = 0.0; a < cutoff_ - 0.5 * step_; a += step_) {
    double s = 0.0;
    for (int i = 0; i < kPanelNodes; ++i) {
      s += 0.5 * step_ * rule.weights[i] * profile(a + 0.5 * step_ * (rule.nodes[i] + 1.0));
    }
    cumulative_.push_back(cumulative_.back() + s);
  }
}

double MollifiedCounter::gamma0(double t) const {
  const double u = 2.0 * t / t0_;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double MollifiedCounter::gamma1(double t) const {
  const double half = 0.5 * t0_;
  const double lo = std::max(-half, t - half), hi = std::min(half, t + half);
  if (hi <= lo) return 0.0;
  const double conv = integrate_composite([&](double s) { return gamma0(s) * gamma0(t - s); }, lo, hi, 64, 16);
  return conv / norm_;
}

double MollifiedCounter::profile(double w) const {
  double c = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) c += weights_[i] * gamma0(nodes_[i]) * std::cos(w * nodes_[i]);
  c *= 2.0;
  return c * c / (2.0 * kPi * norm_);
}

double MollifiedCounter::gamma_tilde(double lambda) const {
  const double w = std::abs(lambda) / h_;
  if (w >= cutoff_) return 0.0;
  return profile(w) / h_;
}

double MollifiedCounter::cumulative(double u) const {
  if (u <= 0.0) return 0.0;
  const auto k = static_cast<std::size_t>(u / step_);
  if (k + 1 >= cumulative_.size()) return cumulative_.back();
  const double a = static_cast<double>(k) * step_;
  const GaussRule& rule = gauss_legendre(kPanelNodes);
  double s = 0.0;
  for (int i = 0; i < kPanelNodes; ++i) {
    s += 0.5 * (u - a) * rule.weights[i] * profile(a + 0.5 * (u - a) * (rule.nodes[i] + 1.0));
  }
  return cumulative_[k] + s;
}

double MollifiedCounter::window(double lambda) const {
  // int_{(lambda-E2)/h}^{(lambda-E1)/h} g
  const double a = (lambda - e2_) / h_, b = (lambda - e1_) / h_;
  auto signed_cumulative = [&](double u) { return u >= 0.0 ? cumulative(u) : -cumulative(-u); };
  return signed_cumulative(b) - signed_cumulative(a);
}

double MollifiedCounter::tail_radius(double tol) const {
  const double total = cumulative_.back();
  for (std::size_t k = 0; k < cumulative_.size(); ++k) {
    if (total - cumulative_[k] <= tol) return static_cast<double>(k) * step_;
  }
  return cutoff_;
}

double smoothed_count(const SpectrumSlice& slice, const MollifiedCounter& counter) {
  if (!slice.has_eigenvalues) throw Error(ErrorCode::incomplete, "smoothed counting needs an eigenvalue list");
  const double top = slice.threshold + slice.margin;
  if (counter.window(top) > 1e-10) {
    throw Error(ErrorCode::incomplete, "eigenvalue list stops where the smoothed window still exceeds 1e-10; "
                                       "raise the margin");
  }
  double s = 0.0;
  for (double l : slice.eigenvalues) s += counter.window(l);
  return s;
}

GapReport sharp_vs_smoothed_gap(const SpectrumSlice& slice, const MollifiedCounter& counter,
                                int decay_order, double edge_tolerance) {
  if (decay_order < 0) throw Error(ErrorCode::invalid_argument, "decay order must be >= 0");
  GapReport r;
  r.decay_order = decay_order;
  r.smoothed = smoothed_count(slice, counter);
  r.eigenvalues = slice.eigenvalues.size();
  r.edge_halfwidth = counter.edge_halfwidth(edge_tolerance);
  const double h = counter.h();
  std::vector<double> diffs, weights, xs, ys;
  for (double l : slice.eigenvalues) {
    const double ind = counter.indicator(l);
    r.sharp += ind;
    const double d1 = std::abs(l - counter.e1()), d2 = std::abs(l - counter.e2());
    if (std::min(d1, d2) <= r.edge_halfwidth) ++r.edge_count;
    const double diff = std::abs(counter.window(l) - ind);
    const double w = std::pow(1.0 + d1 / h, -decay_order) + std::pow(1.0 + d2 / h, -decay_order);
    diffs.push_back(diff);
    weights.push_back(w);
    r.constant = std::max(r.constant, diff / w);
    const double dist = std::min(d1, d2) / h;
    if (dist >= 1.0 && diff > 1e-13) {
      xs.push_back(1.0 + dist);
      ys.push_back(diff);
    }
  }
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > r.constant * weights[i] * (1.0 + 1e-9)) ++r.violations;
  }
  r.tail_points = xs.size();
  if (xs.size() >= 3) r.tail_fit = log_log_fit(xs, ys);
  return r;
}

}  // namespace weylab
