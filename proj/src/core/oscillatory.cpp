// SPDX-License-Identifier: Apache-2.0
#include "core/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/error.hpp"
#include "core/expr.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

namespace weylab {

namespace {
constexpr double kPi = 3.141592653589793;
constexpr int kPanelNodes = 12;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct AxisRule {
  std::vector<double> x, w;
};

AxisRule axis_rule(double lo, double hi, std::size_t panels) {
  const GaussRule& g = gauss_legendre(kPanelNodes);
  AxisRule r;
  const double pw = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    for (int i = 0; i < kPanelNodes; ++i) {
      r.x.push_back(lo + pw * (static_cast<double>(p) + 0.5 * (g.nodes[i] + 1.0)));
      r.w.push_back(0.5 * pw * g.weights[i]);
    }
  }
  return r;
}

std::complex<double> tensor_sum(const SymbolModel& model, const Amplitude& b, double omega,
                                const AxisRule& rule, int n) {
  const std::size_t m = rule.x.size();
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= m;
  const double r2 = b.radius * b.radius;
  double re = 0.0, im = 0.0;
  PhaseVector v(n);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    double w = 1.0, dist2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::size_t i = r % m;
      r /= m;
      v[k] = b.center[k] + rule.x[i];
      w *= rule.w[i];
      dist2 += rule.x[i] * rule.x[i];
    }
    if (dist2 >= r2) continue;
    const double amp = b.value(v);
    if (amp == 0.0) continue;
    const double phase = omega * model.value(v);
    re += w * amp * std::cos(phase);
    im += w * amp * std::sin(phase);
  }
  return {re, im};
}

}  // namespace

Amplitude bump_amplitude(const PhaseVector& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "amplitude radius must be > 0");
  Amplitude a;
  a.center = center;
  a.radius = radius;
  a.value = [center, radius](const PhaseVector& v) {
    const double s2 = (v - center).squaredNorm() / (radius * radius);
    return s2 >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s2));
  };
  std::string c;
  for (int k = 0; k < center.size(); ++k) c += (k ? ", " : "") + fmt(center[k]);
  a.description = "ball(center=(" + c + "), radius=" + fmt(radius) + ")";
  return a;
}

Amplitude remove_critical_region(const SymbolModel& model, Amplitude base, double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::invalid_argument, "gradient threshold must be > 0");
  Amplitude a = base;
  const SymbolModel m = model;
  a.value = [m, inner = base.value, threshold](const PhaseVector& v) {
    const double b = inner(v);
    if (b == 0.0) return 0.0;
    const double g = m.gradient(v).norm();
    return b * (1.0 - smooth_cutoff(g, threshold, 2.0 * threshold)[0]);
  };
  a.description = base.description + " minus {|grad a0| <= " + fmt(threshold) + "}";
  return a;
}

OscillatoryResult oscillatory_integral(const SymbolModel& model, const Amplitude& b, double t,
                                       double h, std::size_t node_budget) {
  const int n = model.phase_dimension();
  const int d = model.dimension();
  if (n > 4) throw Error(ErrorCode::invalid_argument, "oscillatory quadrature supports d <= 2");
  if (b.center.size() != n) throw Error(ErrorCode::dimension_mismatch, "amplitude center has wrong dimension");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be > 0");
  OscillatoryResult out;
  out.t = t;
  out.h = h;
  out.amplitude_support = b.description;
  // Largest phase gradient over the support, with a margin.
  double gmax = 0.0;
  CounterStream rng(7, 0x05c1ULL);
  for (int i = 0; i < 4096; ++i) {
    PhaseVector v = b.center;
    for (int k = 0; k < n; ++k) v[k] += b.radius * rng.uniform(-1.0, 1.0);
    gmax = std::max(gmax, model.gradient(v).norm());
  }
  const double omega = t / h;
  const double rate = std::abs(omega) * 1.25 * gmax;        // radians per unit length
  const double wavelengths = rate * 2.0 * b.radius / (2.0 * kPi);
  const std::size_t panels = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(wavelengths)));
  double fine_nodes = 1.0;
  for (int k = 0; k < n; ++k) fine_nodes *= 2.0 * static_cast<double>(panels * kPanelNodes);
  std::size_t use = panels;
  if (fine_nodes > static_cast<double>(node_budget)) {
    out.reliable = false;
    const double per_axis = std::pow(static_cast<double>(node_budget), 1.0 / n) / (2.0 * kPanelNodes);
    use = std::max<std::size_t>(1, static_cast<std::size_t>(per_axis));
  }
  const AxisRule coarse = axis_rule(-b.radius, b.radius, use);
  const AxisRule fine = axis_rule(-b.radius, b.radius, 2 * use);
  const double norm = std::pow(2.0 * kPi * h, -d);
  const std::complex<double> vc = norm * tensor_sum(model, b, omega, coarse, n);
  const std::complex<double> vf = norm * tensor_sum(model, b, omega, fine, n);
  out.value = vf;
  out.quadrature_error = std::abs(vf - vc);
  out.nodes = 1;
  for (int k = 0; k < n; ++k) out.nodes *= fine.x.size();
  return out;
}

double decay_kappa(double mu, double delta0) {
  return std::min(mu - delta0 - 0.5, 0.5 * (1.0 - mu));
}

DecayReport nonstationary_decay_check(const SymbolModel& model,
                                      const std::function<Amplitude(double h)>& amplitude,
                                      double mu, double delta0, int n_max,
                                      const std::vector<double>& h_grid, double order,
                                      std::size_t node_budget) {
  if (!(mu > delta0 + 0.5 && mu < 1.0)) {
    throw Error(ErrorCode::config, "decay exponent mu must lie in (delta0 + 1/2, 1), got " + fmt(mu));
  }
  if (n_max < 1) throw Error(ErrorCode::invalid_argument, "n_max must be >= 1");
  DecayReport r;
  r.mu = mu;
  r.delta0 = delta0;
  r.kappa = decay_kappa(mu, delta0);
  r.order = order;
  r.n_max = n_max;
  std::vector<double> hs, js;
  std::vector<double> sorted = h_grid;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double h : sorted) {
    DecaySample s;
    s.h = h;
    s.t = std::pow(h, 1.0 - mu);
    const OscillatoryResult res = oscillatory_integral(model, amplitude(h), s.t, h, node_budget);
    s.modulus = std::abs(res.value);
    s.quadrature_error = res.quadrature_error;
    s.used = res.reliable && res.quadrature_error <= 0.1 * s.modulus && s.modulus > 0.0;
    if (s.used) {
      hs.push_back(h);
      js.push_back(s.modulus);
    } else {
      r.excluded.push_back("h=" + fmt(h) + (res.reliable ? " quadrature error " + fmt(res.quadrature_error) +
                                                               " vs |J| " + fmt(s.modulus)
                                                         : " node budget exceeded"));
    }
    if (hs.size() >= 2) s.slope_so_far = log_log_fit(hs, js).slope;
    r.samples.push_back(s);
  }
  if (hs.size() < 2) {
    throw Error(ErrorCode::incomplete, "fewer than two reliable h values for the decay fit");
  }
  r.fit = log_log_fit(hs, js);
  for (int n = 1; n <= n_max; ++n) {
    if (r.fit.slope >= n * r.kappa - order) r.orders_passed = n;
    else break;
  }
  r.decays = r.orders_passed == n_max;
  return r;
}

}  // namespace weylab
