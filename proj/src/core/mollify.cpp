// SPDX-License-Identifier: Apache-2.0
#include "core/mollify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace weylab {

double MomentDefects::max() const {
  return std::max({std::abs(mass), std::abs(first), std::abs(second)});
}

namespace {

// Truncated Taylor series in one variable, order 4.
struct Series {
  std::array<double, 5> c{};
};

Series series_mul(const Series& a, const Series& b) {
  Series r;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; i + j < 5; ++j) r.c[i + j] += a.c[i] * b.c[j];
  }
  return r;
}

Series series_reciprocal(const Series& u) {
  Series r;
  r.c[0] = 1.0 / u.c[0];
  for (int k = 1; k < 5; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += u.c[j] * r.c[k - j];
    r.c[k] = -acc / u.c[0];
  }
  return r;
}

Series series_exp(const Series& w) {
  Series f;
  f.c[0] = std::exp(w.c[0]);
  for (int k = 1; k < 5; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * w.c[j] * f.c[k - j];
    f.c[k] = acc / k;
  }
  return f;
}

double surface_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

double bump(double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0; }

// Sum over pairings of idx into singletons and pairs of the radial-chain factors.
double pairing_sum(std::span<const double> z, std::vector<int>& idx,
                   const std::array<double, 5>& g, int blocks) {
  if (idx.empty()) return g[blocks];
  const int first = idx.front();
  std::vector<int> rest(idx.begin() + 1, idx.end());
  double total = 2.0 * z[first] * pairing_sum(z, rest, g, blocks + 1);
  for (std::size_t k = 0; k < rest.size(); ++k) {
    if (rest[k] != first) continue;
    std::vector<int> remaining;
    remaining.reserve(rest.size() - 1);
    for (std::size_t m = 0; m < rest.size(); ++m) if (m != k) remaining.push_back(rest[m]);
    total += 2.0 * pairing_sum(z, remaining, g, blocks + 1);
  }
  return total;
}

std::vector<MultiIndex> indices_up_to(int d, int order) {
  std::vector<MultiIndex> out;
  for (int a = 0; a <= order; ++a) {
    for (int b = 0; b <= (d >= 2 ? order - a : 0); ++b) {
      for (int c = 0; c <= (d >= 3 ? order - a - b : 0); ++c) out.push_back({a, b, c});
    }
  }
  return out;
}

}  // namespace

MollifierKernel::MollifierKernel(int dimension, double support_radius, KernelResolution res)
    : d_(dimension), rho_(support_radius) {
  if (dimension < 1 || dimension > kMaxDim) {
    throw Error(ErrorCode::invalid_argument, "kernel dimension must be in 1..3");
  }
  if (!(support_radius > 0.0) || !std::isfinite(support_radius)) {
    throw Error(ErrorCode::invalid_argument, "kernel support radius must be > 0");
  }
  const double omega = surface_area(d_);
  auto radial_moment = [&](int k) {
    return omega * integrate_adaptive(
                       [&](double r) { return std::pow(r, k + d_ - 1) * bump(r * r / (rho_ * rho_)); },
                       0.0, rho_, 1e-13);
  };
  const double M0 = radial_moment(0), M2 = radial_moment(2), M4 = radial_moment(4);
  const double det = M0 * M4 - M2 * M2;
  if (!(std::abs(det) > 1e-300) || !std::isfinite(det)) {
    throw Error(ErrorCode::numerical, "singular moment system in kernel construction");
  }
  // c0 M0 + c2 M2 = 1, c0 M2 + c2 M4 = 0.
  c0_ = M4 / det;
  c2_ = -M2 / det;

  auto profile = [&](double r) { return (c0_ + c2_ * r * r) * bump(r * r / (rho_ * rho_)); };
  defects_.mass = omega * integrate_adaptive([&](double r) { return std::pow(r, d_ - 1) * profile(r); },
                                             0.0, rho_, 1e-13) - 1.0;
  defects_.first = 0.0;
  defects_.second = omega / d_ *
                    integrate_adaptive([&](double r) { return std::pow(r, d_ + 1) * profile(r); },
                                       0.0, rho_, 1e-13);
  fourth_ = omega * integrate_adaptive([&](double r) { return std::pow(r, d_ + 3) * profile(r); },
                                       0.0, rho_, 1e-13);

  // Quadrature rule over the ball.
  const int panels = res.radial_panels > 0 ? res.radial_panels : (d_ == 1 ? 64 : 8);
  const int order = res.radial_order > 0 ? res.radial_order : (d_ == 1 ? 12 : 16);
  const int angular = res.angular_points > 0 ? res.angular_points : (d_ == 2 ? 32 : 16);
  const GaussRule& gl = gauss_legendre(order);
  if (d_ == 1) {
    const double width = 2.0 * rho_ / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = -rho_ + (p + 0.5) * width;
      for (int k = 0; k < order; ++k) {
        nodes_.push_back(mid + 0.5 * width * gl.nodes[k]);
        weights_.push_back(0.5 * width * gl.weights[k]);
      }
    }
  } else {
    std::vector<double> radii, rweights;
    const double width = rho_ / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * width;
      for (int k = 0; k < order; ++k) {
        radii.push_back(mid + 0.5 * width * gl.nodes[k]);
        rweights.push_back(0.5 * width * gl.weights[k]);
      }
    }
    const double dphi = 2.0 * std::numbers::pi / angular;
    if (d_ == 2) {
      for (std::size_t i = 0; i < radii.size(); ++i) {
        for (int j = 0; j < angular; ++j) {
          const double phi = (j + 0.5) * dphi;
          nodes_.push_back(radii[i] * std::cos(phi));
          nodes_.push_back(radii[i] * std::sin(phi));
          weights_.push_back(rweights[i] * radii[i] * dphi);
        }
      }
    } else {
      const GaussRule& polar = gauss_legendre(angular / 2);
      for (std::size_t i = 0; i < radii.size(); ++i) {
        for (std::size_t t = 0; t < polar.nodes.size(); ++t) {
          const double ct = polar.nodes[t], st = std::sqrt(1.0 - ct * ct);
          for (int j = 0; j < angular; ++j) {
            const double phi = (j + 0.5) * dphi;
            nodes_.push_back(radii[i] * st * std::cos(phi));
            nodes_.push_back(radii[i] * st * std::sin(phi));
            nodes_.push_back(radii[i] * ct);
            weights_.push_back(rweights[i] * radii[i] * radii[i] * polar.weights[t] * dphi);
          }
        }
      }
    }
  }

  for (const auto& alpha : indices_up_to(d_, 4)) {
    std::vector<double> w(weights_.size());
    for (std::size_t k = 0; k < weights_.size(); ++k) w[k] = weights_[k] * derivative(node(k), alpha);
    weighted_.emplace(alpha, std::move(w));
  }

  const auto& w0 = weighted_.at(MultiIndex{0, 0, 0});
  double mass = 0.0;
  std::array<double, kMaxDim> first{};
  std::array<double, kMaxDim * kMaxDim> second{};
  for (std::size_t k = 0; k < w0.size(); ++k) {
    auto z = node(k);
    mass += w0[k];
    for (int i = 0; i < d_; ++i) {
      first[i] += w0[k] * z[i];
      for (int j = 0; j < d_; ++j) second[i * kMaxDim + j] += w0[k] * z[i] * z[j];
    }
  }
  rule_defects_.mass = mass - 1.0;
  for (int i = 0; i < d_; ++i) {
    rule_defects_.first = std::max(rule_defects_.first, std::abs(first[i]));
    for (int j = 0; j < d_; ++j) {
      rule_defects_.second = std::max(rule_defects_.second, std::abs(second[i * kMaxDim + j]));
    }
  }
}

std::array<double, 5> MollifierKernel::profile_derivatives(double s) const {
  const double rho2 = rho_ * rho_;
  if (s >= rho2) return {};
  Series u;
  u.c[0] = 1.0 - s / rho2;
  u.c[1] = -1.0 / rho2;
  Series w = series_reciprocal(u);
  for (double& c : w.c) c = -c;
  Series e = series_exp(w);
  Series poly;
  poly.c[0] = c0_ + c2_ * s;
  poly.c[1] = c2_;
  Series g = series_mul(poly, e);
  std::array<double, 5> out{};
  double fact = 1.0;
  for (int k = 0; k < 5; ++k) {
    if (k > 0) fact *= k;
    out[k] = fact * g.c[k];
  }
  return out;
}

double MollifierKernel::value(std::span<const double> z) const {
  double s = 0.0;
  for (int i = 0; i < d_; ++i) s += z[i] * z[i];
  const double q = s / (rho_ * rho_);
  return q < 1.0 ? (c0_ + c2_ * s) * std::exp(-1.0 / (1.0 - q)) : 0.0;
}

double MollifierKernel::derivative(std::span<const double> z, const MultiIndex& alpha) const {
  if (order_of(alpha) > 4) {
    throw Error(ErrorCode::invalid_argument, "kernel derivatives are available up to order 4");
  }
  double s = 0.0;
  for (int i = 0; i < d_; ++i) s += z[i] * z[i];
  const auto g = profile_derivatives(s);
  std::vector<int> idx;
  for (int i = 0; i < d_; ++i) {
    for (int r = 0; r < alpha[i]; ++r) idx.push_back(i);
  }
  return pairing_sum(z, idx, g, 0);
}

const std::vector<double>& MollifierKernel::weighted(const MultiIndex& alpha) const {
  auto it = weighted_.find(alpha);
  if (it == weighted_.end()) {
    throw Error(ErrorCode::invalid_argument, "kernel derivative order exceeds 4 or dimension");
  }
  return it->second;
}

std::shared_ptr<const MollifierKernel> build_mollifier(int dimension, double support_radius,
                                                       KernelResolution resolution) {
  return std::make_shared<const MollifierKernel>(dimension, support_radius, resolution);
}

void check_smoothing_exponent(double delta0, double holder_exponent) {
  const double lo = 1.0 / (2.0 + holder_exponent);
  if (!(delta0 > lo && delta0 < 0.5)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "smoothing exponent delta0=%g outside the admissible open interval "
                  "(1/(2+r0), 1/2) = (%.6g, 0.5) for r0=%g",
                  delta0, lo, holder_exponent);
    throw Error(ErrorCode::config, buf);
  }
}

RegularizedCoefficient::RegularizedCoefficient(std::shared_ptr<const ScalarField> base, double h,
                                               double delta0,
                                               std::shared_ptr<const MollifierKernel> kernel)
    : base_(std::move(base)), h_(h), delta0_(delta0), kernel_(std::move(kernel)) {
  if (!base_ || !kernel_) throw Error(ErrorCode::invalid_argument, "null field or kernel");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be > 0");
  if (kernel_->dimension() != base_->dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "kernel and coefficient dimensions differ");
  }
  scale_ = std::pow(h, delta0);
}

void RegularizedCoefficient::base_samples(std::span<const double> x, std::vector<double>& out) const {
  const int d = dimension();
  const std::size_t n = kernel_->node_count();
  out.resize(n);
  std::array<double, kMaxDim> y{};
  for (std::size_t k = 0; k < n; ++k) {
    auto z = kernel_->node(k);
    for (int i = 0; i < d; ++i) y[i] = x[i] - scale_ * z[i];
    out[k] = base_->value(std::span<const double>(y.data(), d));
  }
}

namespace {

// Base samples with their Taylor polynomial at x removed up to the given degree.
struct CenteredSamples {
  std::vector<double> raw;
  std::vector<double> deg0;
  std::vector<double> deg1;
  std::vector<double> deg2;
};

}  // namespace

static void center_samples(const ScalarField& base, const MollifierKernel& kernel, double scale,
                           std::span<const double> x, const std::vector<double>& raw,
                           CenteredSamples& out) {
  const int d = base.dimension();
  const std::size_t n = raw.size();
  out.deg0.resize(n);
  out.deg1.resize(n);
  out.deg2.resize(n);
  const Jet2 j = base.jet(x);
  bool smooth = std::isfinite(j.v);
  for (int i = 0; i < d; ++i) {
    smooth = smooth && std::isfinite(j.g[i]);
    for (int k = 0; k < d; ++k) smooth = smooth && std::isfinite(j.hess(i, k));
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.deg0[k] = raw[k] - j.v;
    if (!smooth) {
      out.deg1[k] = out.deg0[k];
      out.deg2[k] = out.deg0[k];
      continue;
    }
    auto z = kernel.node(k);
    double t1 = 0.0, t2 = 0.0;
    for (int i = 0; i < d; ++i) {
      t1 += z[i] * j.g[i];
      for (int m = 0; m < d; ++m) t2 += 0.5 * z[i] * j.hess(i, m) * z[m];
    }
    out.deg1[k] = out.deg0[k] + scale * t1;
    out.deg2[k] = out.deg1[k] - scale * scale * t2;
  }
}

double RegularizedCoefficient::derivative(std::span<const double> x, const MultiIndex& alpha) const {
  const int k = order_of(alpha);
  if (base_->is_constant()) return k == 0 ? base_->value(x) : 0.0;
  thread_local std::vector<double> samples;
  thread_local CenteredSamples centered;
  base_samples(x, samples);
  const std::vector<double>* f = &samples;
  if (k >= 1) {
    center_samples(*base_, *kernel_, scale_, x, samples, centered);
    f = k == 1 ? &centered.deg0 : (k == 2 ? &centered.deg1 : &centered.deg2);
  }
  const auto& w = kernel_->weighted(alpha);
  double acc = 0.0;
  for (std::size_t m = 0; m < f->size(); ++m) acc += w[m] * (*f)[m];
  return acc * std::pow(scale_, -k);
}

double RegularizedCoefficient::value(std::span<const double> x) const {
  return derivative(x, MultiIndex{0, 0, 0});
}

Jet2 RegularizedCoefficient::jet(std::span<const double> x) const {
  if (base_->is_constant()) return jet_constant(base_->value(x));
  thread_local std::vector<double> samples;
  thread_local CenteredSamples centered;
  base_samples(x, samples);
  center_samples(*base_, *kernel_, scale_, x, samples, centered);
  const int d = dimension();
  auto dot = [&](const MultiIndex& a, const std::vector<double>& f) {
    const auto& w = kernel_->weighted(a);
    double acc = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) acc += w[k] * f[k];
    return acc;
  };
  Jet2 j;
  j.v = dot({0, 0, 0}, samples);
  for (int i = 0; i < d; ++i) {
    MultiIndex a{};
    a[i] = 1;
    j.g[i] = dot(a, centered.deg0) / scale_;
    for (int k = i; k < d; ++k) {
      MultiIndex b{};
      b[i] += 1;
      b[k] += 1;
      const double v = dot(b, centered.deg1) / (scale_ * scale_);
      j.hess(i, k) = v;
      j.hess(k, i) = v;
    }
  }
  return j;
}

std::string RegularizedCoefficient::describe() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "regularized(h=%g, delta0=%g) of ", h_, delta0_);
  return buf + base_->describe();
}

std::shared_ptr<const ScalarField> regularize(std::shared_ptr<const ScalarField> a, double h,
                                              double delta0, double holder_exponent,
                                              std::shared_ptr<const MollifierKernel> kernel) {
  check_smoothing_exponent(delta0, holder_exponent);
  if (a->is_constant()) return a;
  return std::make_shared<const RegularizedCoefficient>(std::move(a), h, delta0, std::move(kernel));
}

std::vector<SymbolTerm> momentum_shift_terms(int dimension, int order, double s) {
  // (1 + |xi|^2)^m = sum_k C(m,k) sum_{|beta|=k} k!/beta! xi^(2 beta).
  std::vector<SymbolTerm> out;
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  auto fact = [](int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  };
  for (int k = 0; k <= order; ++k) {
    for (const auto& beta : indices_up_to(dimension, k)) {
      if (order_of(beta) != k) continue;
      double multinomial = fact(k);
      for (int i = 0; i < dimension; ++i) multinomial /= fact(beta[i]);
      out.push_back({beta, beta, make_constant_field(s * binom(order, k) * multinomial, dimension)});
    }
  }
  return out;
}

SymbolModel regularize_symbol(const SymbolModel& model, double h, double delta0,
                              std::shared_ptr<const MollifierKernel> kernel, double shift) {
  check_smoothing_exponent(delta0, model.holder_exponent());
  std::vector<SymbolTerm> terms;
  for (const auto& t : model.terms()) {
    terms.push_back({t.nu, t.nubar,
                     regularize(t.coefficient, h, delta0, model.holder_exponent(), kernel)});
  }
  if (shift != 0.0) {
    auto extra = momentum_shift_terms(model.dimension(), model.order(), shift);
    terms.insert(terms.end(), extra.begin(), extra.end());
  }
  return model.with_terms(model.name() + "_regularized", std::move(terms));
}

SmoothingFit fit_smoothing_exponents(std::shared_ptr<const ScalarField> a, const MultiIndex& alpha,
                                     std::span<const double> h_grid, double delta0,
                                     double holder_exponent,
                                     std::shared_ptr<const MollifierKernel> kernel,
                                     const SmoothingFitOptions& options) {
  check_smoothing_exponent(delta0, holder_exponent);
  const int order = order_of(alpha);
  if (order > 4) throw Error(ErrorCode::invalid_argument, "derivative order must be <= 4");
  if (h_grid.size() < 4) throw Error(ErrorCode::invalid_argument, "h grid needs at least 4 points");
  const int d = a->dimension();
  SmoothingFit out;
  out.alpha = alpha;
  out.derivative_order = order;
  out.growth_target = order >= 3;
  out.expected_slope = (2.0 + holder_exponent - order) * delta0;
  auto pts = sobol_points(d, options.sample_count, 1);
  for (const auto& anchor : options.anchors) {
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) {
      u[i] = (anchor.at(i) - options.sample_lo) / (options.sample_hi - options.sample_lo);
    }
    pts.push_back(std::move(u));
  }
  for (double h : h_grid) {
    RegularizedCoefficient reg(a, h, delta0, kernel);
    double sup = 0.0;
    for (const auto& u : pts) {
      std::array<double, kMaxDim> x{};
      for (int i = 0; i < d; ++i) x[i] = options.sample_lo + (options.sample_hi - options.sample_lo) * u[i];
      std::span<const double> xs(x.data(), d);
      double q = reg.derivative(xs, alpha);
      if (!out.growth_target) {
        const Jet2 j = a->jet(xs);
        double exact = j.v;
        if (order == 1) {
          for (int i = 0; i < d; ++i) if (alpha[i] == 1) exact = j.g[i];
        } else if (order == 2) {
          int p = -1, r = -1;
          for (int i = 0; i < d; ++i) {
            for (int k = 0; k < alpha[i]; ++k) (p < 0 ? p : r) = i;
          }
          exact = j.hess(p, r);
        }
        q -= exact;
      }
      sup = std::max(sup, std::abs(q));
    }
    out.samples.push_back({h, sup});
  }
  double largest = 0.0;
  for (const auto& s : out.samples) largest = std::max(largest, s.sup_norm);
  if (!out.growth_target && largest <= options.annihilation_threshold) {
    out.exact_annihilation = true;
    return out;
  }
  std::vector<double> hs, ys;
  for (const auto& s : out.samples) hs.push_back(s.h), ys.push_back(s.sup_norm);
  out.fit = log_log_fit(hs, ys);
  return out;
}

}  // namespace weylab
