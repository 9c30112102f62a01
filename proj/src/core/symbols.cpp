// SPDX-License-Identifier: Apache-2.0
#include "core/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "core/error.hpp"
#include "core/quadrature.hpp"

namespace weylab {

int order_of(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

std::string index_string(const MultiIndex& a, int dimension) {
  std::string s;
  for (int i = 0; i < dimension; ++i) s += std::to_string(a[i]);
  return s;
}

namespace {

std::string point_string(std::span<const double> x) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", x[i]);
    s += buf;
  }
  return s + ")";
}

// Catmull-Rom weights for parameter t in [0,1] over neighbours -1..2, with t-derivatives.
void catmull_rom(double t, double w[4], double w1[4], double w2[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
  w1[0] = 0.5 * (-3 * t2 + 4 * t - 1);
  w1[1] = 0.5 * (9 * t2 - 10 * t);
  w1[2] = 0.5 * (-9 * t2 + 8 * t + 1);
  w1[3] = 0.5 * (3 * t2 - 2 * t);
  w2[0] = 0.5 * (-6 * t + 4);
  w2[1] = 0.5 * (18 * t - 10);
  w2[2] = 0.5 * (-18 * t + 8);
  w2[3] = 0.5 * (6 * t - 2);
}

}  // namespace

ExprField::ExprField(Expr expr, int dimension)
    : expr_(std::move(expr)), dimension_(dimension), constant_(expr_.is_constant()) {
  if (dimension < 1 || dimension > kMaxDim) {
    throw Error(ErrorCode::invalid_argument, "field dimension must be in 1..3");
  }
  if (expr_.variable_count() > dimension) {
    throw Error(ErrorCode::dimension_mismatch,
                "expression uses x" + std::to_string(expr_.variable_count()) +
                    " but the field dimension is " + std::to_string(dimension));
  }
}

GridField::GridField(int dimension, double lo, double hi, int points_per_axis,
                     std::vector<double> values)
    : dimension_(dimension), lo_(lo), hi_(hi), n_(points_per_axis), values_(std::move(values)) {
  if (dimension < 1 || dimension > kMaxDim) {
    throw Error(ErrorCode::invalid_argument, "grid dimension must be in 1..3");
  }
  if (!(hi > lo) || n_ < 4) {
    throw Error(ErrorCode::invalid_argument, "grid needs hi > lo and at least 4 points per axis");
  }
  std::size_t expected = 1;
  for (int i = 0; i < dimension; ++i) expected *= static_cast<std::size_t>(n_);
  if (values_.size() != expected) {
    throw Error(ErrorCode::dimension_mismatch, "grid value count does not match the grid shape");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::evaluation_fault, "grid holds a non-finite value");
  }
  step_ = (hi - lo) / (n_ - 1);
}

GridField GridField::sample(const ScalarField& f, double lo, double hi, int points_per_axis) {
  const int d = f.dimension();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<double> values(total);
  const double step = (hi - lo) / (points_per_axis - 1);
  std::array<double, kMaxDim> x{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = lo + step * static_cast<double>(r % points_per_axis);
      r /= points_per_axis;
    }
    values[flat] = f.value(std::span<const double>(x.data(), d));
  }
  return GridField(d, lo, hi, points_per_axis, std::move(values));
}

Jet2 GridField::jet(std::span<const double> x) const {
  if (static_cast<int>(x.size()) < dimension_) {
    throw Error(ErrorCode::dimension_mismatch, "grid query has too few coordinates");
  }
  int base[kMaxDim];
  double w[kMaxDim][4], w1[kMaxDim][4], w2[kMaxDim][4];
  for (int i = 0; i < dimension_; ++i) {
    if (!(x[i] >= lo_ - 1e-12 && x[i] <= hi_ + 1e-12)) {
      throw Error(ErrorCode::out_of_domain, "grid coefficient queried outside its grid at " +
                                                point_string(x.first(dimension_)));
    }
    double u = (x[i] - lo_) / step_;
    int k = std::clamp(static_cast<int>(std::floor(u)), 0, n_ - 2);
    base[i] = k;
    catmull_rom(u - k, w[i], w1[i], w2[i]);
    for (int q = 0; q < 4; ++q) {
      w1[i][q] /= step_;
      w2[i][q] /= step_ * step_;
    }
  }
  // Ghost samples beyond either end are extrapolated linearly.
  auto value_at = [&](auto&& self, std::array<int, kMaxDim> idx) -> double {
    for (int i = 0; i < dimension_; ++i) {
      if (idx[i] < 0) {
        auto a = idx, b = idx;
        a[i] = 0;
        b[i] = 1;
        return 2.0 * self(self, a) - self(self, b);
      }
      if (idx[i] >= n_) {
        auto a = idx, b = idx;
        a[i] = n_ - 1;
        b[i] = n_ - 2;
        return 2.0 * self(self, a) - self(self, b);
      }
    }
    std::size_t flat = 0;
    for (int i = 0; i < dimension_; ++i) flat = flat * n_ + static_cast<std::size_t>(idx[i]);
    return values_[flat];
  };

  Jet2 out;
  int count = 1;
  for (int i = 0; i < dimension_; ++i) count *= 4;
  for (int c = 0; c < count; ++c) {
    std::array<int, kMaxDim> idx{};
    int q[kMaxDim] = {0, 0, 0};
    int r = c;
    for (int i = 0; i < dimension_; ++i) {
      q[i] = r % 4;
      r /= 4;
      idx[i] = base[i] - 1 + q[i];
    }
    const double f = value_at(value_at, idx);
    double prod = 1.0;
    for (int i = 0; i < dimension_; ++i) prod *= w[i][q[i]];
    out.v += prod * f;
    for (int a = 0; a < dimension_; ++a) {
      double g = 1.0;
      for (int i = 0; i < dimension_; ++i) g *= (i == a ? w1[i][q[i]] : w[i][q[i]]);
      out.g[a] += g * f;
      for (int b = 0; b < dimension_; ++b) {
        double hh = 1.0;
        for (int i = 0; i < dimension_; ++i) {
          if (a == b && i == a) hh *= w2[i][q[i]];
          else if (i == a || i == b) hh *= w1[i][q[i]];
          else hh *= w[i][q[i]];
        }
        out.hess(a, b) += hh * f;
      }
    }
  }
  return out;
}

std::string GridField::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "grid(d=%d, [%g, %g], n=%d)", dimension_, lo_, hi_, n_);
  return buf;
}

std::shared_ptr<const ScalarField> make_field(const Expr& e, int dimension) {
  return std::make_shared<const ExprField>(e, dimension);
}

std::shared_ptr<const ScalarField> make_constant_field(double c, int dimension) {
  return make_field(Expr::constant(c), dimension);
}

std::vector<SymbolTerm> mirror_terms(std::vector<SymbolTerm> terms) {
  std::vector<SymbolTerm> out = terms;
  for (const auto& t : terms) {
    if (t.nu == t.nubar) continue;
    bool has_mirror = std::any_of(terms.begin(), terms.end(), [&](const SymbolTerm& u) {
      return u.nu == t.nubar && u.nubar == t.nu;
    });
    if (!has_mirror) out.push_back(SymbolTerm{t.nubar, t.nu, t.coefficient});
  }
  return out;
}

SymbolModel::SymbolModel(std::string name, int dimension, int order, std::vector<SymbolTerm> terms,
                         double ellipticity_constant, double holder_exponent)
    : name_(std::move(name)),
      dimension_(dimension),
      order_(order),
      terms_(std::move(terms)),
      c0_(ellipticity_constant),
      r0_(holder_exponent) {
  if (dimension < 1 || dimension > kMaxDim) {
    throw Error(ErrorCode::invalid_argument, "model dimension must be in 1..3");
  }
  if (order < 1) throw Error(ErrorCode::invalid_argument, "model order must be positive");
  if (!(c0_ > 0.0)) throw Error(ErrorCode::invalid_argument, "ellipticity constant must be > 0");
  if (!(r0_ > 0.0 && r0_ < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "Holder exponent must lie in (0, 1)");
  }
  if (terms_.empty()) throw Error(ErrorCode::invalid_argument, "model has no coefficients");
  for (const auto& t : terms_) {
    if (!t.coefficient) throw Error(ErrorCode::invalid_argument, "null coefficient field");
    if (t.coefficient->dimension() != dimension) {
      throw Error(ErrorCode::dimension_mismatch, "coefficient dimension differs from the model");
    }
    for (int i = dimension; i < kMaxDim; ++i) {
      if (t.nu[i] != 0 || t.nubar[i] != 0) {
        throw Error(ErrorCode::dimension_mismatch, "multi-index exceeds the model dimension");
      }
    }
    for (int i = 0; i < dimension; ++i) {
      if (t.nu[i] < 0 || t.nubar[i] < 0) {
        throw Error(ErrorCode::invalid_argument, "negative multi-index entry");
      }
    }
    if (order_of(t.nu) > order || order_of(t.nubar) > order) {
      throw Error(ErrorCode::invalid_argument, "multi-index (" + index_string(t.nu, dimension) +
                                                   ";" + index_string(t.nubar, dimension) +
                                                   ") exceeds the model order");
    }
  }
  // Symmetry a_{nu,nubar} = a_{nubar,nu}: compare summed coefficients per key on sample points.
  using Key = std::pair<MultiIndex, MultiIndex>;
  std::map<Key, std::vector<const ScalarField*>> by_key;
  for (const auto& t : terms_) by_key[{t.nu, t.nubar}].push_back(t.coefficient.get());
  const auto probes = sobol_points(dimension, 32, 1);
  for (const auto& [key, fields] : by_key) {
    if (key.first == key.second) continue;
    auto it = by_key.find({key.second, key.first});
    if (it == by_key.end()) {
      throw Error(ErrorCode::invalid_argument,
                  "coefficient (" + index_string(key.first, dimension) + ";" +
                      index_string(key.second, dimension) + ") has no symmetric partner");
    }
    if (fields == it->second) continue;
    double lo = -1.0, hi = 1.0;
    for (const auto* f : fields) {
      if (auto dom = f->domain()) lo = std::max(lo, dom->first), hi = std::min(hi, dom->second);
    }
    for (const auto* f : it->second) {
      if (auto dom = f->domain()) lo = std::max(lo, dom->first), hi = std::min(hi, dom->second);
    }
    for (const auto& p : probes) {
      std::array<double, kMaxDim> x{};
      for (int i = 0; i < dimension; ++i) x[i] = lo + (hi - lo) * p[i];
      std::span<const double> xs(x.data(), dimension);
      double a = 0.0, b = 0.0;
      for (const auto* f : fields) a += f->value(xs);
      for (const auto* f : it->second) b += f->value(xs);
      if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) {
        throw Error(ErrorCode::invalid_argument,
                    "coefficients (" + index_string(key.first, dimension) + ";" +
                        index_string(key.second, dimension) + ") are not symmetric at " +
                        point_string(xs));
      }
    }
  }
}

SymbolModel SymbolModel::with_terms(std::string name, std::vector<SymbolTerm> terms) const {
  return SymbolModel(std::move(name), dimension_, order_, std::move(terms), c0_, r0_);
}

void SymbolModel::check_point(const PhaseVector& v) const {
  if (v.size() != 2 * dimension_) {
    throw Error(ErrorCode::dimension_mismatch,
                "phase point has dimension " + std::to_string(v.size()) + ", model expects " +
                    std::to_string(2 * dimension_));
  }
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw Error(ErrorCode::invalid_argument, "phase point is not finite");
  }
}

namespace {

// Monomial xi^mu with gradient and Hessian in xi.
struct Monomial {
  double v = 1.0;
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim * kMaxDim> H{};
};

double ipow(double base, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

Monomial monomial(const MultiIndex& mu, std::span<const double> xi, int d, bool derivs) {
  Monomial m;
  std::array<double, kMaxDim> p{}, p1{}, p2{};
  for (int i = 0; i < d; ++i) {
    p[i] = ipow(xi[i], mu[i]);
    p1[i] = mu[i] >= 1 ? mu[i] * ipow(xi[i], mu[i] - 1) : 0.0;
    p2[i] = mu[i] >= 2 ? mu[i] * (mu[i] - 1) * ipow(xi[i], mu[i] - 2) : 0.0;
    m.v *= p[i];
  }
  if (!derivs) return m;
  for (int a = 0; a < d; ++a) {
    double g = 1.0;
    for (int i = 0; i < d; ++i) g *= (i == a ? p1[i] : p[i]);
    m.g[a] = g;
    for (int b = 0; b < d; ++b) {
      double hh = 1.0;
      for (int i = 0; i < d; ++i) {
        if (a == b && i == a) hh *= p2[i];
        else if (i == a || i == b) hh *= p1[i];
        else hh *= p[i];
      }
      m.H[a * kMaxDim + b] = hh;
    }
  }
  return m;
}

MultiIndex sum_index(const MultiIndex& a, const MultiIndex& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

}  // namespace

double SymbolModel::value(const PhaseVector& v) const {
  check_point(v);
  const int d = dimension_;
  std::span<const double> x(v.data(), d), xi(v.data() + d, d);
  double total = 0.0;
  for (const auto& t : terms_) {
    const double a = t.coefficient->value(x);
    if (!std::isfinite(a)) {
      throw Error(ErrorCode::evaluation_fault,
                  "coefficient (" + index_string(t.nu, d) + ";" + index_string(t.nubar, d) +
                      ") is not finite at x=" + point_string(x));
    }
    total += a * monomial(sum_index(t.nu, t.nubar), xi, d, false).v;
  }
  return total;
}

SymbolDerivatives SymbolModel::derivatives(const PhaseVector& v) const {
  check_point(v);
  const int d = dimension_;
  std::span<const double> x(v.data(), d), xi(v.data() + d, d);
  SymbolDerivatives out;
  out.gradient = PhaseVector::Zero(2 * d);
  out.hessian = PhaseMatrix::Zero(2 * d, 2 * d);
  for (const auto& t : terms_) {
    const Jet2 a = t.coefficient->jet(x);
    bool finite = std::isfinite(a.v);
    for (int i = 0; i < d; ++i) finite = finite && std::isfinite(a.g[i]);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) finite = finite && std::isfinite(a.hess(i, j));
    }
    if (!finite) {
      throw Error(ErrorCode::evaluation_fault,
                  "coefficient (" + index_string(t.nu, d) + ";" + index_string(t.nubar, d) +
                      ") or its derivatives are not finite at x=" + point_string(x));
    }
    const Monomial m = monomial(sum_index(t.nu, t.nubar), xi, d, true);
    out.value += a.v * m.v;
    for (int i = 0; i < d; ++i) {
      out.gradient[i] += a.g[i] * m.v;
      out.gradient[d + i] += a.v * m.g[i];
      for (int j = 0; j < d; ++j) {
        out.hessian(i, j) += a.hess(i, j) * m.v;
        out.hessian(i, d + j) += a.g[i] * m.g[j];
        out.hessian(d + j, i) += a.g[i] * m.g[j];
        out.hessian(d + i, d + j) += a.v * m.H[i * kMaxDim + j];
      }
    }
  }
  return out;
}

PhaseVector SymbolModel::gradient(const PhaseVector& v) const { return derivatives(v).gradient; }
PhaseMatrix SymbolModel::hessian(const PhaseVector& v) const { return derivatives(v).hessian; }

double SymbolModel::principal(std::span<const double> x, std::span<const double> xi) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    if (order_of(t.nu) != order_ || order_of(t.nubar) != order_) continue;
    total += t.coefficient->value(x) * monomial(sum_index(t.nu, t.nubar), xi, dimension_, false).v;
  }
  return total;
}

double SymbolModel::min_over_momentum(std::span<const double> x) const {
  if (order_ != 1) {
    throw Error(ErrorCode::invalid_argument, "momentum minimum is closed-form only for order 1");
  }
  const int d = dimension_;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  double c = 0.0;
  for (const auto& t : terms_) {
    const double a = t.coefficient->value(x);
    const MultiIndex mu = sum_index(t.nu, t.nubar);
    const int k = order_of(mu);
    if (k == 0) {
      c += a;
    } else if (k == 1) {
      for (int i = 0; i < d; ++i) if (mu[i] == 1) b[i] += a;
    } else {
      int first = -1, second = -1;
      for (int i = 0; i < d; ++i) {
        for (int r = 0; r < mu[i]; ++r) (first < 0 ? first : second) = i;
      }
      if (first == second) {
        A(first, first) += a;
      } else {
        A(first, second) += 0.5 * a;
        A(second, first) += 0.5 * a;
      }
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw Error(ErrorCode::numerical, "kinetic matrix is not positive definite at x=" +
                                          point_string(x));
  }
  return c - 0.25 * b.dot(ldlt.solve(b));
}

std::vector<double> SymbolModel::momentum_polynomial(double x) const {
  if (dimension_ != 1) throw Error(ErrorCode::invalid_argument, "momentum polynomial needs d = 1");
  std::vector<double> c(2 * order_ + 1, 0.0);
  const double xs[1] = {x};
  for (const auto& t : terms_) c[t.nu[0] + t.nubar[0]] += t.coefficient->value(xs);
  return c;
}

double PhaseBox::volume() const {
  return std::pow(2.0 * x_extent, dimension) * std::pow(2.0 * xi_extent, dimension);
}

bool PhaseBox::contains(const PhaseVector& v, double slack) const {
  for (int k = 0; k < 2 * dimension; ++k) {
    if (v[k] < lower(k) - slack || v[k] > upper(k) + slack) return false;
  }
  return true;
}

PhaseVector PhaseBox::map_unit(std::span<const double> u) const {
  PhaseVector v(2 * dimension);
  for (int k = 0; k < 2 * dimension; ++k) v[k] = lower(k) + width(k) * u[k];
  return v;
}

double rank_tolerance(std::span<const double> eigenvalues) {
  double radius = 0.0;
  for (double e : eigenvalues) radius = std::max(radius, std::abs(e));
  return 1e-6 * std::max(1.0, radius);
}

CriticalPointReport classify_point(const SymbolModel& model, const PhaseVector& v) {
  CriticalPointReport r;
  r.location = v;
  try {
    const SymbolDerivatives D = model.derivatives(v);
    r.energy = D.value;
    r.gradient_norm = D.gradient.norm();
    r.hessian = 0.5 * (D.hessian + D.hessian.transpose());
    Eigen::SelfAdjointEigenSolver<PhaseMatrix> eig(r.hessian, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::numerical, "Hessian eigensolver failed");
    r.hessian_eigenvalues.assign(eig.eigenvalues().data(),
                                 eig.eigenvalues().data() + eig.eigenvalues().size());
    const double tol = rank_tolerance(r.hessian_eigenvalues);
    r.hessian_rank = static_cast<int>(std::count_if(r.hessian_eigenvalues.begin(),
                                                    r.hessian_eigenvalues.end(),
                                                    [&](double e) { return std::abs(e) > tol; }));
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

namespace {

// Damped Newton (Levenberg-Marquardt) on grad a = 0.
bool polish(const SymbolModel& model, PhaseVector& v, const PhaseBox& box,
            const CriticalSearchOptions& opt) {
  SymbolDerivatives D = model.derivatives(v);
  double gnorm = D.gradient.norm();
  double lambda = 1e-3;
  for (int it = 0; it < opt.max_iterations; ++it) {
    if (gnorm <= 1e-3 * opt.gradient_tolerance) break;
    const PhaseMatrix JtJ = D.hessian.transpose() * D.hessian;
    const PhaseVector Jtg = D.hessian.transpose() * D.gradient;
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      PhaseMatrix M = JtJ;
      M.diagonal().array() += lambda * (1.0 + JtJ.diagonal().array());
      PhaseVector step = -M.ldlt().solve(Jtg);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      PhaseVector trial = v + step;
      if (!box.contains(trial, 0.5 * box.x_extent)) {
        lambda *= 10.0;
        continue;
      }
      SymbolDerivatives T;
      try {
        T = model.derivatives(trial);
      } catch (const Error&) {
        lambda *= 10.0;
        continue;
      }
      const double tn = T.gradient.norm();
      if (tn < gnorm) {
        v = trial;
        D = std::move(T);
        gnorm = tn;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
  return gnorm <= opt.gradient_tolerance;
}

}  // namespace

std::vector<CriticalPointReport> find_critical_points(const SymbolModel& model,
                                                      const PhaseBox& box, double energy,
                                                      double window,
                                                      const CriticalSearchOptions& options) {
  if (!(window > 0.0)) throw Error(ErrorCode::invalid_argument, "window c must be > 0");
  if (box.dimension != model.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "phase box dimension differs from the model");
  }
  const auto seeds = sobol_points(model.phase_dimension(), options.seeds, 1);
  std::vector<PhaseVector> found;
  for (const auto& u : seeds) {
    PhaseVector v = box.map_unit(u);
    bool ok = false;
    try {
      ok = polish(model, v, box, options);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok || !box.contains(v, 1e-9)) continue;
    double a = 0.0;
    try {
      a = model.value(v);
    } catch (const Error&) {
      continue;
    }
    if (!(std::abs(a - energy) + model.gradient(v).norm() < 2.0 * window)) continue;
    found.push_back(v);
  }
  auto lex = [](const PhaseVector& a, const PhaseVector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  };
  std::sort(found.begin(), found.end(), lex);
  std::vector<PhaseVector> unique;
  for (const auto& v : found) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
      if ((*it - v).norm() <= options.dedup_radius) {
        dup = true;
        break;
      }
      if (v[0] - (*it)[0] > options.dedup_radius) break;
    }
    if (!dup) unique.push_back(v);
  }
  std::vector<CriticalPointReport> out;
  out.reserve(unique.size());
  for (const auto& v : unique) out.push_back(classify_point(model, v));
  return out;
}

double boundary_minimum(const SymbolModel& model, const PhaseBox& box, std::size_t samples) {
  const int n = model.phase_dimension();
  const auto pts = sobol_points(n, samples, 7);
  double best = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  for (const auto& u : pts) {
    PhaseVector v = box.map_unit(u);
    const int face = static_cast<int>(i % static_cast<std::size_t>(2 * n));
    const int axis = face / 2;
    v[axis] = face % 2 ? box.upper(axis) : box.lower(axis);
    best = std::min(best, model.value(v));
    ++i;
  }
  return best;
}

HypothesisReport check_theorem_hypotheses(const SymbolModel& model, const PhaseBox& box,
                                          double energy, double window,
                                          const CriticalSearchOptions& options) {
  HypothesisReport r;
  r.boundary_minimum = boundary_minimum(model, box);
  r.confinement_ok = energy < r.boundary_minimum;
  r.dimension_ok = model.dimension() >= 2;
  r.points = find_critical_points(model, box, energy, window, options);
  r.rank_vacuous = r.points.empty();
  r.rank_ok = true;
  for (const auto& p : r.points) {
    if (!p.error.empty() || p.hessian_rank < 2) {
      r.rank_ok = false;
      r.rank_witnesses.push_back(p);
    }
  }
  r.theorem_applicable = r.confinement_ok && r.dimension_ok && r.rank_ok;
  r.coverage_caveat = "critical points located by multi-start Newton from " +
                      std::to_string(options.seeds) +
                      " Sobol seeds; points outside the basins of all seeds may be missed";
  if (!r.confinement_ok) {
    r.verdict = "confinement violated on the truncation boundary";
  } else if (!r.dimension_ok) {
    r.verdict = "d = 1: critical-energy estimate out of scope, Weyl sanity only";
  } else if (!r.rank_ok) {
    r.verdict = "rank hypothesis violated at " + std::to_string(r.rank_witnesses.size()) +
                " critical point(s)";
  } else {
    r.verdict = "all hypotheses hold";
  }
  return r;
}

EllipticityReport check_ellipticity(const SymbolModel& model, double x_extent,
                                    std::size_t samples) {
  const int d = model.dimension();
  const auto pts = sobol_points(2 * d, samples, 3);
  EllipticityReport r;
  r.samples = samples;
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& u : pts) {
    std::array<double, kMaxDim> x{}, xi{};
    for (int i = 0; i < d; ++i) x[i] = -x_extent + 2.0 * x_extent * u[i];
    const double two_pi = 6.283185307179586;
    if (d == 1) {
      xi[0] = u[1] < 0.5 ? -1.0 : 1.0;
    } else if (d == 2) {
      xi[0] = std::cos(two_pi * u[2]);
      xi[1] = std::sin(two_pi * u[2]);
    } else {
      const double z = 2.0 * u[3] - 1.0, rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      xi[0] = rho * std::cos(two_pi * u[4]);
      xi[1] = rho * std::sin(two_pi * u[4]);
      xi[2] = z;
    }
    const double p = model.principal(std::span<const double>(x.data(), d),
                                     std::span<const double>(xi.data(), d));
    r.min_ratio = std::min(r.min_ratio, p);
  }
  r.ok = r.min_ratio >= model.ellipticity_constant() * (1.0 - 1e-12);
  return r;
}

namespace {

MultiIndex mi(int a, int b = 0, int c = 0) { return {a, b, c}; }

std::vector<SymbolTerm> kinetic_identity(int d) {
  std::vector<SymbolTerm> t;
  for (int i = 0; i < d; ++i) {
    MultiIndex e{};
    e[i] = 1;
    t.push_back({e, e, make_constant_field(1.0, d)});
  }
  return t;
}

}  // namespace

std::vector<std::string> builtin_model_names() {
  return {"harmonic", "double_well_2d", "separable_harmonic_2d", "holder_test",
          "quartic_sphere_2d"};
}

BuiltinModel builtin_model(const std::string& name) {
  const Expr x1 = Expr::variable(0);
  if (name == "harmonic") {
    auto t = kinetic_identity(1);
    t.push_back({mi(0), mi(0), make_field(Expr::power(x1, 2), 1)});
    return {SymbolModel(name, 1, 1, t, 1.0, 0.5), PhaseBox{1, 3.0, 3.0}};
  }
  if (name == "double_well_2d") {
    auto t = kinetic_identity(2);
    t.push_back({mi(0, 0), mi(0, 0),
                 make_field(parse_expression("(x1^2 - 1)^2 + x2^2"), 2)});
    return {SymbolModel(name, 2, 1, t, 1.0, 0.9), PhaseBox{2, 2.0, 2.0}};
  }
  if (name == "separable_harmonic_2d") {
    auto t = kinetic_identity(2);
    t.push_back({mi(0, 0), mi(0, 0), make_field(parse_expression("x1^2 + x2^2"), 2)});
    return {SymbolModel(name, 2, 1, t, 1.0, 0.5), PhaseBox{2, 2.0, 2.0}};
  }
  if (name == "holder_test") {
    std::vector<SymbolTerm> t;
    t.push_back({mi(1, 0), mi(1, 0),
                 make_field(parse_expression("1 + 0.25 * cutoff(x1, 1.5, 3) * abspow(x1, 2.5)"), 2)});
    t.push_back({mi(0, 1), mi(0, 1), make_constant_field(1.0, 2)});
    t.push_back({mi(0, 0), mi(0, 0), make_field(parse_expression("x1^2 + x2^2"), 2)});
    return {SymbolModel(name, 2, 1, t, 1.0, 0.5), PhaseBox{2, 2.0, 2.0}};
  }
  if (name == "quartic_sphere_2d") {
    // (|x|^2 + |xi|^2 - 1)^2 expanded in momentum monomials.
    std::vector<SymbolTerm> t;
    t.push_back({mi(2, 0), mi(2, 0), make_constant_field(1.0, 2)});
    t.push_back({mi(1, 1), mi(1, 1), make_constant_field(2.0, 2)});
    t.push_back({mi(0, 2), mi(0, 2), make_constant_field(1.0, 2)});
    auto w = make_field(parse_expression("2 * (x1^2 + x2^2 - 1)"), 2);
    t.push_back({mi(1, 0), mi(1, 0), w});
    t.push_back({mi(0, 1), mi(0, 1), w});
    t.push_back({mi(0, 0), mi(0, 0), make_field(parse_expression("(x1^2 + x2^2 - 1)^2"), 2)});
    return {SymbolModel(name, 2, 2, t, 1.0, 0.5), PhaseBox{2, 2.0, 2.0}};
  }
  std::string known;
  for (const auto& n : builtin_model_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorCode::config, "unknown model '" + name + "'; built-in models: " + known);
}

}  // namespace weylab
