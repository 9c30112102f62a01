// SPDX-License-Identifier: Apache-2.0
#include "core/operator.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace weylab {

const char* variant_name(OperatorVariant v) {
  switch (v) {
    case OperatorVariant::raw: return "raw";
    case OperatorVariant::plus: return "plus";
    case OperatorVariant::minus: return "minus";
  }
  return "unknown";
}

std::size_t OperatorGrid::unknowns() const {
  std::size_t n = 1;
  for (int k = 0; k < dimension; ++k) n *= static_cast<std::size_t>(points[k]);
  return n;
}

double max_spacing(double h, int stencil_order) {
  if (stencil_order == 2) return 0.25 * h;
  if (stencil_order == 4) return 0.5 * h;
  throw Error(ErrorCode::invalid_argument, "stencil order must be 2 or 4");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Minimum of min_xi a0 over the faces of the box [lower, upper].
double face_minimum(const SymbolModel& model, const std::array<double, kMaxDim>& lower,
                    const std::array<double, kMaxDim>& upper, int axis_filter = -1,
                    int samples = 33) {
  const int d = model.dimension();
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> x(d);
  for (int k = 0; k < d; ++k) {
    if (axis_filter >= 0 && k != axis_filter) continue;
    std::size_t total = 1;
    for (int m = 0; m < d - 1; ++m) total *= static_cast<std::size_t>(samples);
    for (int side = 0; side < 2; ++side) {
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t r = flat;
        for (int m = 0; m < d; ++m) {
          if (m == k) {
            x[m] = side ? upper[m] : lower[m];
            continue;
          }
          const double t = static_cast<double>(r % samples) / (samples - 1);
          r /= samples;
          x[m] = lower[m] + t * (upper[m] - lower[m]);
        }
        best = std::min(best, model.min_over_momentum(x));
      }
    }
  }
  return best;
}

struct Layout {
  int d;
  std::array<int, kMaxDim> n{};
  std::size_t size() const {
    std::size_t s = 1;
    for (int k = 0; k < d; ++k) s *= static_cast<std::size_t>(n[k]);
    return s;
  }
  // Flat index with -1 for out-of-range entries.
  long index(const std::array<int, kMaxDim>& i) const {
    long flat = 0;
    for (int k = d - 1; k >= 0; --k) {
      if (i[k] < 0 || i[k] >= n[k]) return -1;
      flat = flat * n[k] + i[k];
    }
    return flat;
  }
  std::array<int, kMaxDim> unflatten(std::size_t flat) const {
    std::array<int, kMaxDim> i{};
    for (int k = 0; k < d; ++k) {
      i[k] = static_cast<int>(flat % static_cast<std::size_t>(n[k]));
      flat /= static_cast<std::size_t>(n[k]);
    }
    return i;
  }
};

// Dirichlet value at node j along an axis: zero at the boundary, odd reflection beyond it.
void add_node(Triplets& t, int row, const Layout& L, std::array<int, kMaxDim> i, int axis,
              int j, double w) {
  const int n = L.n[axis];
  if (j == -1 || j == n) return;
  if (j < -1) {
    j = -2 - j;
    w = -w;
  } else if (j > n) {
    j = 2 * n - j;
    w = -w;
  }
  if (j < 0 || j >= n) return;
  i[axis] = j;
  t.emplace_back(row, static_cast<int>(L.index(i)), w);
}

// Staggered derivative along an axis: rows are edges between consecutive nodes,
// including the two boundary edges.
SparseMatrix staggered_derivative(const Layout& L, int axis, double dx, int order) {
  Layout edges = L;
  edges.n[axis] = L.n[axis] + 1;
  Triplets t;
  const std::size_t rows = edges.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const auto e = edges.unflatten(r);
    const int row = static_cast<int>(r);
    const int k = e[axis];  // edge between nodes k-1 and k
    if (order == 2) {
      add_node(t, row, L, e, axis, k, 1.0 / dx);
      add_node(t, row, L, e, axis, k - 1, -1.0 / dx);
    } else {
      const double c = 1.0 / (24.0 * dx);
      add_node(t, row, L, e, axis, k, 27.0 * c);
      add_node(t, row, L, e, axis, k - 1, -27.0 * c);
      add_node(t, row, L, e, axis, k + 1, -c);
      add_node(t, row, L, e, axis, k - 2, c);
    }
  }
  SparseMatrix D(static_cast<int>(rows), static_cast<int>(L.size()));
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SparseMatrix centered_derivative(const Layout& L, int axis, double dx, int order) {
  Triplets t;
  for (std::size_t r = 0; r < L.size(); ++r) {
    const auto i = L.unflatten(r);
    const int row = static_cast<int>(r);
    const int k = i[axis];
    if (order == 2) {
      add_node(t, row, L, i, axis, k + 1, 0.5 / dx);
      add_node(t, row, L, i, axis, k - 1, -0.5 / dx);
    } else {
      const double c = 1.0 / (12.0 * dx);
      add_node(t, row, L, i, axis, k + 1, 8.0 * c);
      add_node(t, row, L, i, axis, k - 1, -8.0 * c);
      add_node(t, row, L, i, axis, k + 2, -c);
      add_node(t, row, L, i, axis, k - 2, c);
    }
  }
  SparseMatrix G(static_cast<int>(L.size()), static_cast<int>(L.size()));
  G.setFromTriplets(t.begin(), t.end());
  return G;
}

struct CoefficientGroups {
  std::array<std::vector<std::shared_ptr<const ScalarField>>, kMaxDim> diagonal;
  std::map<std::pair<int, int>, std::vector<std::shared_ptr<const ScalarField>>> off_diagonal;
  std::vector<std::shared_ptr<const ScalarField>> potential;
};

int single_axis(const MultiIndex& a, int d) {
  for (int k = 0; k < d; ++k) {
    if (a[k] == 1) return k;
  }
  return -1;
}

CoefficientGroups group_terms(const SymbolModel& model) {
  if (model.order() != 1) {
    throw Error(ErrorCode::config, "operator assembly supports order m0 = 1 only, model '" +
                                       model.name() + "' has order " +
                                       std::to_string(model.order()));
  }
  const int d = model.dimension();
  CoefficientGroups g;
  for (const auto& term : model.terms()) {
    const int a = order_of(term.nu), b = order_of(term.nubar);
    if (a == 0 && b == 0) {
      g.potential.push_back(term.coefficient);
    } else if (a == 1 && b == 1) {
      const int i = single_axis(term.nu, d), j = single_axis(term.nubar, d);
      if (i == j) g.diagonal[i].push_back(term.coefficient);
      else g.off_diagonal[{i, j}].push_back(term.coefficient);
    } else {
      throw Error(ErrorCode::config,
                  "first-order terms " + index_string(term.nu, d) + ";" + index_string(term.nubar, d) +
                      " make the operator non-real; only |nu| = |nubar| terms are assembled");
    }
  }
  return g;
}

using Sampler = std::function<double(const std::vector<std::shared_ptr<const ScalarField>>&,
                                     std::span<const double>)>;

void check_resolution(const OperatorGrid& grid, double h) {
  const double limit = max_spacing(h, grid.stencil_order);
  for (int k = 0; k < grid.dimension; ++k) {
    if (grid.points[k] < 1) throw Error(ErrorCode::invalid_argument, "grid needs at least one point per axis");
    if (grid.spacing(k) > limit * (1.0 + 1e-12)) {
      const int required =
          static_cast<int>(std::ceil((grid.upper[k] - grid.lower[k]) / limit)) - 1;
      throw Error(ErrorCode::resolution,
                  "grid axis " + std::to_string(k + 1) + " has spacing " + fmt(grid.spacing(k)) +
                      " > " + fmt(limit) + " at h = " + fmt(h) + "; at least " +
                      std::to_string(required) + " points are required");
    }
  }
}

double check_confinement(const SymbolModel& model, const OperatorGrid& grid) {
  if (std::isnan(grid.energy_ceiling)) return std::numeric_limits<double>::quiet_NaN();
  const double m = face_minimum(model, grid.lower, grid.upper);
  const double gap = m - grid.energy_ceiling;
  if (!(gap > 0.0)) {
    throw Error(ErrorCode::confinement,
                "min of a0 on the box boundary is " + fmt(m) + ", not above the energy " +
                    fmt(grid.energy_ceiling) + "; enlarge the box");
  }
  return gap;
}

struct Parts {
  SparseMatrix form;     // coefficient part
  SparseMatrix shift;    // I - h^2 Laplacian
};

Parts build_parts(const CoefficientGroups& groups, const Sampler& sample,
                  double h, const OperatorGrid& grid) {
  const int d = grid.dimension;
  Layout L{d};
  for (int k = 0; k < d; ++k) L.n[k] = grid.points[k];
  const int N = static_cast<int>(L.size());
  const double h2 = h * h;
  SparseMatrix form(N, N), laplace(N, N);
  std::vector<double> x(d);
  for (int k = 0; k < d; ++k) {
    const SparseMatrix D = staggered_derivative(L, k, grid.spacing(k), grid.stencil_order);
    laplace += SparseMatrix(D.transpose() * D);
    if (groups.diagonal[k].empty()) continue;
    Layout edges = L;
    edges.n[k] = L.n[k] + 1;
    Eigen::VectorXd w(static_cast<int>(edges.size()));
    for (std::size_t r = 0; r < edges.size(); ++r) {
      const auto e = edges.unflatten(r);
      for (int m = 0; m < d; ++m) {
        x[m] = m == k ? grid.lower[m] + (e[m] + 0.5) * grid.spacing(m) : grid.node(m, e[m]);
      }
      w[static_cast<int>(r)] = h2 * sample(groups.diagonal[k], x);
    }
    form += SparseMatrix(D.transpose() * w.asDiagonal() * D);
  }
  auto node_position = [&](std::size_t r) {
    const auto i = L.unflatten(r);
    for (int m = 0; m < d; ++m) x[m] = grid.node(m, i[m]);
  };
  for (const auto& [key, fields] : groups.off_diagonal) {
    const SparseMatrix Gi = centered_derivative(L, key.first, grid.spacing(key.first), grid.stencil_order);
    const SparseMatrix Gj = centered_derivative(L, key.second, grid.spacing(key.second), grid.stencil_order);
    Eigen::VectorXd w(N);
    for (int r = 0; r < N; ++r) {
      node_position(static_cast<std::size_t>(r));
      w[r] = h2 * sample(fields, x);
    }
    form += SparseMatrix(Gj.transpose() * w.asDiagonal() * Gi);
  }
  if (!groups.potential.empty()) {
    Triplets t;
    for (int r = 0; r < N; ++r) {
      node_position(static_cast<std::size_t>(r));
      t.emplace_back(r, r, sample(groups.potential, x));
    }
    SparseMatrix V(N, N);
    V.setFromTriplets(t.begin(), t.end());
    form += V;
  }
  SparseMatrix I(N, N);
  I.setIdentity();
  // Exact symmetry with an explicit diagonal.
  form = SparseMatrix(0.5 * (form + SparseMatrix(form.transpose())) + 0.0 * I);
  form.makeCompressed();
  Parts p;
  p.form = form;
  p.shift = I + h2 * laplace;
  p.shift.makeCompressed();
  return p;
}

double sum_fields(const std::vector<std::shared_ptr<const ScalarField>>& fields,
                  std::span<const double> x) {
  double s = 0.0;
  for (const auto& f : fields) s += f->value(x);
  return s;
}

CoefficientGroups regularize_groups(const CoefficientGroups& g, double h, double delta0,
                                    double r0, std::shared_ptr<const MollifierKernel> kernel) {
  auto reg = [&](const std::vector<std::shared_ptr<const ScalarField>>& in) {
    std::vector<std::shared_ptr<const ScalarField>> out;
    for (const auto& f : in) out.push_back(regularize(f, h, delta0, r0, kernel));
    return out;
  };
  CoefficientGroups r;
  for (int k = 0; k < kMaxDim; ++k) r.diagonal[k] = reg(g.diagonal[k]);
  for (const auto& [key, v] : g.off_diagonal) r.off_diagonal[key] = reg(v);
  r.potential = reg(g.potential);
  return r;
}

void validate_grid(const SymbolModel& model, const OperatorGrid& grid, double h) {
  if (grid.dimension != model.dimension()) {
    throw Error(ErrorCode::dimension_mismatch, "grid dimension differs from the model");
  }
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be > 0");
  check_resolution(grid, h);
}

}  // namespace

OperatorGrid confining_grid(const SymbolModel& model, double h, double energy, double gap,
                            int stencil_order, double max_extent) {
  const int d = model.dimension();
  OperatorGrid g;
  g.dimension = d;
  g.stencil_order = stencil_order;
  g.energy_ceiling = energy;
  std::array<double, kMaxDim> R{};
  for (int k = 0; k < d; ++k) R[k] = 0.25;
  for (int iter = 0; iter < 400; ++iter) {
    bool done = true;
    std::array<double, kMaxDim> lo{}, hi{};
    for (int k = 0; k < d; ++k) lo[k] = -R[k], hi[k] = R[k];
    for (int k = 0; k < d; ++k) {
      if (face_minimum(model, lo, hi, k) < energy + gap) {
        R[k] *= 1.02;
        done = false;
      }
    }
    if (done) break;
    for (int k = 0; k < d; ++k) {
      if (R[k] > max_extent) {
        throw Error(ErrorCode::confinement, "sublevel set {a0 < " + fmt(energy + gap) +
                                                "} is not confined within |x| <= " + fmt(max_extent));
      }
    }
  }
  const double limit = max_spacing(h, stencil_order);
  for (int k = 0; k < d; ++k) {
    g.lower[k] = -R[k];
    g.upper[k] = R[k];
    g.points[k] = std::max(1, static_cast<int>(std::ceil(2.0 * R[k] / limit)) - 1);
  }
  return g;
}

DiscreteOperator::DiscreteOperator(double h, OperatorGrid grid, OperatorVariant variant,
                                   SparseMatrix matrix, double confinement_gap)
    : h_(h), grid_(grid), variant_(variant), matrix_(std::move(matrix)),
      confinement_gap_(confinement_gap) {}

double DiscreteOperator::quadratic_form(const Eigen::VectorXd& u) const {
  if (u.size() != matrix_.rows()) throw Error(ErrorCode::dimension_mismatch, "vector size differs from the operator");
  return u.dot(matrix_ * u);
}

bool DiscreteOperator::is_tridiagonal() const {
  for (int c = 0; c < matrix_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(matrix_, c); it; ++it) {
      if (std::abs(it.row() - c) > 1 && it.value() != 0.0) return false;
    }
  }
  return true;
}

std::array<DiscreteOperator, 3> assemble_bracket(const SymbolModel& model,
                                                 std::shared_ptr<const MollifierKernel> kernel,
                                                 double h, double delta0, const OperatorGrid& grid) {
  validate_grid(model, grid, h);
  if (!kernel) throw Error(ErrorCode::invalid_argument, "plus/minus variants need a mollifier");
  const double gap = check_confinement(model, grid);
  const CoefficientGroups raw = group_terms(model);
  const CoefficientGroups reg = regularize_groups(raw, h, delta0, model.holder_exponent(), kernel);
  const Parts raw_parts = build_parts(raw, sum_fields, h, grid);
  const Parts reg_parts = build_parts(reg, sum_fields, h, grid);
  SparseMatrix plus = reg_parts.form + h * reg_parts.shift;
  SparseMatrix minus = reg_parts.form - h * reg_parts.shift;
  return {DiscreteOperator(h, grid, OperatorVariant::raw, raw_parts.form, gap),
          DiscreteOperator(h, grid, OperatorVariant::plus, plus, gap),
          DiscreteOperator(h, grid, OperatorVariant::minus, minus, gap)};
}

DiscreteOperator assemble(const SymbolModel& model, std::shared_ptr<const MollifierKernel> kernel,
                          double h, double delta0, const OperatorGrid& grid,
                          OperatorVariant variant) {
  validate_grid(model, grid, h);
  const double gap = check_confinement(model, grid);
  CoefficientGroups groups = group_terms(model);
  if (variant == OperatorVariant::raw) {
    return DiscreteOperator(h, grid, variant, build_parts(groups, sum_fields, h, grid).form, gap);
  }
  if (!kernel) throw Error(ErrorCode::invalid_argument, "plus/minus variants need a mollifier");
  groups = regularize_groups(groups, h, delta0, model.holder_exponent(), kernel);
  const Parts parts = build_parts(groups, sum_fields, h, grid);
  const double sign = variant == OperatorVariant::plus ? 1.0 : -1.0;
  SparseMatrix m = parts.form + sign * h * parts.shift;
  return DiscreteOperator(h, grid, variant, m, gap);
}

namespace {

double matrix_scale(const SparseMatrix& m) {
  double s = 0.0;
  for (int c = 0; c < m.outerSize(); ++c) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) row += std::abs(it.value());
    s = std::max(s, row);
  }
  return std::max(s, 1.0);
}

// Negative eigenvalue count of a tridiagonal matrix minus x; nullopt on a zero pivot.
std::optional<std::size_t> sturm_count(const std::vector<double>& diag,
                                       const std::vector<double>& off, double x, double tiny) {
  std::size_t neg = 0;
  double q = diag[0] - x;
  for (std::size_t i = 0;; ++i) {
    if (std::abs(q) <= tiny) return std::nullopt;
    if (q < 0) ++neg;
    if (i + 1 == diag.size()) break;
    q = diag[i + 1] - x - off[i] * off[i] / q;
  }
  return neg;
}

void tridiagonal_parts(const SparseMatrix& m, std::vector<double>& diag, std::vector<double>& off) {
  const int n = static_cast<int>(m.rows());
  diag.assign(n, 0.0);
  off.assign(std::max(0, n - 1), 0.0);
  for (int c = 0; c < n; ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (it.row() == c) diag[c] = it.value();
      else if (it.row() == c + 1) off[c] = it.value();
    }
  }
}

using LdltSolver = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

class InertiaCounter {
 public:
  explicit InertiaCounter(const DiscreteOperator& op) : op_(op), scale_(matrix_scale(op.matrix())) {
    tridiagonal_ = op.matrix().rows() > 0 && op.is_tridiagonal();
    identity_.resize(op.matrix().rows(), op.matrix().cols());
    identity_.setIdentity();
    if (tridiagonal_) tridiagonal_parts(op.matrix(), diag_, off_);
    else solver_.analyzePattern(op.matrix() - identity_);
  }

  double scale() const { return scale_; }
  bool tridiagonal() const { return tridiagonal_; }
  const std::vector<double>& diagonal() const { return diag_; }
  const std::vector<double>& off_diagonal() const { return off_; }

  // Eigenvalue count below energy (+ shift); shift and method are reported.
  std::size_t count(double energy, double* shift_used = nullptr, std::string* method = nullptr) {
    double shift = 0.0;
    std::string log;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const double x = energy + shift;
      if (tridiagonal_) {
        if (auto c = sturm_count(diag_, off_, x, 1e-14 * scale_)) {
          if (shift_used) *shift_used = shift;
          if (method) *method = "sturm";
          return *c;
        }
        log += " attempt " + std::to_string(attempt) + ": zero pivot;";
      } else if (factor(x)) {
        const Eigen::VectorXd D = solver_.vectorD();
        const double tiny = 1e-14 * scale_;
        bool ok = true;
        std::size_t neg = 0;
        for (int i = 0; i < D.size(); ++i) {
          if (!std::isfinite(D[i]) || std::abs(D[i]) <= tiny) ok = false;
          if (D[i] < 0) ++neg;
        }
        if (ok) {
          if (shift_used) *shift_used = shift;
          if (method) *method = "inertia";
          return neg;
        }
        log += " attempt " + std::to_string(attempt) + ": pivot below " + fmt(tiny) + ";";
      } else {
        log += " attempt " + std::to_string(attempt) + ": factorization failed;";
      }
      shift += 1e-10 * std::max(1.0, std::abs(energy));
    }
    throw Error(ErrorCode::numerical, "symmetric factorization broke down at E = " + fmt(energy) +
                                          " after 3 perturbations:" + log);
  }

  // Factorization of M - x for shift-invert solves.
  bool factor(double x) {
    solver_.factorize(op_.matrix() - x * identity_);
    return solver_.info() == Eigen::Success;
  }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return solver_.solve(b); }

 private:
  const DiscreteOperator& op_;
  double scale_;
  bool tridiagonal_ = false;
  std::vector<double> diag_, off_;
  SparseMatrix identity_;
  LdltSolver solver_;
};

double gershgorin_lower(const SparseMatrix& m) {
  double lo = std::numeric_limits<double>::infinity();
  for (int c = 0; c < m.outerSize(); ++c) {
    double diag = 0.0, rad = 0.0;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (it.row() == c) diag = it.value();
      else rad += std::abs(it.value());
    }
    lo = std::min(lo, diag - rad);
  }
  return lo;
}

// Eigenvalues in (lo, hi] by shift-invert subspace iteration with Rayleigh-Ritz.
void subspace_slice(const DiscreteOperator& op, InertiaCounter& counter, double lo, double hi,
                    std::size_t expected, std::vector<double>& out, std::uint64_t stream) {
  if (expected == 0) return;
  const SparseMatrix& M = op.matrix();
  const int n = static_cast<int>(M.rows());
  const int p = std::min<int>(n, static_cast<int>(expected) + std::min<int>(static_cast<int>(expected), 16) + 8);
  const double sigma = 0.5 * (lo + hi) + 1e-7 * (hi - lo);
  if (!counter.factor(sigma)) throw Error(ErrorCode::numerical, "shift-invert factorization failed at " + fmt(sigma));
  CounterStream rng(0x51ce, stream);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) X(i, j) = rng.uniform(-1.0, 1.0);
  }
  const double tol = 1e-9 * counter.scale();
  for (int iter = 0; iter < 600; ++iter) {
    Eigen::MatrixXd Y = counter.solve(X);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    Eigen::MatrixXd MQ = M * Q;
    Eigen::MatrixXd T = Q.transpose() * MQ;
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    X = Q * es.eigenvectors();
    Eigen::MatrixXd R = MQ * es.eigenvectors() - X * es.eigenvalues().asDiagonal();
    std::vector<double> found;
    bool converged = true;
    for (int j = 0; j < p; ++j) {
      const double theta = es.eigenvalues()[j];
      if (theta <= lo || theta > hi) continue;
      if (R.col(j).norm() > tol) converged = false;
      found.push_back(theta);
    }
    if (converged && found.size() == expected) {
      out.insert(out.end(), found.begin(), found.end());
      return;
    }
  }
  throw Error(ErrorCode::incomplete, "shift-invert iteration did not resolve " +
                                         std::to_string(expected) + " eigenvalues in (" + fmt(lo) +
                                         ", " + fmt(hi) + "]; use a larger subspace");
}

void slice_recursive(const DiscreteOperator& op, InertiaCounter& counter, double lo, double hi,
                     std::size_t c_lo, std::size_t c_hi, std::vector<double>& out, int depth,
                     std::uint64_t& stream) {
  const std::size_t k = c_hi - c_lo;
  if (k == 0) return;
  if (k <= 48 || depth > 60) {
    subspace_slice(op, counter, lo, hi, k, out, stream++);
    return;
  }
  const double mid = 0.5 * (lo + hi);
  const std::size_t c_mid = counter.count(mid);
  slice_recursive(op, counter, lo, mid, c_lo, c_mid, out, depth + 1, stream);
  slice_recursive(op, counter, mid, hi, c_mid, c_hi, out, depth + 1, stream);
}

}  // namespace

SpectrumSlice count_below(const DiscreteOperator& op, double energy) {
  InertiaCounter counter(op);
  SpectrumSlice s;
  s.threshold = energy;
  s.count = counter.count(energy, &s.shift, &s.method);
  return s;
}

SpectrumSlice eigenvalues_below(const DiscreteOperator& op, double energy, double margin) {
  if (!(margin >= 0.0)) throw Error(ErrorCode::invalid_argument, "margin must be >= 0");
  InertiaCounter counter(op);
  SpectrumSlice s;
  s.threshold = energy;
  s.margin = margin;
  s.has_eigenvalues = true;
  const double top = energy + margin;
  double shift_top = 0.0;
  s.count = counter.count(energy, &s.shift);
  const std::size_t count_top = counter.count(top, &shift_top);
  if (count_top > 50000) {
    throw Error(ErrorCode::incomplete, std::to_string(count_top) + " eigenvalues below " + fmt(top) +
                                           " exceed the 50000 limit");
  }
  std::vector<double> values;
  const SparseMatrix& M = op.matrix();
  if (count_top == 0) {
    s.method = "inertia";
  } else if (counter.tridiagonal()) {
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(counter.diagonal().data(), counter.diagonal().size());
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(counter.off_diagonal().data(), counter.off_diagonal().size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) values.push_back(es.eigenvalues()[i]);
    s.method = "tridiagonal";
  } else if (M.rows() <= 4000) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(M), Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) values.push_back(es.eigenvalues()[i]);
    s.method = "dense";
  } else {
    const double lo = gershgorin_lower(M) - 1.0;
    std::uint64_t stream = 0;
    slice_recursive(op, counter, lo, top + shift_top, 0, count_top, values, 0, stream);
    s.method = "shift_invert";
  }
  std::sort(values.begin(), values.end());
  for (double v : values) {
    if (v <= top + shift_top) s.eigenvalues.push_back(v);
  }
  const auto below = static_cast<std::size_t>(
      std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(),
                    [&](double v) { return v < energy + s.shift; }));
  if (s.eigenvalues.size() != count_top || below != s.count) {
    throw Error(ErrorCode::incomplete,
                "eigenvalue list (" + std::to_string(s.eigenvalues.size()) + " <= " + fmt(top) + ", " +
                    std::to_string(below) + " < " + fmt(energy) + ") disagrees with inertia counts (" +
                    std::to_string(count_top) + ", " + std::to_string(s.count) + ")");
  }
  return s;
}

}  // namespace weylab
