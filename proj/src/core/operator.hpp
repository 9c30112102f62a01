// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "core/mollify.hpp"
#include "core/symbols.hpp"

namespace weylab {

enum class OperatorVariant { raw, plus, minus };
const char* variant_name(OperatorVariant v);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Dirichlet box with interior nodes x_i = lower + (i+1) dx, dx = (upper-lower)/(points+1).
struct OperatorGrid {
  int dimension = 1;
  std::array<double, kMaxDim> lower{};
  std::array<double, kMaxDim> upper{};
  std::array<int, kMaxDim> points{};
  int stencil_order = 2;  // 2 or 4
  // Largest energy that will be counted; the box boundary must lie above it.
  double energy_ceiling = std::numeric_limits<double>::quiet_NaN();

  double spacing(int k) const { return (upper[k] - lower[k]) / (points[k] + 1); }
  std::size_t unknowns() const;
  double node(int k, int i) const { return lower[k] + (i + 1) * spacing(k); }
};

// Largest spacing admitted at a given h: h/4 for second-order stencils, h/2 for fourth-order.
double max_spacing(double h, int stencil_order);

// Symmetric box where min over momentum of a0 exceeds energy + gap on the boundary,
// with spacing max_spacing(h, order).
OperatorGrid confining_grid(const SymbolModel& model, double h, double energy, double gap,
                            int stencil_order = 2, double max_extent = 50.0);

class DiscreteOperator {
 public:
  DiscreteOperator(double h, OperatorGrid grid, OperatorVariant variant, SparseMatrix matrix,
                   double confinement_gap);
  double h() const { return h_; }
  const OperatorGrid& grid() const { return grid_; }
  OperatorVariant variant() const { return variant_; }
  const SparseMatrix& matrix() const { return matrix_; }
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  double confinement_gap() const { return confinement_gap_; }
  double quadratic_form(const Eigen::VectorXd& u) const;
  bool is_tridiagonal() const;

 private:
  double h_;
  OperatorGrid grid_;
  OperatorVariant variant_;
  SparseMatrix matrix_;
  double confinement_gap_;
};

// Requires m0 = 1 and zero first-order terms. Variants plus/minus mollify the coefficients
// at scale h^delta0 and add +/- h (I - h^2 Laplacian).
DiscreteOperator assemble(const SymbolModel& model,
                          std::shared_ptr<const MollifierKernel> kernel, double h, double delta0,
                          const OperatorGrid& grid, OperatorVariant variant);

// raw, plus, minus sharing one coefficient evaluation.
std::array<DiscreteOperator, 3> assemble_bracket(const SymbolModel& model,
                                                 std::shared_ptr<const MollifierKernel> kernel,
                                                 double h, double delta0, const OperatorGrid& grid);

struct SpectrumSlice {
  double threshold = 0.0;
  std::size_t count = 0;
  bool has_eigenvalues = false;
  std::vector<double> eigenvalues;  // ascending, all <= threshold + margin
  double margin = 0.0;
  std::string method;               // "inertia", "sturm", "dense", "tridiagonal", "lanczos"
  double shift = 0.0;               // perturbation applied to avoid a zero pivot
};

// Number of eigenvalues below E from the inertia of M - E.
SpectrumSlice count_below(const DiscreteOperator& op, double energy);

// All eigenvalues <= E + margin, cross-checked against inertia counts.
SpectrumSlice eigenvalues_below(const DiscreteOperator& op, double energy, double margin);

}  // namespace weylab
