// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace weylab {

inline constexpr int kMaxDim = 3;

// Value, gradient and Hessian of a scalar function of up to kMaxDim variables.
struct Jet2 {
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim * kMaxDim> H{};

  double hess(int i, int j) const { return H[i * kMaxDim + j]; }
  double& hess(int i, int j) { return H[i * kMaxDim + j]; }
};

Jet2 jet_constant(double c);
Jet2 jet_variable(int index, double value);
Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator*(double s, const Jet2& a);
// Chain rule for a scalar function with value f0, first derivative f1, second f2.
Jet2 compose(const Jet2& u, double f0, double f1, double f2);

// C-infinity step: 1 for u <= r1, 0 for u >= r2; returns value and two derivatives in u.
std::array<double, 3> smooth_cutoff(double u, double r1, double r2);

struct ExprNode;

// Immutable expression tree over the variables x1..x3.
class Expr {
 public:
  Expr();
  static Expr constant(double c);
  static Expr variable(int index);
  static Expr power(const Expr& base, int exponent);
  static Expr abspow(const Expr& base, double exponent);
  static Expr cutoff(const Expr& base, double r1, double r2);
  static Expr reciprocal(const Expr& base);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  double value(std::span<const double> x) const;
  Jet2 jet(std::span<const double> x) const;
  bool is_constant() const;
  // One past the largest variable index referenced (0 if none).
  int variable_count() const;
  std::string to_string() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
  friend struct ExprNode;
};

// Grammar: sums, products, quotients, unary minus, integer powers '^', parentheses,
// numbers, variables x1..x3 (x means x1), abspow(e, p), cutoff(e, r1, r2).
Expr parse_expression(std::string_view text);

}  // namespace weylab
