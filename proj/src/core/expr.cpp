// SPDX-License-Identifier: Apache-2.0
#include "core/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "core/error.hpp"

namespace weylab {

Jet2 jet_constant(double c) {
  Jet2 j;
  j.v = c;
  return j;
}

Jet2 jet_variable(int index, double value) {
  Jet2 j;
  j.v = value;
  j.g[index] = 1.0;
  return j;
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.v = a.v + b.v;
  for (int i = 0; i < kMaxDim; ++i) r.g[i] = a.g[i] + b.g[i];
  for (int i = 0; i < kMaxDim * kMaxDim; ++i) r.H[i] = a.H[i] + b.H[i];
  return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-1.0) * b; }

Jet2 operator*(double s, const Jet2& a) {
  Jet2 r;
  r.v = s * a.v;
  for (int i = 0; i < kMaxDim; ++i) r.g[i] = s * a.g[i];
  for (int i = 0; i < kMaxDim * kMaxDim; ++i) r.H[i] = s * a.H[i];
  return r;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.v = a.v * b.v;
  for (int i = 0; i < kMaxDim; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
  for (int i = 0; i < kMaxDim; ++i) {
    for (int j = 0; j < kMaxDim; ++j) {
      r.hess(i, j) = a.v * b.hess(i, j) + b.v * a.hess(i, j) + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
  }
  return r;
}

Jet2 compose(const Jet2& u, double f0, double f1, double f2) {
  Jet2 r;
  r.v = f0;
  for (int i = 0; i < kMaxDim; ++i) r.g[i] = f1 * u.g[i];
  for (int i = 0; i < kMaxDim; ++i) {
    for (int j = 0; j < kMaxDim; ++j) {
      r.hess(i, j) = f2 * u.g[i] * u.g[j] + f1 * u.hess(i, j);
    }
  }
  return r;
}

namespace {

// exp(-1/t) for t > 0 with its first two derivatives.
std::array<double, 3> flat_exp(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  const double f = std::exp(-1.0 / t);
  const double t2 = t * t;
  return {f, f / t2, f * (1.0 / (t2 * t2) - 2.0 / (t2 * t))};
}

std::array<double, 3> abspow_derivs(double u, double p) {
  const double a = std::abs(u);
  const double s = u < 0.0 ? -1.0 : 1.0;
  if (a == 0.0) {
    const double d1 = p > 1.0 ? 0.0 : (p == 1.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const double d2 = p > 2.0 ? 0.0
                      : p == 2.0 ? 2.0
                                 : std::numeric_limits<double>::infinity();
    return {p > 0.0 ? 0.0 : 1.0, d1, d2};
  }
  return {std::pow(a, p), p * std::pow(a, p - 1.0) * s, p * (p - 1.0) * std::pow(a, p - 2.0)};
}

}  // namespace

std::array<double, 3> smooth_cutoff(double u, double r1, double r2) {
  const double a = std::abs(u);
  if (a <= r1) return {1.0, 0.0, 0.0};
  if (a >= r2) return {0.0, 0.0, 0.0};
  const double w = r2 - r1;
  const double t = (a - r1) / w;
  const auto f = flat_exp(t);
  const auto g = flat_exp(1.0 - t);
  // S = f / (f + g) in t; g' = -flat'(1-t), g'' = flat''(1-t).
  const double g1 = -g[1], g2 = g[2];
  const double q = f[0] + g[0];
  const double q1 = f[1] + g1;
  const double q2 = f[2] + g2;
  const double S = f[0] / q;
  const double S1 = (f[1] - S * q1) / q;
  const double S2 = (f[2] - 2.0 * S1 * q1 - S * q2) / q;
  const double sgn = u < 0.0 ? -1.0 : 1.0;
  return {1.0 - S, -S1 / w * sgn, -S2 / (w * w)};
}

enum class ExprKind { constant, variable, add, sub, mul, neg, power, abspow, cutoff, reciprocal };

struct ExprNode {
  ExprKind kind = ExprKind::constant;
  double c = 0.0;   // constant value or abspow exponent
  double r1 = 0.0;  // cutoff radii
  double r2 = 0.0;
  int index = 0;    // variable index or integer exponent
  std::shared_ptr<const ExprNode> a;
  std::shared_ptr<const ExprNode> b;

  static Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }
  static const std::shared_ptr<const ExprNode>& of(const Expr& e) { return e.node_; }
};

namespace {

double eval_value(const ExprNode& n, std::span<const double> x) {
  switch (n.kind) {
    case ExprKind::constant: return n.c;
    case ExprKind::variable:
      if (n.index >= static_cast<int>(x.size())) {
        throw Error(ErrorCode::dimension_mismatch, "expression variable x" +
                                                       std::to_string(n.index + 1) +
                                                       " exceeds the point dimension");
      }
      return x[n.index];
    case ExprKind::add: return eval_value(*n.a, x) + eval_value(*n.b, x);
    case ExprKind::sub: return eval_value(*n.a, x) - eval_value(*n.b, x);
    case ExprKind::mul: return eval_value(*n.a, x) * eval_value(*n.b, x);
    case ExprKind::neg: return -eval_value(*n.a, x);
    case ExprKind::power: return std::pow(eval_value(*n.a, x), n.index);
    case ExprKind::abspow: return abspow_derivs(eval_value(*n.a, x), n.c)[0];
    case ExprKind::cutoff: return smooth_cutoff(eval_value(*n.a, x), n.r1, n.r2)[0];
    case ExprKind::reciprocal: return 1.0 / eval_value(*n.a, x);
  }
  return 0.0;
}

Jet2 eval_jet(const ExprNode& n, std::span<const double> x) {
  switch (n.kind) {
    case ExprKind::constant: return jet_constant(n.c);
    case ExprKind::variable:
      if (n.index >= static_cast<int>(x.size()) || n.index >= kMaxDim) {
        throw Error(ErrorCode::dimension_mismatch, "expression variable x" +
                                                       std::to_string(n.index + 1) +
                                                       " exceeds the point dimension");
      }
      return jet_variable(n.index, x[n.index]);
    case ExprKind::add: return eval_jet(*n.a, x) + eval_jet(*n.b, x);
    case ExprKind::sub: return eval_jet(*n.a, x) - eval_jet(*n.b, x);
    case ExprKind::mul: return eval_jet(*n.a, x) * eval_jet(*n.b, x);
    case ExprKind::neg: return (-1.0) * eval_jet(*n.a, x);
    case ExprKind::power: {
      const Jet2 u = eval_jet(*n.a, x);
      const int k = n.index;
      if (k == 0) return jet_constant(1.0);
      const double f0 = std::pow(u.v, k);
      const double f1 = k * std::pow(u.v, k - 1);
      const double f2 = k >= 2 ? k * (k - 1) * std::pow(u.v, k - 2) : 0.0;
      return compose(u, f0, f1, f2);
    }
    case ExprKind::abspow: {
      const Jet2 u = eval_jet(*n.a, x);
      const auto f = abspow_derivs(u.v, n.c);
      return compose(u, f[0], f[1], f[2]);
    }
    case ExprKind::cutoff: {
      const Jet2 u = eval_jet(*n.a, x);
      const auto f = smooth_cutoff(u.v, n.r1, n.r2);
      return compose(u, f[0], f[1], f[2]);
    }
    case ExprKind::reciprocal: {
      const Jet2 u = eval_jet(*n.a, x);
      return compose(u, 1.0 / u.v, -1.0 / (u.v * u.v), 2.0 / (u.v * u.v * u.v));
    }
  }
  return {};
}

bool node_constant(const ExprNode& n) {
  switch (n.kind) {
    case ExprKind::constant: return true;
    case ExprKind::variable: return false;
    default:
      return node_constant(*n.a) && (!n.b || node_constant(*n.b));
  }
}

int node_vars(const ExprNode& n) {
  if (n.kind == ExprKind::variable) return n.index + 1;
  if (n.kind == ExprKind::constant) return 0;
  int k = node_vars(*n.a);
  if (n.b) k = std::max(k, node_vars(*n.b));
  return k;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string node_string(const ExprNode& n) {
  switch (n.kind) {
    case ExprKind::constant: return n.c < 0 ? "(" + fmt(n.c) + ")" : fmt(n.c);
    case ExprKind::variable: return "x" + std::to_string(n.index + 1);
    case ExprKind::add: return "(" + node_string(*n.a) + " + " + node_string(*n.b) + ")";
    case ExprKind::sub: return "(" + node_string(*n.a) + " - " + node_string(*n.b) + ")";
    case ExprKind::mul: return "(" + node_string(*n.a) + " * " + node_string(*n.b) + ")";
    case ExprKind::neg: return "(-" + node_string(*n.a) + ")";
    case ExprKind::power: return "(" + node_string(*n.a) + ")^" + std::to_string(n.index);
    case ExprKind::abspow: return "abspow(" + node_string(*n.a) + ", " + fmt(n.c) + ")";
    case ExprKind::cutoff:
      return "cutoff(" + node_string(*n.a) + ", " + fmt(n.r1) + ", " + fmt(n.r2) + ")";
    case ExprKind::reciprocal: return "(1 / " + node_string(*n.a) + ")";
  }
  return {};
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double c) {
  ExprNode n;
  n.kind = ExprKind::constant;
  n.c = c;
  return ExprNode::make(std::move(n));
}

Expr Expr::variable(int index) {
  if (index < 0 || index >= kMaxDim) {
    throw Error(ErrorCode::invalid_argument, "variable index out of range");
  }
  ExprNode n;
  n.kind = ExprKind::variable;
  n.index = index;
  return ExprNode::make(std::move(n));
}

Expr Expr::power(const Expr& base, int exponent) {
  if (exponent < 0) throw Error(ErrorCode::invalid_argument, "integer power must be >= 0");
  ExprNode n;
  n.kind = ExprKind::power;
  n.index = exponent;
  n.a = ExprNode::of(base);
  return ExprNode::make(std::move(n));
}

Expr Expr::abspow(const Expr& base, double exponent) {
  if (!(exponent > 0.0)) throw Error(ErrorCode::invalid_argument, "abspow exponent must be > 0");
  ExprNode n;
  n.kind = ExprKind::abspow;
  n.c = exponent;
  n.a = ExprNode::of(base);
  return ExprNode::make(std::move(n));
}

Expr Expr::cutoff(const Expr& base, double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > r1)) {
    throw Error(ErrorCode::invalid_argument, "cutoff radii must satisfy 0 < r1 < r2");
  }
  ExprNode n;
  n.kind = ExprKind::cutoff;
  n.r1 = r1;
  n.r2 = r2;
  n.a = ExprNode::of(base);
  return ExprNode::make(std::move(n));
}

Expr Expr::reciprocal(const Expr& base) {
  ExprNode n;
  n.kind = ExprKind::reciprocal;
  n.a = ExprNode::of(base);
  return ExprNode::make(std::move(n));
}

namespace {
Expr binary(ExprKind kind, const Expr& a, const Expr& b) {
  ExprNode n;
  n.kind = kind;
  n.a = ExprNode::of(a);
  n.b = ExprNode::of(b);
  return ExprNode::make(std::move(n));
}
}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return binary(ExprKind::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return binary(ExprKind::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return binary(ExprKind::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return a * Expr::reciprocal(b); }
Expr operator-(const Expr& a) {
  ExprNode n;
  n.kind = ExprKind::neg;
  n.a = ExprNode::of(a);
  return ExprNode::make(std::move(n));
}

double Expr::value(std::span<const double> x) const { return eval_value(*node_, x); }
Jet2 Expr::jet(std::span<const double> x) const { return eval_jet(*node_, x); }
bool Expr::is_constant() const { return node_constant(*node_); }
int Expr::variable_count() const { return node_vars(*node_); }
std::string Expr::to_string() const { return node_string(*node_); }

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::config, "expression parse error at offset " + std::to_string(pos_) +
                                       ": " + what + " in '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+')) e = e + product();
      else if (accept('-')) e = e - product();
      else return e;
    }
  }
  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      skip();
      double p = number();
      if (p < 0 || p != std::floor(p)) fail("'^' needs a nonnegative integer; use abspow");
      return Expr::power(base, static_cast<int>(p));
    }
    return base;
  }
  double number() {
    skip();
    const char* begin = s_.data() + pos_;
    char* end = nullptr;
    std::string tmp(begin, s_.size() - pos_);
    double v = std::strtod(tmp.c_str(), &end);
    std::size_t used = static_cast<std::size_t>(end - tmp.c_str());
    if (used == 0) fail("expected a number");
    pos_ += used;
    return v;
  }
  std::string identifier() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number());
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
    const std::string id = identifier();
    if (id == "x") return Expr::variable(0);
    if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '0' + kMaxDim) {
      return Expr::variable(id[1] - '1');
    }
    if (id == "abspow") {
      expect('(');
      Expr e = sum();
      expect(',');
      double p = signed_number();
      expect(')');
      return Expr::abspow(e, p);
    }
    if (id == "cutoff") {
      expect('(');
      Expr e = sum();
      expect(',');
      double r1 = signed_number();
      expect(',');
      double r2 = signed_number();
      expect(')');
      return Expr::cutoff(e, r1, r2);
    }
    fail("unknown identifier '" + id + "'");
  }
  double signed_number() {
    if (accept('-')) return -number();
    return number();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

}  // namespace weylab
