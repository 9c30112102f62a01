// SPDX-License-Identifier: Apache-2.0
#include "core/polysub.hpp"

#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace weylab {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using RPoly = std::vector<Rational>;  // ascending

void trim(RPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

std::vector<double> trimmed(std::span<const double> a) {
  std::vector<double> p(a.begin(), a.end());
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  return p;
}

RPoly derivative(const RPoly& p) {
  RPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<int>(k));
  trim(d);
  return d;
}

// Remainder of a divided by b.
RPoly remainder(RPoly a, const RPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    const Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= f * b[k];
    a.pop_back();
    trim(a);
  }
  return a;
}

int sign_at(const RPoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

struct Sturm {
  std::vector<RPoly> chain;

  explicit Sturm(const RPoly& p) {
    chain.push_back(p);
    chain.push_back(derivative(p));
    while (!chain.back().empty()) {
      RPoly r = remainder(chain[chain.size() - 2], chain.back());
      for (auto& c : r) c = -c;
      if (r.empty()) break;
      chain.push_back(std::move(r));
    }
    if (chain.back().empty()) chain.pop_back();
  }

  int variations(const Rational& x) const {
    int count = 0, last = 0;
    for (const auto& q : chain) {
      const int s = sign_at(q, x);
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }

  // Distinct roots in (a, b].
  int count(const Rational& a, const Rational& b) const { return variations(a) - variations(b); }
};

double polish_root(std::span<const double> p, double lo, double hi) {
  double flo = poly_eval(p, lo);
  if (flo == 0.0) return lo;
  double fhi = poly_eval(p, hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    // Even-multiplicity root: minimize |p| by ternary search on the bracket.
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (std::abs(poly_eval(p, m1)) < std::abs(poly_eval(p, m2))) hi = m2;
      else lo = m1;
    }
    return 0.5 * (lo + hi);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = poly_eval(p, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) lo = mid, flo = fm;
    else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  // Newton polishing.
  std::vector<double> dp;
  for (std::size_t k = 1; k < p.size(); ++k) dp.push_back(p[k] * static_cast<double>(k));
  for (int i = 0; i < 3; ++i) {
    const double d = poly_eval(dp, x);
    if (d == 0.0) break;
    const double nx = x - poly_eval(p, x) / d;
    if (!(nx >= lo - 1e-12 && nx <= hi + 1e-12)) break;
    x = nx;
  }
  return x;
}

void isolate(const Sturm& sturm, std::span<const double> p, Rational a, Rational b, int n,
             std::vector<double>& out, int depth) {
  if (n <= 0) return;
  const double width = static_cast<double>(b - a);
  if (n == 1 || depth > 80 || width < 1e-13) {
    if (n == 1) {
      out.push_back(polish_root(p, static_cast<double>(a), static_cast<double>(b)));
    } else {
      out.push_back(0.5 * static_cast<double>(a + b));
    }
    return;
  }
  const Rational mid = (a + b) / 2;
  const int left = sturm.count(a, mid);
  isolate(sturm, p, a, mid, left, out, depth + 1);
  isolate(sturm, p, mid, b, n - left, out, depth + 1);
}

std::vector<double> companion_roots(std::span<const double> p, double lo, double hi) {
  const int n = static_cast<int>(p.size()) - 1;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  std::vector<double> roots;
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
  for (int i = 0; i < n; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * scale) continue;
    double x = z.real();
    std::vector<double> dp;
    for (std::size_t k = 1; k < p.size(); ++k) dp.push_back(p[k] * static_cast<double>(k));
    for (int it = 0; it < 8; ++it) {
      const double d = poly_eval(dp, x);
      if (d == 0.0) break;
      x -= poly_eval(p, x) / d;
    }
    if (x >= lo && x <= hi) roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-10; }),
              roots.end());
  return roots;
}

}  // namespace

double poly_eval(std::span<const double> a, double s) {
  long double acc = 0.0L;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * s + *it;
  return static_cast<double>(acc);
}

std::vector<double> real_roots(std::span<const double> ascending, double lo, double hi) {
  const std::vector<double> p = trimmed(ascending);
  if (p.size() < 2) return {};
  if (p.size() - 1 > 12) return companion_roots(p, lo, hi);
  RPoly rp;
  for (double c : p) rp.emplace_back(c);
  const Sturm sturm(rp);
  const Rational a(lo), b(hi);
  std::vector<double> roots;
  if (sign_at(rp, a) == 0) roots.push_back(lo);
  isolate(sturm, p, a, b, sturm.count(a, b), roots, 0);
  std::sort(roots.begin(), roots.end());
  return roots;
}

PolySublevelQuery poly_sublevel_measure(std::span<const double> ascending, double tau,
                                        Interval domain) {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "sublevel threshold must be > 0");
  if (!(domain.hi > domain.lo)) throw Error(ErrorCode::invalid_argument, "empty interval");
  const std::vector<double> p = trimmed(ascending);
  if (p.size() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "degree-0 polynomial: the sublevel measure is trivially 0 or |I|");
  }
  PolySublevelQuery q;
  q.coefficients = p;
  q.tau = tau;
  q.domain = domain;
  std::vector<double> upper = p, lower = p;
  upper[0] -= tau;
  lower[0] += tau;
  std::vector<double> cuts = {domain.lo, domain.hi};
  for (double r : real_roots(upper, domain.lo, domain.hi)) cuts.push_back(r);
  for (double r : real_roots(lower, domain.lo, domain.hi)) cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    if (std::abs(poly_eval(p, 0.5 * (a + b))) < tau) {
      if (!q.intervals.empty() && q.intervals.back().hi == a) {
        q.intervals.back().hi = b;
      } else {
        q.intervals.push_back({a, b});
      }
    }
  }
  for (const auto& iv : q.intervals) q.measure += iv.length();
  return q;
}

SublevelLemmaReport verify_sublevel_lemma(std::uint64_t seed, int trials, int m_max, double delta0,
                                          std::span<const double> h_grid, double c_scale) {
  if (trials < 1 || m_max < 1) throw Error(ErrorCode::invalid_argument, "trials and m_max must be >= 1");
  if (h_grid.empty()) throw Error(ErrorCode::invalid_argument, "empty h grid");
  SublevelLemmaReport rep;
  rep.delta0 = delta0;
  rep.c_scale = c_scale;
  rep.h_grid.assign(h_grid.begin(), h_grid.end());
  const double h_cal = *std::max_element(h_grid.begin(), h_grid.end());
  for (int t = 0; t < trials; ++t) {
    CounterStream rng(seed, static_cast<std::uint64_t>(t));
    SublevelTrial tr;
    tr.trial = t;
    tr.degree = 1 + std::min(m_max - 1, static_cast<int>(rng.uniform() * m_max));
    double factorial = 1.0;
    for (int k = 2; k <= tr.degree; ++k) factorial *= k;
    for (int k = 0; k < tr.degree; ++k) tr.coefficients.push_back(rng.uniform(-1.0, 1.0));
    const double lead = (1.0 + rng.uniform()) / factorial;
    tr.coefficients.push_back(rng.uniform() < 0.5 ? -lead : lead);
    rep.trials.push_back(std::move(tr));
  }
  auto tau_of = [&](double h) { return std::pow(c_scale * h, delta0); };
  for (auto& tr : rep.trials) {
    // Cauchy bound: all roots of F -/+ tau lie in [-R, R].
    double R = 0.0;
    const double lead = std::abs(tr.coefficients.back());
    for (double h : h_grid) {
      double bound = 0.0;
      for (std::size_t k = 0; k + 1 < tr.coefficients.size(); ++k) {
        bound = std::max(bound, (std::abs(tr.coefficients[k]) + (k == 0 ? tau_of(h) : 0.0)) / lead);
      }
      R = std::max(R, 1.0 + bound);
    }
    for (double h : h_grid) {
      tr.measures.push_back(poly_sublevel_measure(tr.coefficients, tau_of(h), {-R, R}).measure);
    }
  }
  rep.c_m.assign(m_max, 0.0);
  const auto cal_index = static_cast<std::size_t>(
      std::max_element(h_grid.begin(), h_grid.end()) - h_grid.begin());
  for (const auto& tr : rep.trials) {
    const double rate = std::pow(h_cal, delta0 / tr.degree);
    rep.c_m[tr.degree - 1] = std::max(rep.c_m[tr.degree - 1], tr.measures[cal_index] / rate);
  }
  for (auto& tr : rep.trials) {
    for (std::size_t i = 0; i < h_grid.size(); ++i) {
      const double bound = rep.c_m[tr.degree - 1] * std::pow(h_grid[i], delta0 / tr.degree);
      const bool bad = tr.measures[i] > bound * (1.0 + 1e-12);
      tr.violated.push_back(bad);
      rep.violations += bad ? 1 : 0;
    }
  }
  return rep;
}

}  // namespace weylab
