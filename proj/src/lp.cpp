#include "lamiq/lp.hpp"

#include <limits>

namespace lamiq {

namespace {

constexpr std::size_t kDegenerateStreak = 50;
constexpr std::uint32_t kPseudo = std::numeric_limits<std::uint32_t>::max();

struct Tableau {
  const HalfspaceSystem& sys;
  std::size_t n;
  QVector x;
  QVector slack;
  std::vector<std::uint32_t> basis;  // kPseudo marks a free coordinate placeholder
  std::vector<bool> in_basis;
  std::vector<QVector> dirs;         // dirs[j]: basis[i]·dirs[j] = δ_ij
  std::size_t pivots = 0;

  explicit Tableau(const HalfspaceSystem& s) : sys(s), n(s.dim()) {
    x = zero_vector(n);
    slack = s.rhs;
    basis.assign(n, kPseudo);
    in_basis.assign(s.size(), false);
    dirs.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      dirs[j] = zero_vector(n);
      dirs[j][j] = 1;
    }
  }

  // Moves along d until the first blocking constraint; returns its index and the step.
  // Ties go to the smallest constraint index.
  std::uint32_t ratio_test(const QVector& d, QVector& rates, Rational& step) const {
    std::uint32_t best = kPseudo;
    rates.resize(sys.size());
    for (std::uint32_t k = 0; k < sys.size(); ++k) {
      if (in_basis[k]) continue;
      rates[k] = dot(sys.normals[k], d);
      if (sgn(rates[k]) <= 0) continue;
      if (best == kPseudo) {
        best = k;
        step = slack[k] / rates[k];
        continue;
      }
      // slack[k]/rates[k] < step  <=>  slack[k] < step·rates[k]
      if (sgn(slack[k]) == 0 && sgn(step) == 0) continue;
      const Rational r = slack[k] / rates[k];
      if (r < step) {
        step = r;
        best = k;
      }
    }
    return best;
  }

  void pivot(std::size_t j, const QVector& d, std::uint32_t k, const Rational& step, const QVector& rates) {
    if (sgn(step) != 0) {
      for (std::size_t i = 0; i < n; ++i) x[i] += step * d[i];
      for (std::uint32_t m = 0; m < sys.size(); ++m)
        if (!in_basis[m] && m != k) slack[m] -= step * rates[m];
    }
    slack[k] = 0;
    const QVector& a = sys.normals[k];
    QVector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = dot(a, dirs[i]);
    const Rational wj = w[j];
    for (std::size_t i = 0; i < n; ++i) dirs[j][i] /= wj;
    for (std::size_t l = 0; l < n; ++l) {
      if (l == j || sgn(w[l]) == 0) continue;
      for (std::size_t i = 0; i < n; ++i) dirs[l][i] -= w[l] * dirs[j][i];
    }
    if (basis[j] != kPseudo) in_basis[basis[j]] = false;
    basis[j] = k;
    in_basis[k] = true;
    ++pivots;
  }
};

}  // namespace

LPResult maximize(const HalfspaceSystem& sys, const QVector& c) {
  const std::size_t n = sys.dim();
  if (n == 0 || sys.rhs.size() != sys.size()) throw InvalidInput("malformed halfspace system");
  if (c.size() != n) throw InvalidInput("objective has the wrong dimension");
  for (const Rational& r : sys.rhs)
    if (sgn(r) <= 0) throw InvalidInput("the origin must lie strictly inside the polytope");

  Tableau t(sys);
  QVector rates;
  Rational step;

  // Drive the free-coordinate placeholders out of the basis to reach a vertex.
  for (std::size_t j = 0; j < n; ++j) {
    QVector d = t.dirs[j];
    if (dot(c, d) < 0) d = scale(d, Rational(-1));
    std::uint32_t k = t.ratio_test(d, rates, step);
    if (k == kPseudo) {
      d = scale(d, Rational(-1));
      k = t.ratio_test(d, rates, step);
      if (k == kPseudo) throw InvalidInput("polytope is unbounded");
    }
    t.pivot(j, d, k, step, rates);
  }

  std::size_t degenerate = 0;
  bool bland = false;
  for (;;) {
    // λ_j = c·dirs[j]; optimal when every λ_j ≥ 0.
    std::size_t leave = n;
    Rational most;
    for (std::size_t j = 0; j < n; ++j) {
      const Rational lam = dot(c, t.dirs[j]);
      if (sgn(lam) >= 0) continue;
      if (bland) {
        if (leave == n || t.basis[j] < t.basis[leave]) leave = j;
      } else if (leave == n || lam < most) {
        leave = j;
        most = lam;
      }
    }
    if (leave == n) break;
    const QVector d = scale(t.dirs[leave], Rational(-1));
    const std::uint32_t k = t.ratio_test(d, rates, step);
    if (k == kPseudo) throw InvalidInput("linear program is unbounded");
    const std::uint32_t old = t.basis[leave];
    t.pivot(leave, d, k, step, rates);
    // The leaving constraint becomes slack by exactly the step along its outward normal.
    t.slack[old] = step;
    if (sgn(step) == 0) {
      if (++degenerate >= kDegenerateStreak) bland = true;
    } else {
      degenerate = 0;
    }
  }

  LPResult out;
  out.x = t.x;
  out.basis = t.basis;
  out.pivots = t.pivots;
  for (std::uint32_t k = 0; k < sys.size(); ++k)
    if (sgn(t.slack[k]) == 0) out.active.push_back(k);
  return out;
}

}  // namespace lamiq
