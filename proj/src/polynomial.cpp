#include "lamiq/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace lamiq {

PolyNu::PolyNu(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
  for (Rational& q : c_) q.canonicalize();
  trim();
}

PolyNu PolyNu::constant(const Rational& c) { return PolyNu({c}); }

PolyNu PolyNu::linear_root(const Rational& r) { return PolyNu({-r, Rational(1)}); }

PolyNu PolyNu::monomial(const Rational& c, std::size_t k) {
  std::vector<Rational> v(k + 1, Rational(0));
  v[k] = c;
  return PolyNu(std::move(v));
}

void PolyNu::trim() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

Rational PolyNu::coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(0); }

Rational PolyNu::operator()(const Rational& x) const {
  Rational acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
  return acc;
}

ApproxReal PolyNu::operator()(const ApproxReal& x) const {
  ApproxReal acc(Rational(0), x.precision());
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + ApproxReal(c_[i], x.precision());
  return acc;
}

PolyNu PolyNu::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return PolyNu(std::move(d));
}

PolyNu PolyNu::operator+(const PolyNu& rhs) const {
  std::vector<Rational> v(std::max(c_.size(), rhs.c_.size()), Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) v[i] += c_[i];
  for (std::size_t i = 0; i < rhs.c_.size(); ++i) v[i] += rhs.c_[i];
  return PolyNu(std::move(v));
}

PolyNu PolyNu::operator-() const { return *this * Rational(-1); }

PolyNu PolyNu::operator-(const PolyNu& rhs) const { return *this + (-rhs); }

PolyNu PolyNu::operator*(const PolyNu& rhs) const {
  if (is_zero() || rhs.is_zero()) return {};
  std::vector<Rational> v(c_.size() + rhs.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < rhs.c_.size(); ++j) v[i + j] += c_[i] * rhs.c_[j];
  return PolyNu(std::move(v));
}

PolyNu PolyNu::operator*(const Rational& s) const {
  std::vector<Rational> v = c_;
  for (Rational& q : v) q *= s;
  return PolyNu(std::move(v));
}

PolyNu PolyNu::pow(unsigned k) const {
  PolyNu out = constant(1);
  for (unsigned i = 0; i < k; ++i) out = out * *this;
  return out;
}

PolyNu PolyNu::shifted(std::size_t k) const {
  if (is_zero()) return {};
  std::vector<Rational> v(k, Rational(0));
  v.insert(v.end(), c_.begin(), c_.end());
  return PolyNu(std::move(v));
}

std::string PolyNu::to_string(const std::string& var) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    const Rational& q = c_[i];
    if (sgn(q) == 0) continue;
    Rational mag = abs(q);
    if (first) {
      if (sgn(q) < 0) os << "-";
    } else {
      os << (sgn(q) < 0 ? " - " : " + ");
    }
    first = false;
    if (i == 0 || mag != 1) os << lamiq::to_string(mag);
    if (i >= 1) os << var;
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

std::vector<std::string> PolyNu::coeff_strings() const {
  std::vector<std::string> out;
  out.reserve(c_.size());
  for (const Rational& q : c_) out.push_back(lamiq::to_string(q));
  return out;
}

PolyDivision divide(const PolyNu& a, const PolyNu& b) {
  if (b.is_zero()) throw InvalidInput("polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  const long db = b.degree();
  if (a.degree() < db) return {PolyNu(), a};
  std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db + 1), Rational(0));
  for (long k = a.degree(); k >= db; --k) {
    const Rational f = rem[static_cast<std::size_t>(k)] / b.leading();
    quo[static_cast<std::size_t>(k - db)] = f;
    if (sgn(f) == 0) continue;
    for (long i = 0; i <= db; ++i) rem[static_cast<std::size_t>(k - db + i)] -= f * b.coeffs()[static_cast<std::size_t>(i)];
  }
  return {PolyNu(std::move(quo)), PolyNu(std::move(rem))};
}

PolyNu gcd(const PolyNu& a, const PolyNu& b) {
  PolyNu x = a, y = b;
  while (!y.is_zero()) {
    PolyNu r = divide(x, y).remainder;
    x = std::move(y);
    y = std::move(r);
  }
  if (x.is_zero()) return x;
  return x * (Rational(1) / x.leading());
}

PolyNu primitive_part(const PolyNu& p) {
  if (p.is_zero()) return p;
  Integer den = 1;
  for (const Rational& q : p.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Rational> v;
  Integer content = 0;
  for (const Rational& q : p.coeffs()) {
    Integer z = q.get_num() * (den / q.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), z.get_mpz_t());
    v.emplace_back(z);
  }
  if (sgn(p.leading()) < 0) content = -content;
  for (Rational& q : v) q /= content;
  return PolyNu(std::move(v));
}

PolyNu strip_nu_power(const PolyNu& p, std::size_t* removed) {
  std::size_t k = 0;
  while (k < p.coeffs().size() && sgn(p.coeffs()[k]) == 0) ++k;
  if (removed) *removed = p.is_zero() ? 0 : k;
  if (p.is_zero() || k == 0) return p;
  return PolyNu(std::vector<Rational>(p.coeffs().begin() + static_cast<long>(k), p.coeffs().end()));
}

PolyNu squarefree_part(const PolyNu& p) {
  if (p.degree() <= 0) return p;
  const PolyNu g = gcd(p, p.derivative());
  return divide(p, g).quotient;
}

std::vector<PolyNu> sturm_sequence(const PolyNu& p) {
  std::vector<PolyNu> seq;
  if (p.is_zero()) return seq;
  seq.push_back(p);
  seq.push_back(p.derivative());
  while (!seq.back().is_zero()) {
    PolyNu r = divide(seq[seq.size() - 2], seq.back()).remainder;
    seq.push_back(-r);
  }
  seq.pop_back();
  return seq;
}

namespace {

std::size_t variations(const std::vector<PolyNu>& seq, const Rational& x) {
  std::size_t v = 0;
  int last = 0;
  for (const PolyNu& q : seq) {
    const int s = sgn(q(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

// Power of two strictly above every root modulus.
Rational root_bound(const PolyNu& p) {
  Rational m = 0;
  for (long i = 0; i < p.degree(); ++i) m = std::max(m, Rational(abs(p.coeffs()[static_cast<std::size_t>(i)] / p.leading())));
  Rational b = 1;
  while (b <= m + 1) b *= 2;
  return b;
}

struct Isolator {
  const PolyNu& q;
  const std::vector<PolyNu>& seq;
  std::vector<RootInterval> out;

  // lo and hi are not roots.
  void run(const Rational& lo, const Rational& hi) {
    const std::size_t n = sturm_count(seq, lo, hi);
    if (n == 0) return;
    if (n == 1) {
      out.push_back({lo, hi});
      return;
    }
    const Rational m = (lo + hi) / 2;
    if (sgn(q(m)) != 0) {
      run(lo, m);
      run(m, hi);
      return;
    }
    Rational eps = (hi - lo) / 4;
    while (sgn(q(m - eps)) == 0 || sgn(q(m + eps)) == 0 || sturm_count(seq, m - eps, m + eps) != 1) eps /= 2;
    run(lo, m - eps);
    out.push_back({m, m});
    run(m + eps, hi);
  }
};

}  // namespace

std::size_t sturm_count(const std::vector<PolyNu>& seq, const Rational& lo, const Rational& hi) {
  if (seq.empty()) return 0;
  const std::size_t a = variations(seq, lo), b = variations(seq, hi);
  return a > b ? a - b : 0;
}

std::vector<RootInterval> isolate_roots(const PolyNu& p) {
  if (p.is_zero()) throw InvalidInput("cannot isolate the roots of the zero polynomial");
  if (p.degree() == 0) return {};
  const PolyNu q = squarefree_part(p);
  const std::vector<PolyNu> seq = sturm_sequence(q);
  const Rational b = root_bound(q);
  Isolator iso{q, seq, {}};
  iso.run(-b, b);
  return iso.out;
}

std::vector<RootInterval> isolate_roots(const PolyNu& p, const Rational& lo, const Rational& hi) {
  std::vector<RootInterval> out;
  if (p.degree() <= 0) return out;
  const PolyNu q = squarefree_part(p);
  const bool lo_root = sgn(q(lo)) == 0, hi_root = sgn(q(hi)) == 0;
  for (RootInterval r : isolate_roots(p)) {
    for (;;) {
      if (r.exact()) {
        if (r.lo > lo && r.lo < hi) out.push_back(r);
        break;
      }
      if (r.hi <= lo || r.lo >= hi) break;
      if (r.lo >= lo && r.hi <= hi) {
        out.push_back(r);
        break;
      }
      if (lo_root && r.lo < lo && lo < r.hi) break;
      if (hi_root && r.lo < hi && hi < r.hi) break;
      const Rational m = (r.lo + r.hi) / 2;
      const int sm = sgn(q(m));
      if (sm == 0) {
        r = {m, m};
      } else if (sgn(q(r.lo)) != sm) {
        r.hi = m;
      } else {
        r.lo = m;
      }
    }
  }
  return out;
}

RootInterval refine_root(const PolyNu& p, RootInterval r, const Rational& width) {
  if (r.exact()) return r;
  const PolyNu q = squarefree_part(p);
  int sl = sgn(q(r.lo));
  if (sl == 0) return {r.lo, r.lo};
  if (sgn(q(r.hi)) == 0) return {r.hi, r.hi};
  while (r.width() > width) {
    const Rational m = (r.lo + r.hi) / 2;
    const int sm = sgn(q(m));
    if (sm == 0) return {m, m};
    if (sm == sl) r.lo = m; else r.hi = m;
  }
  return r;
}

PolyNu interpolate(const QVector& x, const QVector& y) {
  if (x.size() != y.size() || x.empty()) throw InvalidInput("interpolation needs matching nonempty samples");
  const std::size_t n = x.size();
  QMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational p = 1;
    for (std::size_t j = 0; j < n; ++j) {
      v(i, j) = p;
      p *= x[i];
    }
  }
  const LinearSolution s = solve_linear(v, y);
  if (s.status != LinearSolution::Status::unique) throw InvalidInput("interpolation nodes are not distinct");
  return PolyNu(s.x);
}

}  // namespace lamiq
