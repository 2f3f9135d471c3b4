#include "lamiq/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace lamiq {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_integer_text(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

Integer parse_integer(std::string_view s) {
  if (!valid_integer_text(s)) throw InvalidInput("malformed integer '" + std::string(s) + "'");
  if (s.front() == '+') s.remove_prefix(1);
  return Integer(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view t = trim(text);
  if (t.empty()) throw InvalidInput("empty rational literal");
  if (const auto slash = t.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(trim(t.substr(0, slash)));
    Integer den = parse_integer(trim(t.substr(slash + 1)));
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(t) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (const auto dot_pos = t.find('.'); dot_pos != std::string_view::npos) {
    std::string_view whole = t.substr(0, dot_pos);
    std::string_view frac = t.substr(dot_pos + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !valid_integer_text(whole) || !valid_integer_text(frac) || frac.front() == '-' ||
        frac.front() == '+')
      throw InvalidInput("malformed decimal '" + std::string(t) + "'");
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational q(Integer(std::string(whole)) * den + Integer(std::string(frac)), den);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }
  return Rational(parse_integer(t));
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

std::size_t IntegerHash::operator()(const Integer& z) const noexcept {
  const mpz_srcptr p = z.get_mpz_t();
  std::size_t h = static_cast<std::size_t>(p->_mp_size) * 0x9e3779b97f4a7c15ULL;
  const int limbs = std::abs(p->_mp_size);
  for (int i = 0; i < limbs; ++i) {
    h ^= static_cast<std::size_t>(p->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::size_t RationalHash::operator()(const Rational& q) const noexcept {
  IntegerHash ih;
  const std::size_t a = ih(q.get_num());
  return a ^ (ih(q.get_den()) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::size_t QVectorHash::operator()(const QVector& v) const noexcept {
  RationalHash rh;
  std::size_t h = v.size();
  for (const auto& q : v) h ^= rh(q) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

Rational dot(const QVector& x, const QVector& y) {
  Rational s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sgn(x[i]) != 0 && sgn(y[i]) != 0) s += x[i] * y[i];
  }
  return s;
}

QVector add(const QVector& x, const QVector& y) {
  QVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

QVector sub(const QVector& x, const QVector& y) {
  QVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

QVector scale(const QVector& x, const Rational& s) {
  QVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * s;
  return r;
}

QVector zero_vector(std::size_t n) { return QVector(n, Rational(0)); }

bool is_zero(const QVector& x) {
  return std::all_of(x.begin(), x.end(), [](const Rational& q) { return sgn(q) == 0; });
}

std::string to_string(const QVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].get_str();
  }
  return s + ")";
}

QMatrix::QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

QMatrix QMatrix::identity(std::size_t n) {
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

QMatrix QMatrix::from_rows(const std::vector<QVector>& rows) {
  if (rows.empty()) return {};
  QMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw InvalidInput("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

QVector QMatrix::row(std::size_t r) const {
  return QVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                 data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

QVector QMatrix::col(std::size_t c) const {
  QVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

QMatrix QMatrix::transpose() const {
  QMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

QMatrix QMatrix::operator*(const QMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw InvalidInput("matrix product dimension mismatch");
  QMatrix p(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) p(i, j) += a * rhs(k, j);
    }
  return p;
}

QVector QMatrix::operator*(const QVector& x) const {
  if (cols_ != x.size()) throw InvalidInput("matrix-vector dimension mismatch");
  QVector y(rows_, Rational(0));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k)
      if (sgn((*this)(i, k)) != 0 && sgn(x[k]) != 0) y[i] += (*this)(i, k) * x[k];
  return y;
}

QMatrix& QMatrix::operator+=(const QMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InvalidInput("matrix sum dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

QMatrix QMatrix::operator*(const Rational& s) const {
  QMatrix r = *this;
  for (auto& q : r.data_) q *= s;
  return r;
}

bool QMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

Rational QMatrix::trace() const {
  Rational t = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

QVector row_times(const QVector& x, const QMatrix& m) {
  if (x.size() != m.rows()) throw InvalidInput("vector-matrix dimension mismatch");
  QVector y(m.cols(), Rational(0));
  for (std::size_t k = 0; k < m.rows(); ++k) {
    if (sgn(x[k]) == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (sgn(m(k, j)) != 0) y[j] += x[k] * m(k, j);
  }
  return y;
}

Rational determinant(QMatrix m) {
  if (m.rows() != m.cols()) throw InvalidInput("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(m(p, c)) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (sgn(m(r, c)) == 0) continue;
      const Rational f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

std::size_t rank(QMatrix m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      if (sgn(m(i, c)) == 0) continue;
      const Rational f = m(i, c) / m(r, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

LinearSolution solve_linear(const QMatrix& a, const QVector& b) {
  if (a.rows() != b.size()) throw InvalidInput("solve_linear: right-hand side has wrong length");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  QMatrix w(m, n + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) w(i, j) = a(i, j);
    w(i, n) = b[i];
  }
  std::vector<std::size_t> colperm(n);
  for (std::size_t j = 0; j < n; ++j) colperm[j] = j;

  std::size_t r = 0;
  for (; r < std::min(m, n); ++r) {
    // Full pivoting: any nonzero entry of the trailing block; exactness makes magnitude irrelevant.
    std::size_t pr = m, pc = n;
    for (std::size_t j = r; j < n && pr == m; ++j)
      for (std::size_t i = r; i < m; ++i)
        if (sgn(w(i, j)) != 0) {
          pr = i;
          pc = j;
          break;
        }
    if (pr == m) break;
    if (pr != r)
      for (std::size_t j = 0; j <= n; ++j) std::swap(w(pr, j), w(r, j));
    if (pc != r) {
      for (std::size_t i = 0; i < m; ++i) std::swap(w(i, pc), w(i, r));
      std::swap(colperm[pc], colperm[r]);
    }
    const Rational inv = 1 / w(r, r);
    for (std::size_t j = r; j <= n; ++j) w(r, j) *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || sgn(w(i, r)) == 0) continue;
      const Rational f = w(i, r);
      for (std::size_t j = r; j <= n; ++j) w(i, j) -= f * w(r, j);
    }
  }

  LinearSolution sol;
  sol.rank = r;
  for (std::size_t i = r; i < m; ++i)
    if (sgn(w(i, n)) != 0) {
      sol.status = LinearSolution::Status::inconsistent;
      return sol;
    }
  sol.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < r; ++i) sol.x[colperm[i]] = w(i, n);
  sol.status = (r == n) ? LinearSolution::Status::unique : LinearSolution::Status::underdetermined;
  return sol;
}

Rational gram_determinant(const std::vector<QVector>& vectors) {
  const std::size_t k = vectors.size();
  if (k == 0) return 1;
  QMatrix g(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      g(i, j) = dot(vectors[i], vectors[j]);
      if (j != i) g(j, i) = g(i, j);
    }
  return determinant(std::move(g));
}

// ---------------------------------------------------------------------------
// Factorization

namespace {

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    constexpr unsigned limit = 1u << 16;
    std::vector<bool> composite(limit + 1, false);
    std::vector<unsigned> ps;
    for (unsigned i = 2; i <= limit; ++i) {
      if (composite[i]) continue;
      ps.push_back(i);
      for (unsigned long long j = 1ULL * i * i; j <= limit; j += i) composite[j] = true;
    }
    return ps;
  }();
  return primes;
}

Integer pollard_brent(const Integer& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Integer y = 2, x, g = 1, q = 1, ys, t;
    unsigned long r = 1;
    const unsigned long m = 128;
    auto f = [&](const Integer& v) {
      Integer out = v * v + c;
      mpz_mod(out.get_mpz_t(), out.get_mpz_t(), n.get_mpz_t());
      return out;
    };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          t = x - y;
          mpz_abs(t.get_mpz_t(), t.get_mpz_t());
          q = q * t;
          mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        t = x - ys;
        mpz_abs(t.get_mpz_t(), t.get_mpz_t());
        mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_into(const Integer& n, std::map<Integer, unsigned>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) > 0) {
    ++out[n];
    return;
  }
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    Integer s;
    mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
    std::map<Integer, unsigned> half;
    factor_into(s, half);
    for (auto& [p, e] : half) out[p] += 2 * e;
    return;
  }
  const Integer d = pollard_brent(n);
  factor_into(d, out);
  factor_into(Integer(n / d), out);
}

}  // namespace

std::vector<std::pair<Integer, unsigned>> factorize(const Integer& n_in) {
  if (n_in < 1) throw InvalidInput("factorize: argument must be positive");
  Integer n = n_in;
  std::map<Integer, unsigned> found;
  for (unsigned p : small_primes()) {
    if (n == 1) break;
    if (Integer(p) * p > n) break;
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    if (e) found[Integer(p)] += e;
  }
  if (n != 1) factor_into(n, found);
  return {found.begin(), found.end()};
}

namespace {

// Squarefree split of m when every prime factor of m exceeds the trial-division limit.
// Square parts are peeled without factoring them.
void split_large(const Integer& m, SquareFreeSplit& out) {
  if (m == 1) return;
  if (mpz_perfect_square_p(m.get_mpz_t())) {
    Integer r;
    mpz_sqrt(r.get_mpz_t(), m.get_mpz_t());
    out.root *= r;
    return;
  }
  const Integer limit(small_primes().back());
  if (mpz_probab_prime_p(m.get_mpz_t(), 30) > 0 || m < limit * limit * limit) {
    // Prime, or a product of two distinct large primes.
    out.radicand *= m;
    return;
  }
  const Integer d = pollard_brent(m);
  const Integer e = m / d;
  Integer g;
  mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), e.get_mpz_t());
  if (g == 1) {
    split_large(d, out);
    split_large(e, out);
    return;
  }
  out.root *= g;
  split_large(Integer((d / g) * (e / g)), out);
}

}  // namespace

SquareFreeSplit square_free_split(const Integer& s) {
  if (s < 1) throw InvalidInput("square_free_split: argument must be positive");
  // Radicands recur constantly (every Gram height); the cache keeps factorization off the hot path.
  static std::mutex mutex;
  static std::unordered_map<Integer, SquareFreeSplit, IntegerHash> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(s); it != cache.end()) return it->second;
  }
  SquareFreeSplit split{1, 1};
  Integer n = s;
  for (unsigned p : small_primes()) {
    if (n == 1) break;
    if (Integer(p) * p > n) break;
    unsigned e = 0;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
      ++e;
    }
    if (e / 2) {
      Integer pe;
      mpz_ui_pow_ui(pe.get_mpz_t(), p, e / 2);
      split.root *= pe;
    }
    if (e % 2) split.radicand *= p;
  }
  if (n != 1) {
    if (Integer(small_primes().back()) * small_primes().back() > n) {
      split.radicand *= n;
    } else {
      split_large(n, split);
    }
  }
  std::lock_guard lock(mutex);
  if (cache.size() > 1'000'000) cache.clear();
  cache.emplace(s, split);
  return split;
}

// ---------------------------------------------------------------------------
// RadQ

Rational RadQ::squared() const { return coeff_ * coeff_ * Rational(radicand_); }

double RadQ::to_double() const { return coeff_.get_d() * std::sqrt(radicand_.get_d()); }

std::string RadQ::to_string() const {
  if (radicand_ == 1) return coeff_.get_str();
  return coeff_.get_str() + "*sqrt(" + radicand_.get_str() + ")";
}

RadQ RadQ::operator-() const { return RadQ(Rational(-coeff_), radicand_); }

RadQ RadQ::operator*(const Rational& s) const {
  if (sgn(s) == 0 || is_zero()) return RadQ();
  return RadQ(coeff_ * s, radicand_);
}

RadQ radq_normalize(const Rational& c, const Integer& s) {
  if (s < 1) throw InvalidInput("radq_normalize: radicand must be a positive integer");
  if (sgn(c) == 0) return RadQ();
  const SquareFreeSplit split = square_free_split(s);
  return RadQ(c * split.root, split.radicand);
}

RadQ radq_sqrt(const Rational& q) {
  if (sgn(q) < 0) throw InvalidInput("radq_sqrt: negative argument " + q.get_str());
  if (sgn(q) == 0) return RadQ();
  // √(n/d) = (k1/(k2·r2))·√(r1·r2) with n = k1²r1, d = k2²r2; r1, r2 coprime so r1·r2 is squarefree.
  const SquareFreeSplit num = square_free_split(q.get_num());
  const SquareFreeSplit den = square_free_split(q.get_den());
  Rational coeff(num.root, den.root * den.radicand);
  coeff.canonicalize();
  return radq_normalize(coeff, num.radicand * den.radicand);
}

RadQ radq_mul(const RadQ& x, const RadQ& y) {
  if (x.is_zero() || y.is_zero()) return RadQ();
  if (x.radicand_ == 1) return RadQ(x.coeff_ * y.coeff_, y.radicand_);
  if (y.radicand_ == 1) return RadQ(x.coeff_ * y.coeff_, x.radicand_);
  Integer g;
  mpz_gcd(g.get_mpz_t(), x.radicand_.get_mpz_t(), y.radicand_.get_mpz_t());
  Integer s = (x.radicand_ / g) * (y.radicand_ / g);
  return RadQ(x.coeff_ * y.coeff_ * Rational(g), std::move(s));
}

RadQ radq_add(const RadQ& x, const RadQ& y) {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  if (x.radicand() != y.radicand())
    throw IncompatibleRadicand("cannot add " + x.to_string() + " and " + y.to_string());
  Rational c = x.coeff_ + y.coeff_;
  if (sgn(c) == 0) return RadQ();
  return RadQ(std::move(c), x.radicand_);
}

RadQ radq_sub(const RadQ& x, const RadQ& y) { return radq_add(x, -y); }

}  // namespace lamiq
