#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lamiq/errors.hpp"

namespace lamiq {

using Integer = mpz_class;
using Rational = mpq_class;
using QVector = std::vector<Rational>;
using IntVector = std::vector<std::int64_t>;

/// Parses "p/q", "p" or a decimal literal such as "0.25" into a reduced rational.
Rational parse_rational(std::string_view text);
/// Exact text form: "p/q", or "p" when q = 1.
std::string to_string(const Rational& q);
double to_double(const Rational& q);

struct IntegerHash {
  std::size_t operator()(const Integer& z) const noexcept;
};
struct RationalHash {
  std::size_t operator()(const Rational& q) const noexcept;
};
struct QVectorHash {
  std::size_t operator()(const QVector& v) const noexcept;
};

Rational dot(const QVector& x, const QVector& y);
QVector add(const QVector& x, const QVector& y);
QVector sub(const QVector& x, const QVector& y);
QVector scale(const QVector& x, const Rational& s);
QVector zero_vector(std::size_t n);
bool is_zero(const QVector& x);
std::string to_string(const QVector& v);

/// Dense row-major rational matrix.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols);

  static QMatrix identity(std::size_t n);
  static QMatrix from_rows(const std::vector<QVector>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  QVector row(std::size_t r) const;
  QVector col(std::size_t c) const;
  QMatrix transpose() const;

  QMatrix operator*(const QMatrix& rhs) const;
  /// Matrix-vector product M·x (x as a column).
  QVector operator*(const QVector& x) const;
  QMatrix& operator+=(const QMatrix& rhs);
  QMatrix operator*(const Rational& s) const;

  bool is_symmetric() const;
  Rational trace() const;

  friend bool operator==(const QMatrix& a, const QMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

/// Row-vector product x·M.
QVector row_times(const QVector& x, const QMatrix& m);

Rational determinant(QMatrix m);
std::size_t rank(QMatrix m);

struct LinearSolution {
  enum class Status { unique, underdetermined, inconsistent };
  Status status = Status::inconsistent;
  std::size_t rank = 0;
  /// Unique solution, or one particular solution when underdetermined.
  QVector x;
};

/// Exact Gaussian elimination with full pivoting on A·x = b.
LinearSolution solve_linear(const QMatrix& a, const QVector& b);

/// Gram determinant det[v_i · v_j]; 1 for an empty set.
Rational gram_determinant(const std::vector<QVector>& vectors);

struct SquareFreeSplit {
  Integer root;      // s = root² · radicand
  Integer radicand;  // squarefree
};

/// Prime factorization (trial division, then Pollard-Brent) of n ≥ 1.
std::vector<std::pair<Integer, unsigned>> factorize(const Integer& n);
SquareFreeSplit square_free_split(const Integer& s);

/// Exact number coeff·√radicand with squarefree radicand; zero is 0·√1.
class RadQ {
 public:
  RadQ() : coeff_(0), radicand_(1) {}
  explicit RadQ(Rational r) : coeff_(std::move(r)), radicand_(1) { coeff_.canonicalize(); }

  const Rational& coeff() const noexcept { return coeff_; }
  const Integer& radicand() const noexcept { return radicand_; }

  bool is_zero() const { return sgn(coeff_) == 0; }
  bool is_rational() const { return radicand_ == 1; }
  int sign() const { return sgn(coeff_); }
  /// coeff² · radicand.
  Rational squared() const;
  double to_double() const;
  std::string to_string() const;

  RadQ operator-() const;
  RadQ operator*(const Rational& s) const;

  friend bool operator==(const RadQ& a, const RadQ& b) {
    return a.coeff_ == b.coeff_ && a.radicand_ == b.radicand_;
  }

 private:
  friend RadQ radq_normalize(const Rational& c, const Integer& s);
  friend RadQ radq_mul(const RadQ& x, const RadQ& y);
  friend RadQ radq_add(const RadQ& x, const RadQ& y);
  RadQ(Rational c, Integer s) : coeff_(std::move(c)), radicand_(std::move(s)) {}

  Rational coeff_;
  Integer radicand_;
};

RadQ radq_normalize(const Rational& c, const Integer& s);
/// √q for q ≥ 0; negative input is a domain error.
RadQ radq_sqrt(const Rational& q);
RadQ radq_mul(const RadQ& x, const RadQ& y);
/// Sum of two values over the same radicand; mismatched nonzero radicands throw IncompatibleRadicand.
RadQ radq_add(const RadQ& x, const RadQ& y);
RadQ radq_sub(const RadQ& x, const RadQ& y);

inline RadQ operator*(const RadQ& x, const RadQ& y) { return radq_mul(x, y); }
inline RadQ operator+(const RadQ& x, const RadQ& y) { return radq_add(x, y); }
inline RadQ operator-(const RadQ& x, const RadQ& y) { return radq_sub(x, y); }

}  // namespace lamiq
