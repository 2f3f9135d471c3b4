#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lamiq/approx.hpp"
#include "lamiq/exactnum.hpp"

namespace lamiq {

/// Polynomial in ν with rational coefficients, ascending powers, no trailing zeros.
class PolyNu {
 public:
  PolyNu() = default;
  explicit PolyNu(std::vector<Rational> coeffs);
  static PolyNu constant(const Rational& c);
  /// (ν − r)
  static PolyNu linear_root(const Rational& r);
  static PolyNu monomial(const Rational& c, std::size_t k);

  const std::vector<Rational>& coeffs() const noexcept { return c_; }
  /// Coefficient of ν^k, zero past the degree.
  Rational coeff(std::size_t k) const;
  bool is_zero() const { return c_.empty(); }
  /// −1 for the zero polynomial.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const Rational& leading() const { return c_.back(); }

  Rational operator()(const Rational& x) const;
  ApproxReal operator()(const ApproxReal& x) const;
  PolyNu derivative() const;

  PolyNu operator+(const PolyNu& rhs) const;
  PolyNu operator-(const PolyNu& rhs) const;
  PolyNu operator-() const;
  PolyNu operator*(const PolyNu& rhs) const;
  PolyNu operator*(const Rational& s) const;
  PolyNu pow(unsigned k) const;
  /// ν^k · p
  PolyNu shifted(std::size_t k) const;

  friend bool operator==(const PolyNu& a, const PolyNu& b) = default;

  /// Human-readable form such as "720ν^9 − 1704ν^8 + …".
  std::string to_string(const std::string& var = "v") const;
  std::vector<std::string> coeff_strings() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

struct PolyDivision {
  PolyNu quotient;
  PolyNu remainder;
};

PolyDivision divide(const PolyNu& a, const PolyNu& b);
/// Monic greatest common divisor; zero when both inputs are zero.
PolyNu gcd(const PolyNu& a, const PolyNu& b);
/// Integer coefficients with unit content and positive leading coefficient.
PolyNu primitive_part(const PolyNu& p);
/// Removes the largest power ν^k dividing p.
PolyNu strip_nu_power(const PolyNu& p, std::size_t* removed = nullptr);
/// p / gcd(p, p′)
PolyNu squarefree_part(const PolyNu& p);

std::vector<PolyNu> sturm_sequence(const PolyNu& p);
/// Distinct real roots in (lo, hi]; the sequence must come from a squarefree polynomial.
std::size_t sturm_count(const std::vector<PolyNu>& seq, const Rational& lo, const Rational& hi);

/// Closed interval holding exactly one real root; lo == hi for an exact rational root.
struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact() const { return lo == hi; }
  Rational width() const { return hi - lo; }
};

/// Certified isolation of every distinct real root, in increasing order.
std::vector<RootInterval> isolate_roots(const PolyNu& p);
/// Roots in the open interval (lo, hi) only.
std::vector<RootInterval> isolate_roots(const PolyNu& p, const Rational& lo, const Rational& hi);
/// Bisects until hi − lo ≤ width; a root hit exactly collapses the interval.
RootInterval refine_root(const PolyNu& p, RootInterval r, const Rational& width);

/// Exact interpolation through (x_j, y_j); needs distinct x values.
PolyNu interpolate(const QVector& x, const QVector& y);

}  // namespace lamiq
