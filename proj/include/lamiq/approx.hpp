#pragma once

// gmp.h must precede mpfr.h for the mpq interfaces.
#include "lamiq/exactnum.hpp"

#include <mpfr.h>

#include <string>

namespace lamiq {

/// Rigorous enclosure of a real number: an MPFR interval [lo, hi] maintained with
/// outward (directed) rounding. Used only for reporting irrational results.
class ApproxReal {
 public:
  static void set_default_precision(unsigned bits);
  static unsigned default_precision();

  explicit ApproxReal(const Rational& exact, unsigned precision = default_precision());
  /// Encloses [lo, hi]; requires lo ≤ hi.
  ApproxReal(const Rational& lo, const Rational& hi, unsigned precision = default_precision());
  ApproxReal(const ApproxReal& other);
  ApproxReal(ApproxReal&& other) noexcept;
  ApproxReal& operator=(ApproxReal other) noexcept;
  ~ApproxReal();

  unsigned precision() const noexcept { return precision_; }

  ApproxReal operator+(const ApproxReal& rhs) const;
  ApproxReal operator-(const ApproxReal& rhs) const;
  ApproxReal operator*(const ApproxReal& rhs) const;
  /// Division; the divisor interval must exclude zero.
  ApproxReal operator/(const ApproxReal& rhs) const;
  ApproxReal sqrt() const;
  /// k-th root of a nonnegative interval.
  ApproxReal root(unsigned long k) const;

  /// Midpoint of the enclosure.
  double value() const;
  /// Half-width of the enclosure, rounded up.
  double error_bound() const;
  Rational lower() const;
  Rational upper() const;
  bool contains(const Rational& q) const;
  /// Midpoint with `digits` significant decimal digits, e.g. "0.0716225944".
  std::string to_decimal(int digits) const;
  /// Midpoint rounded to `places` digits after the decimal point.
  std::string to_fixed(int places) const;

 private:
  explicit ApproxReal(unsigned precision);
  void swap(ApproxReal& other) noexcept;

  unsigned precision_;
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace lamiq
