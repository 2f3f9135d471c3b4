#include "lamiq/approx.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace lamiq {

namespace {

std::atomic<unsigned> g_precision{128};

void set_from_q(mpfr_t out, const Rational& q, mpfr_rnd_t rnd) { mpfr_set_q(out, q.get_mpq_t(), rnd); }

}  // namespace

void ApproxReal::set_default_precision(unsigned bits) {
  if (bits < 32) throw InvalidInput("precision must be at least 32 bits");
  g_precision = bits;
}

unsigned ApproxReal::default_precision() { return g_precision; }

ApproxReal::ApproxReal(unsigned precision) : precision_(precision) {
  mpfr_init2(lo_, precision_);
  mpfr_init2(hi_, precision_);
}

ApproxReal::ApproxReal(const Rational& exact, unsigned precision) : ApproxReal(precision) {
  set_from_q(lo_, exact, MPFR_RNDD);
  set_from_q(hi_, exact, MPFR_RNDU);
}

ApproxReal::ApproxReal(const Rational& lo, const Rational& hi, unsigned precision) : ApproxReal(precision) {
  if (lo > hi) throw InvalidInput("ApproxReal: empty interval");
  set_from_q(lo_, lo, MPFR_RNDD);
  set_from_q(hi_, hi, MPFR_RNDU);
}

ApproxReal::ApproxReal(const ApproxReal& other) : ApproxReal(other.precision_) {
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

ApproxReal::ApproxReal(ApproxReal&& other) noexcept : ApproxReal(other.precision_) { swap(other); }

ApproxReal& ApproxReal::operator=(ApproxReal other) noexcept {
  swap(other);
  return *this;
}

ApproxReal::~ApproxReal() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

void ApproxReal::swap(ApproxReal& other) noexcept {
  std::swap(precision_, other.precision_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

ApproxReal ApproxReal::operator+(const ApproxReal& rhs) const {
  ApproxReal r(std::max(precision_, rhs.precision_));
  mpfr_add(r.lo_, lo_, rhs.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, hi_, rhs.hi_, MPFR_RNDU);
  return r;
}

ApproxReal ApproxReal::operator-(const ApproxReal& rhs) const {
  ApproxReal r(std::max(precision_, rhs.precision_));
  mpfr_sub(r.lo_, lo_, rhs.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, hi_, rhs.lo_, MPFR_RNDU);
  return r;
}

ApproxReal ApproxReal::operator*(const ApproxReal& rhs) const {
  const unsigned prec = std::max(precision_, rhs.precision_);
  ApproxReal r(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  const mpfr_srcptr a[2] = {lo_, hi_};
  const mpfr_srcptr b[2] = {rhs.lo_, rhs.hi_};
  mpfr_mul(r.lo_, a[0], b[0], MPFR_RNDD);
  mpfr_mul(r.hi_, a[0], b[0], MPFR_RNDU);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (i == 0 && j == 0) continue;
      mpfr_mul(t, a[i], b[j], MPFR_RNDD);
      mpfr_min(r.lo_, r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, a[i], b[j], MPFR_RNDU);
      mpfr_max(r.hi_, r.hi_, t, MPFR_RNDU);
    }
  mpfr_clear(t);
  return r;
}

ApproxReal ApproxReal::operator/(const ApproxReal& rhs) const {
  if (mpfr_sgn(rhs.lo_) <= 0 && mpfr_sgn(rhs.hi_) >= 0)
    throw InvalidInput("ApproxReal: division by an interval containing zero");
  const unsigned prec = std::max(precision_, rhs.precision_);
  ApproxReal inv(prec);
  mpfr_ui_div(inv.lo_, 1, rhs.hi_, MPFR_RNDD);
  mpfr_ui_div(inv.hi_, 1, rhs.lo_, MPFR_RNDU);
  return *this * inv;
}

ApproxReal ApproxReal::sqrt() const {
  if (mpfr_sgn(lo_) < 0) throw InvalidInput("ApproxReal: sqrt of a possibly negative interval");
  ApproxReal r(precision_);
  mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

ApproxReal ApproxReal::root(unsigned long k) const {
  if (k == 0) throw InvalidInput("ApproxReal: zeroth root");
  if (mpfr_sgn(lo_) < 0) throw InvalidInput("ApproxReal: root of a possibly negative interval");
  ApproxReal r(precision_);
  mpfr_rootn_ui(r.lo_, lo_, k, MPFR_RNDD);
  mpfr_rootn_ui(r.hi_, hi_, k, MPFR_RNDU);
  return r;
}

double ApproxReal::value() const {
  mpfr_t m;
  mpfr_init2(m, precision_ + 2);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  const double v = mpfr_get_d(m, MPFR_RNDN);
  mpfr_clear(m);
  return v;
}

double ApproxReal::error_bound() const {
  mpfr_t w;
  mpfr_init2(w, precision_ + 2);
  mpfr_sub(w, hi_, lo_, MPFR_RNDU);
  mpfr_div_2ui(w, w, 1, MPFR_RNDU);
  const double e = mpfr_get_d(w, MPFR_RNDU);
  mpfr_clear(w);
  return e;
}

Rational ApproxReal::lower() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), lo_);
  return q;
}

Rational ApproxReal::upper() const {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), hi_);
  return q;
}

bool ApproxReal::contains(const Rational& q) const { return lower() <= q && q <= upper(); }

std::string ApproxReal::to_decimal(int digits) const {
  mpfr_t m;
  mpfr_init2(m, precision_ + 2);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, m);
  std::string s(buf);
  mpfr_free_str(buf);
  mpfr_clear(m);
  return s;
}

std::string ApproxReal::to_fixed(int places) const {
  mpfr_t m;
  mpfr_init2(m, precision_ + 2);
  mpfr_add(m, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m, m, 1, MPFR_RNDN);
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rf", places, m);
  std::string s(buf);
  mpfr_free_str(buf);
  mpfr_clear(m);
  return s;
}

}  // namespace lamiq
