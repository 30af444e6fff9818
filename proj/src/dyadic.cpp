#include "czlab/dyadic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace czlab {

Dyadic::Dyadic(long value) : mantissa_(value) { normalize(); }

Dyadic::Dyadic(mpz_class mantissa, long exponent)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  normalize();
}

void Dyadic::normalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  const mp_bitcnt_t zeros = mpz_scan1(mantissa_.get_mpz_t(), 0);
  if (zeros > 0) {
    mpz_fdiv_q_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(), zeros);
    exponent_ += static_cast<long>(zeros);
  }
}

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) throw std::domain_error("Dyadic::from_double: non-finite value");
  if (value == 0.0) return {};
  int exp = 0;
  const double frac = std::frexp(value, &exp);  // value = frac * 2^exp, |frac| in [0.5, 1)
  constexpr int kBits = std::numeric_limits<double>::digits;
  const auto scaled = static_cast<std::int64_t>(std::ldexp(frac, kBits));
  mpz_class mant;
  mpz_set_si(mant.get_mpz_t(), static_cast<long>(scaled));
  return {std::move(mant), static_cast<long>(exp) - kBits};
}

Dyadic Dyadic::pow2(long exponent) { return {mpz_class(1), exponent}; }

double Dyadic::to_double() const {
  if (is_zero()) return 0.0;
  long exp = 0;
  const double frac = mpz_get_d_2exp(&exp, mantissa_.get_mpz_t());
  return std::ldexp(frac, static_cast<int>(exp + exponent_));
}

std::string Dyadic::to_string() const {
  return mantissa_.get_str() + "*2^" + std::to_string(exponent_);
}

Dyadic& Dyadic::operator+=(const Dyadic& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) return *this = rhs;
  if (exponent_ <= rhs.exponent_) {
    mpz_class shifted;
    mpz_mul_2exp(shifted.get_mpz_t(), rhs.mantissa_.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(rhs.exponent_ - exponent_));
    mantissa_ += shifted;
  } else {
    mpz_mul_2exp(mantissa_.get_mpz_t(), mantissa_.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(exponent_ - rhs.exponent_));
    mantissa_ += rhs.mantissa_;
    exponent_ = rhs.exponent_;
  }
  normalize();
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& rhs) { return *this += -rhs; }

Dyadic& Dyadic::operator*=(const Dyadic& rhs) {
  mantissa_ *= rhs.mantissa_;
  exponent_ += rhs.exponent_;
  normalize();
  return *this;
}

Dyadic Dyadic::operator-() const {
  Dyadic out = *this;
  out.mantissa_ = -out.mantissa_;
  return out;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  const int s = (a - b).sign();
  if (s < 0) return std::strong_ordering::less;
  if (s > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Dyadic abs(const Dyadic& value) { return value.sign() < 0 ? -value : value; }

double ScalarTraits<double>::pow2(long e) { return std::ldexp(1.0, static_cast<int>(e)); }

}  // namespace czlab
