#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace czlab {

/// Exact dyadic rational, mantissa * 2^exponent with an arbitrary-precision
/// mantissa. The representation is canonical (odd mantissa, or zero with
/// exponent 0), so structural equality is value equality.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value);  // NOLINT(google-explicit-constructor)

  /// Exact conversion; every finite double is a dyadic rational.
  static Dyadic from_double(double value);
  static Dyadic pow2(long exponent);

  /// Nearest double obtained by truncating the mantissa toward zero.
  double to_double() const;
  std::string to_string() const;

  int sign() const { return sgn(mantissa_); }
  bool is_zero() const { return sign() == 0; }
  const mpz_class& mantissa() const { return mantissa_; }
  long exponent() const { return exponent_; }

  Dyadic& operator+=(const Dyadic& rhs);
  Dyadic& operator-=(const Dyadic& rhs);
  Dyadic& operator*=(const Dyadic& rhs);
  Dyadic operator-() const;

  friend Dyadic operator+(Dyadic lhs, const Dyadic& rhs) { return lhs += rhs; }
  friend Dyadic operator-(Dyadic lhs, const Dyadic& rhs) { return lhs -= rhs; }
  friend Dyadic operator*(Dyadic lhs, const Dyadic& rhs) { return lhs *= rhs; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  Dyadic(mpz_class mantissa, long exponent);
  void normalize();

  mpz_class mantissa_{0};
  long exponent_ = 0;
};

Dyadic abs(const Dyadic& value);

/// Scalar adaptors so that numeric templates can run on double or Dyadic.
template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static double pow2(long e);
};

template <>
struct ScalarTraits<Dyadic> {
  static Dyadic from_double(double v) { return Dyadic::from_double(v); }
  static double to_double(const Dyadic& v) { return v.to_double(); }
  static Dyadic pow2(long e) { return Dyadic::pow2(e); }
};

}  // namespace czlab
