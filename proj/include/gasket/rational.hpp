#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gasket {

/// Exact rational scalar over int64 with __int128 intermediates.
///
/// Used for the exact-arithmetic mode of the energy and measure identities
/// on small levels, where float rounding would blur an identity that holds
/// combinatorially. Overflow throws instead of wrapping.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
    __int128 d = i128(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
    __int128 d = i128(a.den_) * b.den_;
    return make(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  using i128 = __int128;

  static Rational make(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr i128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim)
      throw std::overflow_error("Rational: overflow after reduction");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  std::int64_t num_;
  std::int64_t den_;
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

}  // namespace gasket

namespace Eigen {

template <>
struct NumTraits<gasket::Rational> : GenericNumTraits<gasket::Rational> {
  using Real = gasket::Rational;
  using NonInteger = gasket::Rational;
  using Nested = gasket::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 10,
    MulCost = 10
  };
  static Real epsilon() { return gasket::Rational(0); }
  static Real dummy_precision() { return gasket::Rational(0); }
  static int digits10() { return 18; }
};

}  // namespace Eigen
