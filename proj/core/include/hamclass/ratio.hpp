#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hamclass {

/// Small exact rational used for exponents. Always reduced, denominator > 0.
class Ratio {
 public:
  constexpr Ratio() = default;
  constexpr Ratio(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Ratio(std::int64_t n, std::int64_t d) : num_(n), den_(d) { reduce(); }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  constexpr bool is_zero() const { return num_ == 0; }
  constexpr bool is_integer() const { return den_ == 1; }
  constexpr bool is_negative() const { return num_ < 0; }

  /// Largest integer not greater than this value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }
  /// Fractional part in [0, 1).
  Ratio frac() const { return *this - Ratio(floor()); }

  friend Ratio operator+(Ratio a, Ratio b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
  friend Ratio operator-(Ratio a, Ratio b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
  friend Ratio operator*(Ratio a, Ratio b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend Ratio operator/(Ratio a, Ratio b) {
    if (b.num_ == 0) throw std::domain_error("exponent division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  Ratio operator-() const { return {-num_, den_}; }
  Ratio& operator+=(Ratio o) { return *this = *this + o; }
  Ratio& operator-=(Ratio o) { return *this = *this - o; }

  friend constexpr bool operator==(Ratio a, Ratio b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend constexpr bool operator!=(Ratio a, Ratio b) { return !(a == b); }
  friend bool operator<(Ratio a, Ratio b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(Ratio a, Ratio b) { return b < a; }
  friend bool operator<=(Ratio a, Ratio b) { return !(b < a); }
  friend bool operator>=(Ratio a, Ratio b) { return !(a < b); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void reduce() {
    if (den_ == 0) throw std::domain_error("zero exponent denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace hamclass
