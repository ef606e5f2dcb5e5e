#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bellgames {

// Exact rational with small numerator/denominator. Game values are ratios of
// win counts over tuple counts, so int64 never comes close to overflowing.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  explicit Fraction(std::int64_t n) : num(n), den(1) {}

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  Fraction operator+(const Fraction& o) const {
    return Fraction(num * o.den + o.num * den, den * o.den);
  }
  Fraction operator*(const Fraction& o) const { return Fraction(num * o.num, den * o.den); }

  bool operator==(const Fraction& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Fraction& o) const { return !(*this == o); }
  bool operator<(const Fraction& o) const { return num * o.den < o.num * den; }
  bool operator>(const Fraction& o) const { return o < *this; }
  bool operator<=(const Fraction& o) const { return !(o < *this); }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};

}  // namespace bellgames
