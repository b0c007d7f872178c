#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace structmatrix {

__extension__ typedef unsigned __int128 u128;

// Non-negative rational num/den. Thresholds such as epsilon and the hub
// fraction are kept in this form so every comparison against an edge count
// is an integer cross-product.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  constexpr Ratio() = default;
  constexpr Ratio(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    if (d == 0) throw std::invalid_argument("ratio with zero denominator");
  }

  static Ratio reduced(std::uint64_t n, std::uint64_t d) {
    if (d == 0) throw std::invalid_argument("ratio with zero denominator");
    const std::uint64_t g = std::gcd(n, d);
    return g == 0 ? Ratio(0, 1) : Ratio(n / g, d / g);
  }

  // Accepts "0.2", "1", ".05", "3/100". Decimal input is converted exactly.
  static Ratio parse(std::string_view text) {
    auto fail = [&]() -> Ratio {
      throw std::invalid_argument("not a non-negative ratio: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto n = parse_uint(text.substr(0, slash));
      auto d = parse_uint(text.substr(slash + 1));
      if (n < 0 || d <= 0) return fail();
      return reduced(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d));
    }
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : text) {
      if (c == '.') {
        if (seen_dot) return fail();
        seen_dot = true;
      } else if (c >= '0' && c <= '9') {
        seen_digit = true;
        if (num > (UINT64_MAX - 9) / 10 || (seen_dot && den > UINT64_MAX / 10)) return fail();
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
        if (seen_dot) den *= 10;
      } else {
        return fail();
      }
    }
    if (!seen_digit) return fail();
    return reduced(num, den);
  }

  // Nearest fraction with denominator 10^9; exact for the usual decimal inputs.
  static Ratio from_double(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("ratio must be finite and >= 0");
    constexpr std::uint64_t kDen = 1'000'000'000ULL;
    return reduced(static_cast<std::uint64_t>(std::llround(v * static_cast<double>(kDen))), kDen);
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  // 1 - r, for r <= 1.
  Ratio complement() const {
    if (num > den) throw std::domain_error("complement of a ratio above one");
    return Ratio(den - num, den);
  }

  bool is_zero() const { return num == 0; }
  bool less_than_one() const { return num < den; }
  bool at_most_one() const { return num <= den; }

  // ceil(r * n)
  std::uint64_t ceil_times(std::uint64_t n) const {
    const u128 p = static_cast<u128>(num) * n;
    return static_cast<std::uint64_t>((p + den - 1) / den);
  }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return static_cast<u128>(a.num) * b.den == static_cast<u128>(b.num) * a.den;
  }

 private:
  static long long parse_uint(std::string_view s) {
    if (s.empty() || s.size() > 18) return -1;
    long long v = 0;
    for (char c : s) {
      if (c < '0' || c > '9') return -1;
      v = v * 10 + (c - '0');
    }
    return v;
  }
};

// value > r * total, evaluated exactly.
inline bool exceeds_fraction_of(std::uint64_t value, const Ratio& r, std::uint64_t total) {
  return static_cast<u128>(value) * r.den > static_cast<u128>(r.num) * total;
}

}  // namespace structmatrix
