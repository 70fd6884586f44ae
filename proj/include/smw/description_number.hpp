#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "smw/errors.hpp"

namespace smw {

using BigNat = boost::multiprecision::cpp_int;

// Arbitrary-precision natural naming one Standard Description.
class DescriptionNumber {
 public:
  DescriptionNumber() = default;
  explicit DescriptionNumber(BigNat value) : value_(std::move(value)) {
    if (value_ < 0) throw InvalidNumber("description numbers are non-negative");
  }
  DescriptionNumber(unsigned long long value) : value_(value) {}  // NOLINT

  // Parses a canonical decimal string (no sign, no leading zeros).
  static DescriptionNumber from_string(std::string_view digits) {
    if (digits.empty()) throw InvalidNumber("empty digit string");
    if (digits.size() > 1 && digits.front() == '0')
      throw InvalidNumber("leading zero in '" + std::string(digits) + "'");
    for (char ch : digits) {
      if (ch < '0' || ch > '9')
        throw InvalidNumber("non-digit in '" + std::string(digits) + "'");
    }
    return DescriptionNumber(BigNat(std::string(digits)));
  }

  const BigNat& value() const { return value_; }
  std::string str() const { return value_.str(); }

  DescriptionNumber next() const { return DescriptionNumber(value_ + 1); }

  friend bool operator==(const DescriptionNumber& a, const DescriptionNumber& b) {
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const DescriptionNumber& a,
                                          const DescriptionNumber& b) {
    return a.value_.compare(b.value_) <=> 0;
  }

 private:
  BigNat value_ = 0;
};

// Position of the highest set bit, counted from 1.
inline std::size_t bit_length(const BigNat& value) {
  if (value <= 0) throw InvalidNumber("bit_length requires a positive value");
  return boost::multiprecision::msb(value) + 1;
}

inline std::size_t bit_length(const DescriptionNumber& dn) { return bit_length(dn.value()); }

// 2^n - 1: the top of the descending scan.
inline BigNat complement_bound(std::size_t n) {
  if (n == 0) throw InvalidNumber("complement_bound requires n >= 1");
  BigNat one = 1;
  return (one << n) - 1;
}

}  // namespace smw
