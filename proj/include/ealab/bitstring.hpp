#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ealab/rng.hpp"

namespace ealab {

// Fixed-length binary search point.  Bit positions follow the weight
// convention used throughout: position i in [1, n], with position n the most
// significant ("leftmost") bit.  Internally bits_[k] holds position k+1.
class BitString {
 public:
  explicit BitString(std::size_t n) : bits_(check_length(n), 0) {}

  BitString(std::size_t n, const std::vector<std::uint8_t>& bits) : bits_(bits) {
    check_length(n);
    if (bits_.size() != n) throw std::invalid_argument("BitString: length mismatch");
    for (auto b : bits_)
      if (b > 1) throw std::invalid_argument("BitString: values must be 0 or 1");
  }

  static BitString zeros(std::size_t n) { return BitString(n); }

  static BitString ones(std::size_t n) {
    BitString x(n);
    for (auto& b : x.bits_) b = 1;
    return x;
  }

  // Parses "101" with the leftmost character as the most significant bit,
  // i.e. from_msb_string("101") has x_3=1, x_2=0, x_1=1.
  static BitString from_msb_string(const std::string& s) {
    BitString x(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      char c = s[s.size() - 1 - k];
      if (c != '0' && c != '1') throw std::invalid_argument("BitString: bad character");
      x.bits_[k] = static_cast<std::uint8_t>(c - '0');
    }
    return x;
  }

  static BitString random(std::size_t n, SplitMix64& rng) {
    BitString x(n);
    for (auto& b : x.bits_) b = rng.next_bit() ? 1 : 0;
    return x;
  }

  std::size_t n() const { return bits_.size(); }

  // 0-based access: index k is bit position k+1.
  bool get(std::size_t k) const { return bits_.at(k) != 0; }
  void set(std::size_t k, bool v) { bits_.at(k) = v ? 1 : 0; }
  void flip(std::size_t k) { bits_.at(k) ^= 1; }

  std::size_t ones_count() const {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
  }

  bool is_zero() const {
    for (auto b : bits_)
      if (b) return false;
    return true;
  }

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::string to_msb_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t k = 0; k < bits_.size(); ++k)
      s[bits_.size() - 1 - k] = bits_[k] ? '1' : '0';
    return s;
  }

  bool operator==(const BitString& other) const { return bits_ == other.bits_; }

 private:
  static std::size_t check_length(std::size_t n) {
    if (n == 0) throw std::invalid_argument("BitString: length must be >= 1");
    return n;
  }

  std::vector<std::uint8_t> bits_;
};

}  // namespace ealab
