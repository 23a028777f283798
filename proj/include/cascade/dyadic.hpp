#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "cascade/errors.hpp"

namespace cascade {

// Address of a dyadic subinterval of [0,1]. The word i_1 i_2 ... i_k names
//
//   I = [ sum_j i_j 2^-j,  sum_j i_j 2^-j + 2^-k ),
//
// with the empty word naming [0,1] itself. The bits are stored as the
// numeric value of the word in a 128-bit accumulator, so appending a bit is
// a shift; two equal-length paths are equal iff their values are equal.
//
// Paths longer than 128 levels are allowed as long as every set bit lies in
// the last 128 levels. That covers arbitrarily deep all-zero stems (used by
// the drift diagnostics) while keeping the encoding injective.
class DyadicPath {
 public:
  DyadicPath() = default;

  // Word given as its numeric value, most significant bit first.
  static DyadicPath from_word(std::uint64_t word, int length) {
    if (length < 0 || length > 63 || (length < 64 && (word >> length) != 0))
      throw grid_error("dyadic path: word does not fit the stated length");
    DyadicPath p;
    p.lo_ = word;
    p.len_ = length;
    return p;
  }

  static DyadicPath from_bits(std::initializer_list<int> bits) {
    DyadicPath p;
    for (int b : bits) p = p.child(b);
    return p;
  }

  static DyadicPath zeros(int length) {
    if (length < 0) throw grid_error("dyadic path: negative length");
    DyadicPath p;
    p.len_ = length;
    return p;
  }

  int length() const { return len_; }
  bool empty() const { return len_ == 0; }

  // j-th step from the root, 1-based.
  int bit(int j) const {
    if (j < 1 || j > len_) throw grid_error("dyadic path: bit index out of range");
    int shift = len_ - j;  // bits older than 128 levels are zero by invariant
    if (shift >= 128) return 0;
    if (shift >= 64) return static_cast<int>((hi_ >> (shift - 64)) & 1u);
    return static_cast<int>((lo_ >> shift) & 1u);
  }

  DyadicPath child(int b) const {
    if (b != 0 && b != 1) throw grid_error("dyadic path: bit must be 0 or 1");
    DyadicPath p = *this;
    if (hi_ >> 63) throw resource_error("dyadic path: bit pattern exceeds 128 levels");
    p.hi_ = (hi_ << 1) | (lo_ >> 63);
    p.lo_ = (lo_ << 1) | static_cast<std::uint64_t>(b);
    p.len_ = len_ + 1;
    return p;
  }

  DyadicPath parent() const {
    if (len_ == 0) throw grid_error("dyadic path: root has no parent");
    DyadicPath p = *this;
    p.lo_ = (lo_ >> 1) | (hi_ << 63);
    p.hi_ = hi_ >> 1;
    p.len_ = len_ - 1;
    return p;
  }

  // Numeric value of the word; only valid for paths of length <= 63.
  std::uint64_t word() const {
    if (len_ > 63) throw resource_error("dyadic path: word form needs length <= 63");
    return lo_;
  }

  std::uint64_t value_lo() const { return lo_; }
  std::uint64_t value_hi() const { return hi_; }

  // Left endpoint of the named interval; exact for lengths <= 53.
  double left_endpoint() const {
    if (len_ > 63) throw resource_error("dyadic path: endpoint needs length <= 63");
    return static_cast<double>(lo_) * width();
  }

  double width() const { return std::ldexp(1.0, -len_); }

  friend bool operator==(const DyadicPath& a, const DyadicPath& b) {
    return a.len_ == b.len_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  std::uint64_t lo_ = 0;
  std::uint64_t hi_ = 0;
  int len_ = 0;
};

}  // namespace cascade
