#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "sl2dyn/errors.hpp"

namespace sl2dyn {

using BigInt = boost::multiprecision::cpp_int;

// Element of SL2(Z). Entries are arbitrary precision: products of long
// generator words grow exponentially and must stay exact.
class IntMat2 {
 public:
  IntMat2() : e_{1, 0, 0, 1} {}

  // Throws ValidationError unless det == 1.
  IntMat2(BigInt a11, BigInt a12, BigInt a21, BigInt a22);

  const BigInt& at(int row, int col) const { return e_[row * 2 + col]; }

  BigInt det() const { return e_[0] * e_[3] - e_[1] * e_[2]; }

  bool is_identity() const {
    return e_[0] == 1 && e_[1] == 0 && e_[2] == 0 && e_[3] == 1;
  }

  // Adjugate [[a22,-a12],[-a21,a11]]; exact inverse since det == 1.
  IntMat2 inverse() const;

  friend IntMat2 operator*(const IntMat2& m, const IntMat2& n);
  bool operator==(const IntMat2&) const = default;

  std::string str() const;  // "[[1,2],[0,1]]"

 private:
  struct unchecked_t {};
  IntMat2(unchecked_t, BigInt a, BigInt b, BigInt c, BigInt d)
      : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {}

  std::array<BigInt, 4> e_;
};

// Odd prime, validated by trial division at construction (desk-scale values
// only). p = 2 is rejected everywhere: the generators a, b reduce to the
// identity mod 2 so nothing downstream is meaningful there.
class Prime {
 public:
  explicit Prime(uint32_t value);

  uint32_t value() const { return value_; }
  int residue_class_mod4() const { return value_ % 4; }

  bool operator==(const Prime&) const = default;

 private:
  uint32_t value_;
};

// Element of SL2(Z_p): four residues in [0, p), det == 1 (mod p).
// Residues are machine words; p must stay below 2^31 so products fit u64.
class ModMat2 {
 public:
  ModMat2(uint32_t a11, uint32_t a12, uint32_t a21, uint32_t a22, uint32_t p);

  static ModMat2 identity(uint32_t p) { return ModMat2(1 % p, 0, 0, 1 % p, p); }

  uint32_t at(int row, int col) const { return e_[row * 2 + col]; }
  uint32_t modulus() const { return p_; }

  ModMat2 inverse() const;  // adjugate mod p

  bool is_identity() const {
    return e_[0] == 1 && e_[1] == 0 && e_[2] == 0 && e_[3] == 1;
  }

  // Packed element key for hashing; valid when p < 2^16.
  uint64_t packed_key() const {
    return static_cast<uint64_t>(e_[0]) | (static_cast<uint64_t>(e_[1]) << 16) |
           (static_cast<uint64_t>(e_[2]) << 32) | (static_cast<uint64_t>(e_[3]) << 48);
  }
  // Wide key for p >= 2^16.
  unsigned __int128 wide_key() const {
    const unsigned __int128 lo =
        static_cast<uint64_t>(e_[0]) | (static_cast<uint64_t>(e_[1]) << 32);
    const unsigned __int128 hi =
        static_cast<uint64_t>(e_[2]) | (static_cast<uint64_t>(e_[3]) << 32);
    return lo | (hi << 64);
  }

  friend ModMat2 operator*(const ModMat2& m, const ModMat2& n);
  bool operator==(const ModMat2&) const = default;

  std::string str() const;

 private:
  struct unchecked_t {};
  ModMat2(unchecked_t, uint32_t a, uint32_t b, uint32_t c, uint32_t d, uint32_t p)
      : e_{a, b, c, d}, p_(p) {}

  std::array<uint32_t, 4> e_;
  uint32_t p_;
};

// Entrywise reduction into [0, p). A group homomorphism SL2(Z) -> SL2(Z_p).
ModMat2 reduce_mod(const IntMat2& m, const Prime& p);

// x = [[1,2],[0,1]] and y = [[1,0],[2,1]] generate a free group in SL2(Z);
// a = x^2, b = y^2, and c = (xy)^2 give the rank-3 tuple used throughout.
struct Generators {
  IntMat2 x, y, a, b, c;
};
const Generators& canonical_generators();

// |SL2(Z_p)| = p (p^2 - 1). Throws CapacityError if it would not fit in u64.
uint64_t sl2_order(const Prime& p);

}  // namespace sl2dyn
