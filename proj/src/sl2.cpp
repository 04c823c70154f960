#include "sl2dyn/sl2.hpp"

#include <sstream>

namespace sl2dyn {

IntMat2::IntMat2(BigInt a11, BigInt a12, BigInt a21, BigInt a22)
    : e_{std::move(a11), std::move(a12), std::move(a21), std::move(a22)} {
  if (det() != 1) {
    throw ValidationError("IntMat2: determinant must be 1, got " + det().str());
  }
}

IntMat2 IntMat2::inverse() const {
  return IntMat2(unchecked_t{}, e_[3], -e_[1], -e_[2], e_[0]);
}

IntMat2 operator*(const IntMat2& m, const IntMat2& n) {
  // Product of det-1 matrices has det 1; skip the check on this hot path.
  return IntMat2(IntMat2::unchecked_t{},
                 m.e_[0] * n.e_[0] + m.e_[1] * n.e_[2],
                 m.e_[0] * n.e_[1] + m.e_[1] * n.e_[3],
                 m.e_[2] * n.e_[0] + m.e_[3] * n.e_[2],
                 m.e_[2] * n.e_[1] + m.e_[3] * n.e_[3]);
}

std::string IntMat2::str() const {
  std::ostringstream os;
  os << "[[" << e_[0] << "," << e_[1] << "],[" << e_[2] << "," << e_[3] << "]]";
  return os.str();
}

namespace {

bool is_odd_prime(uint32_t v) {
  if (v < 3 || v % 2 == 0) return false;
  for (uint64_t d = 3; d * d <= v; d += 2) {
    if (v % d == 0) return false;
  }
  return true;
}

}  // namespace

Prime::Prime(uint32_t value) : value_(value) {
  if (value == 2) {
    throw ValidationError("p = 2 is excluded: the working generators reduce to the identity mod 2");
  }
  if (value >= (1u << 31)) {
    throw ValidationError("prime modulus must be below 2^31");
  }
  if (!is_odd_prime(value)) {
    throw ValidationError("not an odd prime: " + std::to_string(value));
  }
}

ModMat2::ModMat2(uint32_t a11, uint32_t a12, uint32_t a21, uint32_t a22, uint32_t p)
    : e_{a11, a12, a21, a22}, p_(p) {
  if (p < 3) throw ValidationError("ModMat2: modulus must be an odd prime >= 3");
  for (uint32_t v : e_) {
    if (v >= p) throw ValidationError("ModMat2: entry not reduced into [0, p)");
  }
  const uint64_t det =
      (static_cast<uint64_t>(e_[0]) * e_[3] % p + p - static_cast<uint64_t>(e_[1]) * e_[2] % p) % p;
  if (det != 1) {
    throw ValidationError("ModMat2: determinant must be 1 mod " + std::to_string(p));
  }
}

ModMat2 ModMat2::inverse() const {
  const uint32_t p = p_;
  return ModMat2(unchecked_t{}, e_[3], (p - e_[1]) % p, (p - e_[2]) % p, e_[0], p);
}

ModMat2 operator*(const ModMat2& m, const ModMat2& n) {
  if (m.p_ != n.p_) throw ValidationError("ModMat2: mixed moduli");
  const uint64_t p = m.p_;
  const auto& a = m.e_;
  const auto& b = n.e_;
  return ModMat2(ModMat2::unchecked_t{},
                 static_cast<uint32_t>((static_cast<uint64_t>(a[0]) * b[0] + static_cast<uint64_t>(a[1]) * b[2]) % p),
                 static_cast<uint32_t>((static_cast<uint64_t>(a[0]) * b[1] + static_cast<uint64_t>(a[1]) * b[3]) % p),
                 static_cast<uint32_t>((static_cast<uint64_t>(a[2]) * b[0] + static_cast<uint64_t>(a[3]) * b[2]) % p),
                 static_cast<uint32_t>((static_cast<uint64_t>(a[2]) * b[1] + static_cast<uint64_t>(a[3]) * b[3]) % p),
                 m.p_);
}

std::string ModMat2::str() const {
  std::ostringstream os;
  os << "[[" << e_[0] << "," << e_[1] << "],[" << e_[2] << "," << e_[3] << "]] mod " << p_;
  return os.str();
}

ModMat2 reduce_mod(const IntMat2& m, const Prime& p) {
  const uint32_t q = p.value();
  uint32_t r[4];
  for (int i = 0; i < 4; ++i) {
    BigInt v = m.at(i / 2, i % 2) % q;
    if (v < 0) v += q;
    r[i] = v.convert_to<uint32_t>();
  }
  return ModMat2(r[0], r[1], r[2], r[3], q);
}

const Generators& canonical_generators() {
  static const Generators g = [] {
    IntMat2 x(1, 2, 0, 1);
    IntMat2 y(1, 0, 2, 1);
    IntMat2 xy = x * y;
    return Generators{x, y, x * x, y * y, xy * xy};
  }();
  return g;
}

uint64_t sl2_order(const Prime& p) {
  const uint64_t v = p.value();
  if (v > 2'097'143) {
    throw CapacityError("p (p^2 - 1) exceeds the 64-bit range for p = " + std::to_string(v));
  }
  return v * (v * v - 1);
}

}  // namespace sl2dyn
