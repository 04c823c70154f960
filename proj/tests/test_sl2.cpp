#include <doctest.h>

#include "sl2dyn/rng.hpp"
#include "sl2dyn/sl2.hpp"

using namespace sl2dyn;

namespace {

IntMat2 mat(long a, long b, long c, long d) { return IntMat2(a, b, c, d); }

// Random reduced word over {a,b,c} and inverses, evaluated exactly.
IntMat2 random_element(Rng& rng, int max_len) {
  const Generators& g = canonical_generators();
  const IntMat2 gens[6] = {g.a, g.b, g.c, g.a.inverse(), g.b.inverse(), g.c.inverse()};
  IntMat2 acc;
  int prev = -1;
  const int len = 1 + static_cast<int>(rng.below(max_len));
  for (int i = 0; i < len; ++i) {
    int k = static_cast<int>(rng.below(6));
    while (prev >= 0 && k == (prev + 3) % 6) k = static_cast<int>(rng.below(6));
    acc = acc * gens[k];
    prev = k;
  }
  return acc;
}

}  // namespace

TEST_CASE("canonical generators match their defining products") {
  const Generators& g = canonical_generators();
  CHECK(g.x == mat(1, 2, 0, 1));
  CHECK(g.y == mat(1, 0, 2, 1));
  CHECK(g.a == g.x * g.x);
  CHECK(g.b == g.y * g.y);
  CHECK(g.a == mat(1, 4, 0, 1));
  CHECK(g.b == mat(1, 0, 4, 1));
  const IntMat2 xy = g.x * g.y;
  CHECK(xy == mat(5, 2, 2, 1));
  CHECK(g.c == xy * xy);
  CHECK(g.c == mat(29, 12, 12, 5));
  CHECK(g.c.det() == 1);
}

TEST_CASE("multiplication examples") {
  const Generators& g = canonical_generators();
  CHECK(g.x * IntMat2() == g.x);
  CHECK(g.x * g.y == mat(5, 2, 2, 1));
  CHECK(g.x * g.x == mat(1, 4, 0, 1));
  CHECK(g.a * g.b == mat(17, 4, 4, 1));
}

TEST_CASE("inverse examples") {
  const Generators& g = canonical_generators();
  CHECK(IntMat2().inverse() == IntMat2());
  CHECK(g.x.inverse() == mat(1, -2, 0, 1));
  const IntMat2 xy = g.x * g.y;
  CHECK(xy.inverse() == mat(1, -2, -2, 5));
  CHECK(xy.inverse() * xy == IntMat2());
  CHECK(g.a * g.a.inverse() == IntMat2());
}

TEST_CASE("construction rejects determinant != 1") {
  CHECK_THROWS_AS(IntMat2(1, 0, 0, 2), ValidationError);
  CHECK_THROWS_AS(IntMat2(0, 0, 0, 0), ValidationError);
}

TEST_CASE("prime validation") {
  CHECK(Prime(3).value() == 3);
  CHECK(Prime(3).residue_class_mod4() == 3);
  CHECK(Prime(5).residue_class_mod4() == 1);
  CHECK(Prime(61).residue_class_mod4() == 1);
  CHECK(Prime(65537).value() == 65537);
  CHECK_THROWS_AS(Prime(2), ValidationError);
  CHECK_THROWS_AS(Prime(1), ValidationError);
  CHECK_THROWS_AS(Prime(9), ValidationError);
  CHECK_THROWS_AS(Prime(91), ValidationError);  // 7 * 13
  CHECK_THROWS_AS(Prime(0), ValidationError);
}

TEST_CASE("reduce_mod examples") {
  const Generators& g = canonical_generators();
  CHECK(reduce_mod(g.a, Prime(3)) == ModMat2(1, 1, 0, 1, 3));
  CHECK(reduce_mod(g.a, Prime(5)) == ModMat2(1, 4, 0, 1, 5));
  CHECK(reduce_mod(g.c, Prime(7)) == ModMat2(1, 5, 5, 5, 7));
  // negative entries reduce into [0, p)
  CHECK(reduce_mod(g.x.inverse(), Prime(5)) == ModMat2(1, 3, 0, 1, 5));
}

TEST_CASE("mod matrix construction enforces det == 1 mod p") {
  CHECK_THROWS_AS(ModMat2(1, 0, 0, 2, 5), ValidationError);
  CHECK_THROWS_AS(ModMat2(1, 0, 0, 6, 5), ValidationError);  // unreduced entry
  CHECK(ModMat2(2, 1, 3, 2, 5).at(0, 0) == 2);               // det 4-3=1
}

TEST_CASE("mod inverse and identity") {
  const ModMat2 m = reduce_mod(canonical_generators().c, Prime(7));
  CHECK(m * m.inverse() == ModMat2::identity(7));
  CHECK(m.inverse() * m == ModMat2::identity(7));
}

TEST_CASE("reduction is a homomorphism on random elements") {
  Rng rng(20240809);
  const uint32_t primes[] = {3, 5, 7, 13, 101, 65537};
  for (int trial = 0; trial < 40; ++trial) {
    const IntMat2 m1 = random_element(rng, 20);
    const IntMat2 m2 = random_element(rng, 20);
    CHECK((m1 * m2).det() == 1);
    CHECK(m1.inverse().inverse() == m1);
    for (uint32_t pv : primes) {
      const Prime p(pv);
      CHECK(reduce_mod(m1 * m2, p) == reduce_mod(m1, p) * reduce_mod(m2, p));
    }
  }
}

TEST_CASE("group order formula") {
  CHECK(sl2_order(Prime(3)) == 24);
  CHECK(sl2_order(Prime(5)) == 120);
  CHECK(sl2_order(Prime(7)) == 336);
  CHECK(sl2_order(Prime(101)) == 1030200);
}
