#include <doctest.h>

#include <map>
#include <set>

#include "sl2dyn/parallel.hpp"
#include "sl2dyn/rng.hpp"
#include "sl2dyn/words.hpp"

using namespace sl2dyn;

namespace {

Word make_word(uint32_t rank, std::initializer_list<std::pair<uint32_t, int>> ls) {
  Word w;
  w.rank = rank;
  for (auto [g, e] : ls) w.letters.push_back(Letter{g, static_cast<int8_t>(e)});
  return w;
}

Word random_raw_word(Rng& rng, uint32_t rank, size_t len) {
  Word w;
  w.rank = rank;
  for (size_t i = 0; i < len; ++i) {
    w.letters.push_back(
        Letter{static_cast<uint32_t>(rng.below(rank)), static_cast<int8_t>(rng.below(2) ? 1 : -1)});
  }
  return w;
}

}  // namespace

TEST_CASE("reduce examples") {
  CHECK(reduce(make_word(2, {{0, 1}, {0, -1}})).letters.empty());
  CHECK(reduce(make_word(2, {})).letters.empty());
  CHECK(reduce(make_word(2, {{0, 1}, {1, 1}, {1, -1}, {0, 1}})) ==
        make_word(2, {{0, 1}, {0, 1}}));
  // cascading cancellation
  CHECK(reduce(make_word(2, {{0, 1}, {1, 1}, {1, -1}, {0, -1}})).letters.empty());
}

TEST_CASE("reduce is idempotent on random words") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const Word w = random_raw_word(rng, 3, rng.below(24));
    const Word r = reduce(w);
    CHECK(reduce(r) == r);
    for (size_t i = 0; i + 1 < r.letters.size(); ++i) {
      const bool cancels =
          r.letters[i].gen == r.letters[i + 1].gen && r.letters[i].exp == -r.letters[i + 1].exp;
      CHECK_FALSE(cancels);
    }
  }
}

TEST_CASE("evaluate examples") {
  const Generators& g = canonical_generators();
  const IntMat2 images[] = {g.a, g.b, g.c};
  CHECK(evaluate(make_word(3, {}), images) == IntMat2());
  CHECK(evaluate(make_word(3, {{0, 1}, {1, 1}}), images) == IntMat2(17, 4, 4, 1));
  CHECK(evaluate(make_word(3, {{0, 1}, {0, -1}, {1, 1}}), images) == g.b);
}

TEST_CASE("evaluation respects reduction and concatenation") {
  const Generators& g = canonical_generators();
  const IntMat2 images[] = {g.a, g.b, g.c};
  Rng rng(99);
  for (int t = 0; t < 60; ++t) {
    const Word w1 = random_raw_word(rng, 3, rng.below(14));
    const Word w2 = random_raw_word(rng, 3, rng.below(14));
    CHECK(evaluate(reduce(w1), images) == evaluate(w1, images));
    Word cat = w1;
    cat.letters.insert(cat.letters.end(), w2.letters.begin(), w2.letters.end());
    CHECK(evaluate(reduce(cat), images) == evaluate(w1, images) * evaluate(w2, images));
  }
}

TEST_CASE("enumeration counts match the closed form") {
  CHECK(reduced_word_count(3, 1) == 6);
  CHECK(reduced_word_count(3, 2) == 30);
  CHECK(reduced_word_count(2, 3) == 36);
  for (uint32_t r = 1; r <= 3; ++r) {
    for (uint32_t len = 1; len <= 8; ++len) {
      uint64_t seen = 0;
      enumerate_reduced(r, len, [&](const Word&) { ++seen; });
      CHECK(seen == reduced_word_count(r, len));
    }
  }
}

TEST_CASE("enumerated words are reduced, distinct, of exact length, in lex order") {
  std::set<std::vector<uint32_t>> seen;
  Word prev;
  bool first = true;
  enumerate_reduced(3, 4, [&](const Word& w) {
    CHECK(w.length() == 4);
    CHECK(reduce(w) == w);
    std::vector<uint32_t> key;
    for (const Letter& l : w.letters) key.push_back(letter_rank(l));
    CHECK(seen.insert(key).second);
    if (!first) CHECK(lex_less(prev, w));
    prev = w;
    first = false;
  });
  CHECK(seen.size() == reduced_word_count(3, 4));
}

TEST_CASE("freeness: duplicated generator refuted at length 2 with the least witness") {
  const Generators& g = canonical_generators();
  const IntMat2 dup[] = {g.a, g.a};
  const FreenessReport rep = freeness_scan(dup, 2);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == make_word(2, {{0, 1}, {1, -1}}));
  CHECK(rep.witness->str() == "g0 g1^-1");
  CHECK(rep.words_checked == 4 + 12);
}

TEST_CASE("freeness witness selection is monotone in the length bound") {
  const Generators& g = canonical_generators();
  const IntMat2 dup[] = {g.a, g.a};
  const FreenessReport at2 = freeness_scan(dup, 2);
  const FreenessReport at5 = freeness_scan(dup, 5);
  REQUIRE(at2.witness.has_value());
  REQUIRE(at5.witness.has_value());
  CHECK(*at2.witness == *at5.witness);
}

TEST_CASE("freeness: generator with its inverse, and the identity image") {
  const Generators& g = canonical_generators();
  const IntMat2 pair[] = {g.a, g.a.inverse()};
  const FreenessReport rep = freeness_scan(pair, 3);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == make_word(2, {{0, 1}, {1, 1}}));

  const IntMat2 only_id[] = {IntMat2()};
  const FreenessReport idrep = freeness_scan(only_id, 3);
  REQUIRE(idrep.witness.has_value());
  CHECK(*idrep.witness == make_word(1, {{0, 1}}));
  CHECK(idrep.words_checked == 2);  // both length-1 words; scan stops there
}

TEST_CASE("freeness: {a,b} has no relation up to length 10") {
  const Generators& g = canonical_generators();
  const IntMat2 images[] = {g.a, g.b};
  const FreenessReport rep = freeness_scan(images, 10);
  CHECK_FALSE(rep.witness.has_value());
  uint64_t expect = 0;
  for (uint32_t len = 1; len <= 10; ++len) expect += reduced_word_count(2, len);
  CHECK(rep.words_checked == expect);
}

TEST_CASE("freeness scan result is independent of the worker count") {
  const Generators& g = canonical_generators();
  const IntMat2 dup[] = {g.a, g.b, g.a};
  set_worker_count(1);
  const FreenessReport serial = freeness_scan(dup, 4);
  set_worker_count(4);
  const FreenessReport parallel = freeness_scan(dup, 4);
  set_worker_count(1);
  REQUIRE(serial.witness.has_value());
  REQUIRE(parallel.witness.has_value());
  CHECK(*serial.witness == *parallel.witness);
  CHECK(serial.words_checked == parallel.words_checked);
  // g0 g2^-1 is the least relation: the first and third images coincide
  CHECK(*serial.witness == make_word(3, {{0, 1}, {2, -1}}));
}
