#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sl2dyn/sl2.hpp"

namespace sl2dyn {

// One letter of a free-group word: generator index and exponent +-1.
struct Letter {
  uint32_t gen;
  int8_t exp;  // +1 or -1

  bool operator==(const Letter&) const = default;
};

// Letters are ordered by (generator index, +1 before -1); this fixes the
// enumeration order and makes witness selection deterministic.
inline uint32_t letter_rank(const Letter& l) { return 2 * l.gen + (l.exp < 0 ? 1 : 0); }

// Word over a rank-r free alphabet. Not necessarily reduced.
struct Word {
  std::vector<Letter> letters;
  uint32_t rank = 0;

  bool operator==(const Word&) const = default;
  size_t length() const { return letters.size(); }
  std::string str() const;  // e.g. "g0 g1^-1", "()" for the empty word
};

// Lexicographic order on letter ranks; a proper prefix precedes its
// extensions. Matches depth-first enumeration order.
bool lex_less(const Word& a, const Word& b);

// Unique reduced representative of the same group element (adjacent
// cancellations removed). Idempotent.
Word reduce(const Word& w);

// Evaluates the homomorphism sending generator i to images[i]; exact product
// of images and inverses in letter order.
IntMat2 evaluate(const Word& w, std::span<const IntMat2> images);

// Number of reduced words of exactly the given length: 2r (2r-1)^(L-1).
uint64_t reduced_word_count(uint32_t rank, uint32_t length);

// Yields every reduced word of exactly `length` once, in lexicographic
// (depth-first) order.
void enumerate_reduced(uint32_t rank, uint32_t length,
                       const std::function<void(const Word&)>& yield);

struct FreenessReport {
  uint32_t rank = 0;
  uint32_t max_length = 0;
  uint64_t words_checked = 0;
  // A nontrivial reduced word evaluating to the identity; present iff
  // freeness is refuted within max_length. Shortest, then lexicographically
  // least.
  std::optional<Word> witness;
};

// Exhaustively evaluates all reduced words of length 1..max_length in
// increasing length. Scans are partitioned by first letter across workers;
// results are independent of the worker count.
FreenessReport freeness_scan(std::span<const IntMat2> images, uint32_t max_length);

}  // namespace sl2dyn
