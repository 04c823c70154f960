#include "sl2dyn/words.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "sl2dyn/parallel.hpp"

namespace sl2dyn {

std::string Word::str() const {
  if (letters.empty()) return "()";
  std::ostringstream os;
  for (size_t i = 0; i < letters.size(); ++i) {
    if (i) os << " ";
    os << "g" << letters[i].gen;
    if (letters[i].exp < 0) os << "^-1";
  }
  return os.str();
}

bool lex_less(const Word& a, const Word& b) {
  const size_t n = std::min(a.letters.size(), b.letters.size());
  for (size_t i = 0; i < n; ++i) {
    const uint32_t ra = letter_rank(a.letters[i]);
    const uint32_t rb = letter_rank(b.letters[i]);
    if (ra != rb) return ra < rb;
  }
  return a.letters.size() < b.letters.size();
}

Word reduce(const Word& w) {
  Word out;
  out.rank = w.rank;
  out.letters.reserve(w.letters.size());
  for (const Letter& l : w.letters) {
    if (!out.letters.empty() && out.letters.back().gen == l.gen &&
        out.letters.back().exp == -l.exp) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(l);
    }
  }
  return out;
}

IntMat2 evaluate(const Word& w, std::span<const IntMat2> images) {
  std::vector<IntMat2> inv;
  inv.reserve(images.size());
  for (const IntMat2& m : images) inv.push_back(m.inverse());
  IntMat2 acc;
  for (const Letter& l : w.letters) {
    acc = acc * (l.exp > 0 ? images[l.gen] : inv[l.gen]);
  }
  return acc;
}

uint64_t reduced_word_count(uint32_t rank, uint32_t length) {
  if (length == 0) return 1;
  uint64_t n = 2ull * rank;
  for (uint32_t i = 1; i < length; ++i) n *= 2ull * rank - 1;
  return n;
}

namespace {

Letter letter_of_rank(uint32_t r) {
  return Letter{r / 2, static_cast<int8_t>(r % 2 == 0 ? 1 : -1)};
}

// Depth-first walk of reduced words of exact length `length` starting with
// the fixed first letter; prefix products are reused along the tree (one
// matrix multiply per node). visit(word_letters, value) runs at the leaves.
void dfs_exact_length(uint32_t rank, uint32_t length, uint32_t first_rank,
                      std::span<const IntMat2> images, std::span<const IntMat2> inverses,
                      const std::function<void(std::span<const Letter>, const IntMat2&)>& visit) {
  std::vector<Letter> stack_letters(length);
  std::vector<IntMat2> prefix(length + 1);
  const auto image_of = [&](const Letter& l) -> const IntMat2& {
    return l.exp > 0 ? images[l.gen] : inverses[l.gen];
  };

  stack_letters[0] = letter_of_rank(first_rank);
  prefix[1] = prefix[0] * image_of(stack_letters[0]);
  if (length == 1) {
    visit(std::span<const Letter>(stack_letters.data(), 1), prefix[1]);
    return;
  }

  // next_rank[d] = next candidate letter rank to try at depth d.
  std::vector<uint32_t> next_rank(length, 0);
  uint32_t depth = 1;
  while (true) {
    if (next_rank[depth] >= 2 * rank) {
      next_rank[depth] = 0;
      if (depth == 1) break;
      --depth;
      continue;
    }
    const Letter cand = letter_of_rank(next_rank[depth]++);
    const Letter& prev = stack_letters[depth - 1];
    if (cand.gen == prev.gen && cand.exp == -prev.exp) continue;  // backtracking letter
    stack_letters[depth] = cand;
    prefix[depth + 1] = prefix[depth] * image_of(cand);
    if (depth + 1 == length) {
      visit(std::span<const Letter>(stack_letters.data(), length), prefix[depth + 1]);
    } else {
      ++depth;
    }
  }
}

}  // namespace

void enumerate_reduced(uint32_t rank, uint32_t length,
                       const std::function<void(const Word&)>& yield) {
  if (rank == 0 || length == 0) return;
  // Evaluation is irrelevant here; reuse the walker with identity images.
  std::vector<IntMat2> ids(rank), invs(rank);
  for (uint32_t first = 0; first < 2 * rank; ++first) {
    dfs_exact_length(rank, length, first, ids, invs,
                     [&](std::span<const Letter> letters, const IntMat2&) {
                       Word w;
                       w.rank = rank;
                       w.letters.assign(letters.begin(), letters.end());
                       yield(w);
                     });
  }
}

FreenessReport freeness_scan(std::span<const IntMat2> images, uint32_t max_length) {
  const uint32_t rank = static_cast<uint32_t>(images.size());
  FreenessReport report;
  report.rank = rank;
  report.max_length = max_length;
  if (rank == 0) return report;

  std::vector<IntMat2> inverses;
  inverses.reserve(rank);
  for (const IntMat2& m : images) inverses.push_back(m.inverse());

  for (uint32_t length = 1; length <= max_length; ++length) {
    const uint32_t roots = 2 * rank;
    std::vector<std::optional<Word>> found(roots);

    auto scan_root = [&](uint32_t first) {
      std::optional<Word>& best = found[first];
      dfs_exact_length(rank, length, first, images, inverses,
                       [&](std::span<const Letter> letters, const IntMat2& value) {
                         if (best || !value.is_identity()) return;
                         Word w;
                         w.rank = rank;
                         w.letters.assign(letters.begin(), letters.end());
                         best = std::move(w);
                       });
    };

    const unsigned workers = std::min<unsigned>(worker_count(), roots);
    if (workers <= 1) {
      for (uint32_t first = 0; first < roots; ++first) scan_root(first);
    } else {
      std::atomic<uint32_t> next{0};
      auto run = [&] {
        for (;;) {
          const uint32_t first = next.fetch_add(1);
          if (first >= roots) return;
          scan_root(first);
        }
      };
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
      run();
      for (auto& th : pool) th.join();
    }

    report.words_checked += reduced_word_count(rank, length);

    // Roots are scanned in generator order, so the first hit is the
    // lexicographically least witness of this length.
    for (uint32_t first = 0; first < roots; ++first) {
      if (found[first]) {
        report.witness = std::move(found[first]);
        return report;
      }
    }
  }
  return report;
}

}  // namespace sl2dyn
