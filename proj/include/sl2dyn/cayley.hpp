#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <variant>
#include <vector>

#include "sl2dyn/sl2.hpp"
#include "sl2dyn/walk_operator.hpp"

namespace sl2dyn {

namespace detail {

// Insert-only open-addressing map element-key -> index. Linear probing,
// power-of-two capacity, load kept below 1/2. Deterministic layout.
template <typename Key>
class FlatIndexMap {
 public:
  explicit FlatIndexMap(uint64_t expected = 64);

  // Returns the existing index or assigns `fresh` to the key.
  uint32_t find_or_insert(Key key, uint32_t fresh, bool& inserted);
  std::optional<uint32_t> find(Key key) const;
  uint64_t size() const { return size_; }

 private:
  void grow();
  uint64_t slot_of(Key key) const;

  std::vector<Key> keys_;
  std::vector<uint32_t> vals_;
  std::vector<uint8_t> used_;
  uint64_t mask_ = 0;
  uint64_t size_ = 0;
};

}  // namespace detail

struct EnumerationOptions {
  uint64_t max_elements = 20'000'000;
};

// BFS enumeration of the subgroup of SL2(Z_p) generated by the projected
// generators, closed under right multiplication by the symmetric generator
// multiset S u S^-1 (gens first, then their inverses, in input order).
// Discovery order is the canonical element indexing everywhere downstream;
// the identity sits at index 0.
class GroupTable {
 public:
  static GroupTable enumerate(const Prime& p, std::span<const IntMat2> gens,
                              const EnumerationOptions& opt = {});

  const Prime& prime() const { return prime_; }
  uint32_t size() const { return static_cast<uint32_t>(elements_.size()); }
  uint32_t degree() const { return degree_; }

  const ModMat2& element(uint32_t i) const { return elements_[i]; }
  const std::vector<ModMat2>& gen_images() const { return gen_images_; }

  // Index of elements_[i] * gen_images_[k].
  uint32_t move(uint32_t i, uint32_t k) const { return move_table_[static_cast<uint64_t>(i) * degree_ + k]; }
  const std::vector<uint32_t>& move_table() const { return move_table_; }

  std::optional<uint32_t> index_of(const ModMat2& m) const;
  // General group law / inverse by index; elements are closed so lookups
  // always succeed.
  uint32_t mul_index(uint32_t i, uint32_t j) const;
  uint32_t inverse_index(uint32_t i) const;

 private:
  GroupTable(Prime p, uint32_t degree) : prime_(p), degree_(degree) {}

  Prime prime_;
  uint32_t degree_;
  std::vector<ModMat2> elements_;
  std::vector<ModMat2> gen_images_;
  std::vector<uint32_t> move_table_;
  // Packed 64-bit keys for p < 2^16, wide keys above.
  std::variant<detail::FlatIndexMap<uint64_t>, detail::FlatIndexMap<unsigned __int128>> index_;
};

struct GenerationReport {
  uint32_t prime = 0;
  uint64_t subgroup_size = 0;
  uint64_t full_group_size = 0;
  bool generated = false;
};

// Compares the BFS subgroup order against p (p^2 - 1).
GenerationReport generation_check(const Prime& p, std::span<const IntMat2> gens,
                                  const EnumerationOptions& opt = {});

// The Cayley-graph operator (Af)(g) = (1/d) sum_s f(g s) over the symmetric
// generator multiset. Self-adjoint by construction.
WalkOperator walk_operator(const GroupTable& table);

// Little-endian binary dump: "SL2T", u32 p, u32 size, u32 degree, then the
// move table as size rows of degree u32 each.
void dump_table(const GroupTable& table, std::ostream& os);

}  // namespace sl2dyn
