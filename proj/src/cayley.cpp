#include "sl2dyn/cayley.hpp"

#include <string>

#include "sl2dyn/rng.hpp"

namespace sl2dyn {

namespace detail {

namespace {

uint64_t hash_key(uint64_t k) { return mix64(k); }
uint64_t hash_key(unsigned __int128 k) {
  return mix64(static_cast<uint64_t>(k) ^ mix64(static_cast<uint64_t>(k >> 64)));
}

uint64_t round_up_pow2(uint64_t v) {
  uint64_t c = 64;
  while (c < v) c <<= 1;
  return c;
}

}  // namespace

template <typename Key>
FlatIndexMap<Key>::FlatIndexMap(uint64_t expected) {
  const uint64_t cap = round_up_pow2(expected * 2 + 16);
  keys_.resize(cap);
  vals_.resize(cap);
  used_.assign(cap, 0);
  mask_ = cap - 1;
}

template <typename Key>
uint64_t FlatIndexMap<Key>::slot_of(Key key) const {
  return hash_key(key) & mask_;
}

template <typename Key>
void FlatIndexMap<Key>::grow() {
  FlatIndexMap<Key> bigger((mask_ + 1) * 2);
  for (uint64_t s = 0; s <= mask_; ++s) {
    if (!used_[s]) continue;
    bool ins = false;
    bigger.find_or_insert(keys_[s], vals_[s], ins);
  }
  *this = std::move(bigger);
}

template <typename Key>
uint32_t FlatIndexMap<Key>::find_or_insert(Key key, uint32_t fresh, bool& inserted) {
  if (2 * (size_ + 1) > mask_ + 1) grow();
  uint64_t s = slot_of(key);
  while (used_[s]) {
    if (keys_[s] == key) {
      inserted = false;
      return vals_[s];
    }
    s = (s + 1) & mask_;
  }
  used_[s] = 1;
  keys_[s] = key;
  vals_[s] = fresh;
  ++size_;
  inserted = true;
  return fresh;
}

template <typename Key>
std::optional<uint32_t> FlatIndexMap<Key>::find(Key key) const {
  uint64_t s = slot_of(key);
  while (used_[s]) {
    if (keys_[s] == key) return vals_[s];
    s = (s + 1) & mask_;
  }
  return std::nullopt;
}

template class FlatIndexMap<uint64_t>;
template class FlatIndexMap<unsigned __int128>;

}  // namespace detail

GroupTable GroupTable::enumerate(const Prime& p, std::span<const IntMat2> gens,
                                 const EnumerationOptions& opt) {
  if (gens.empty()) throw ValidationError("enumerate: need at least one generator");
  const uint32_t degree = static_cast<uint32_t>(2 * gens.size());
  GroupTable table(p, degree);

  // Symmetric closure as a multiset: gens in order, then inverses in order.
  // Coinciding images still contribute separately to the degree, so the
  // operator stays an average of exactly `degree` permutations.
  for (const IntMat2& g : gens) table.gen_images_.push_back(reduce_mod(g, p));
  for (const IntMat2& g : gens) table.gen_images_.push_back(reduce_mod(g.inverse(), p));

  const bool packed = p.value() < (1u << 16);
  if (packed) {
    table.index_.emplace<detail::FlatIndexMap<uint64_t>>(uint64_t{1} << 12);
  } else {
    table.index_.emplace<detail::FlatIndexMap<unsigned __int128>>(uint64_t{1} << 12);
  }

  auto find_or_insert = [&](const ModMat2& m, uint32_t fresh, bool& inserted) -> uint32_t {
    if (packed) {
      return std::get<0>(table.index_).find_or_insert(m.packed_key(), fresh, inserted);
    }
    return std::get<1>(table.index_).find_or_insert(m.wide_key(), fresh, inserted);
  };

  bool inserted = false;
  table.elements_.push_back(ModMat2::identity(p.value()));
  find_or_insert(table.elements_[0], 0, inserted);

  for (uint32_t i = 0; i < table.elements_.size(); ++i) {
    for (uint32_t k = 0; k < degree; ++k) {
      const ModMat2 next = table.elements_[i] * table.gen_images_[k];
      const uint32_t fresh = static_cast<uint32_t>(table.elements_.size());
      const uint32_t idx = find_or_insert(next, fresh, inserted);
      if (inserted) {
        if (table.elements_.size() >= opt.max_elements) {
          throw CapacityError("enumeration for p = " + std::to_string(p.value()) +
                              " exceeded the element bound of " + std::to_string(opt.max_elements));
        }
        table.elements_.push_back(next);
      }
      table.move_table_.push_back(idx);
    }
  }

  // Lagrange guard: the subgroup order must divide p (p^2 - 1).
  const uint64_t full = sl2_order(p);
  if (full % table.elements_.size() != 0) {
    throw std::logic_error("subgroup order does not divide the group order");
  }
  return table;
}

std::optional<uint32_t> GroupTable::index_of(const ModMat2& m) const {
  if (m.modulus() != prime_.value()) return std::nullopt;
  if (index_.index() == 0) return std::get<0>(index_).find(m.packed_key());
  return std::get<1>(index_).find(m.wide_key());
}

uint32_t GroupTable::mul_index(uint32_t i, uint32_t j) const {
  const auto idx = index_of(elements_[i] * elements_[j]);
  if (!idx) throw std::logic_error("group table not closed under multiplication");
  return *idx;
}

uint32_t GroupTable::inverse_index(uint32_t i) const {
  const auto idx = index_of(elements_[i].inverse());
  if (!idx) throw std::logic_error("group table not closed under inversion");
  return *idx;
}

GenerationReport generation_check(const Prime& p, std::span<const IntMat2> gens,
                                  const EnumerationOptions& opt) {
  const GroupTable table = GroupTable::enumerate(p, gens, opt);
  GenerationReport report;
  report.prime = p.value();
  report.subgroup_size = table.size();
  report.full_group_size = sl2_order(p);
  report.generated = report.subgroup_size == report.full_group_size;
  return report;
}

WalkOperator walk_operator(const GroupTable& table) {
  return WalkOperator(table.size(), table.degree(), table.move_table(), /*self_adjoint=*/true);
}

namespace {

void put_u32(std::ostream& os, uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(bytes, 4);
}

}  // namespace

void dump_table(const GroupTable& table, std::ostream& os) {
  os.write("SL2T", 4);
  put_u32(os, table.prime().value());
  put_u32(os, table.size());
  put_u32(os, table.degree());
  for (uint32_t v : table.move_table()) put_u32(os, v);
}

}  // namespace sl2dyn
