#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sl2dyn/cayley.hpp"
#include "sl2dyn/sl2.hpp"
#include "sl2dyn/spectra.hpp"

namespace sl2dyn {

struct TruncationOptions {
  uint64_t max_elements_per_factor = 20'000'000;
};

// Finite truncation of a product of SL2(Z_p) over primes in one residue
// class mod 4: class 1 for the base, class 3 for the fiber. Every factor
// must be generated by the supplied generators or construction fails naming
// the offending prime. Elements are tuples of per-factor BFS indices,
// addressed by a single mixed-radix index (factor 0 most significant);
// the identity is index 0. An empty prime list gives the trivial group.
class TruncatedProduct {
 public:
  static TruncatedProduct build(int class_mod4, std::span<const Prime> primes,
                                std::span<const IntMat2> gens,
                                const TruncationOptions& opt = {});

  int class_mod4() const { return class_mod4_; }
  size_t factor_count() const { return factors_.size(); }
  const GroupTable& factor(size_t i) const { return factors_[i]; }
  const std::vector<Prime>& primes() const { return primes_; }
  uint64_t total_size() const { return total_; }

  void decompose(uint64_t g, std::span<uint32_t> out) const;
  uint64_t compose(std::span<const uint32_t> comps) const;

  // Componentwise group law by index.
  uint64_t mul(uint64_t g, uint64_t h) const;
  uint64_t inverse(uint64_t g) const;

  // Componentwise reduction of an integer matrix.
  uint64_t project(const IntMat2& m) const;

 private:
  int class_mod4_ = 1;
  std::vector<Prime> primes_;
  std::vector<GroupTable> factors_;
  std::vector<uint64_t> strides_;
  uint64_t total_ = 1;
};

// The cyclic subgroup generated by one element of a truncated product,
// together with a section of the coset space: every parent element factors
// uniquely as rep * gen^power where rep is the smallest element of its coset
// in the parent's index order (the identity coset's rep is the identity).
struct CyclicClosure {
  uint64_t generator = 0;
  uint64_t order = 0;
  std::vector<uint64_t> powers;      // powers[t] = gen^t, t in [0, order)
  std::vector<uint64_t> coset_reps;  // ascending
  std::vector<uint32_t> coset_index; // parent element -> index into coset_reps
  std::vector<uint32_t> power_of;    // parent element -> t
};

CyclicClosure cyclic_closure(const TruncatedProduct& parent, uint64_t generator,
                             uint64_t max_parent_size = 20'000'000);

// Map from the cyclic subgroup into the fiber, stored per power of the
// generator. Drives the fiber coordinate of the c-move.
struct Cocycle {
  enum class Kind { trivial, seeded_random, table };
  Kind kind = Kind::trivial;
  uint64_t seed = 0;
  std::vector<uint64_t> values;  // values[t] = fiber element for gen^t
};

struct CocycleSpec {
  Cocycle::Kind kind = Cocycle::Kind::trivial;
  uint64_t seed = 0;
  std::vector<uint64_t> table;  // used by Kind::table

  static CocycleSpec trivial() { return {}; }
  static CocycleSpec seeded_random(uint64_t seed) {
    return {Cocycle::Kind::seeded_random, seed, {}};
  }
  static CocycleSpec from_table(std::vector<uint64_t> values) {
    return {Cocycle::Kind::table, 0, std::move(values)};
  }
};

struct SystemOptions {
  uint64_t closure_cap = 20'000'000;  // base size bound for the coset section
};

// The rank-3 action on base x fiber: the a- and b-moves translate both
// coordinates by fixed elements, the c-move translates the base and drives
// the fiber through the cocycle extended from the cyclic closure of c by the
// coset section. All six moves (three and their inverses) are bijections;
// the base coordinate always evolves autonomously, which is the order-2
// tower structure.
class SkewProductSystem {
 public:
  struct Point {
    uint64_t base = 0;
    uint64_t fiber = 0;
    bool operator==(const Point&) const = default;
  };

  enum class Move { a, b, c, a_inv, b_inv, c_inv };
  static constexpr std::array<Move, 6> kAllMoves{Move::a, Move::b, Move::c,
                                                 Move::a_inv, Move::b_inv, Move::c_inv};
  static Move inverse_of(Move m);

  SkewProductSystem(TruncatedProduct base, TruncatedProduct fiber, const CocycleSpec& spec,
                    const SystemOptions& opt = {},
                    const Generators& gens = canonical_generators());

  const TruncatedProduct& base() const { return base_; }
  const TruncatedProduct& fiber() const { return fiber_; }
  const CyclicClosure& closure() const { return closure_; }
  const Cocycle& cocycle() const { return cocycle_; }
  uint64_t product_size() const { return base_.total_size() * fiber_.total_size(); }

  // The extended cocycle at a base point: x = rep * c^t gives the stored
  // value at c^t. Total on the base, deterministic.
  uint64_t fiber_step(uint64_t base_point) const {
    return cocycle_.values[power_of(base_point)];
  }
  uint32_t power_of(uint64_t base_point) const { return closure_.power_of[base_point]; }

  Point apply(Move m, Point p) const;

  uint64_t encode(Point p) const { return p.base * fiber_.total_size() + p.fiber; }
  Point decode(uint64_t v) const {
    return Point{v / fiber_.total_size(), v % fiber_.total_size()};
  }

 private:
  TruncatedProduct base_;
  TruncatedProduct fiber_;
  CyclicClosure closure_;
  Cocycle cocycle_;
  uint64_t a_base_, b_base_, c_base_, a_base_inv_, b_base_inv_, c_base_inv_;
  uint64_t f_fiber_, g_fiber_, f_fiber_inv_, g_fiber_inv_;
};

// Which moves drive an operator / orbit computation: the full rank-3 set,
// the diagonal rank-2 subaction, or the c-move alone.
enum class MoveSet { f3, f2_diagonal, c_only };
std::vector<SkewProductSystem::Move> moves_of(MoveSet set);

// Averaged Koopman operator of the chosen moves on the product space.
WalkOperator koopman_operator(const SkewProductSystem& sys, MoveSet set = MoveSet::f3,
                              uint64_t cap = 20'000'000);

struct TransitivityReport {
  bool transitive = false;
  uint64_t orbit_count = 0;
};

// BFS over the chosen moves; transitive iff a single orbit. On a finite
// space with uniform measure this is the ergodicity criterion.
TransitivityReport orbit_transitivity(const SkewProductSystem& sys, MoveSet set = MoveSet::f3,
                                      uint64_t cap = 20'000'000);

struct KoopmanOptions {
  uint64_t cap = 20'000'000;
  uint64_t dense_cap = 2000;  // auto mode: dense at or below, iterative above
  int method = 0;             // 0 auto, 1 dense, 2 iterative
  IterativeOptions iter;
};

// Spectral gap of the averaged Koopman operator; gap > 0 iff transitive.
SpectralReport koopman_gap(const SkewProductSystem& sys, MoveSet set = MoveSet::f3,
                           const KoopmanOptions& opt = {});

// Product metric on the restricted system (powers of c) x fiber: factor i of
// the base carries weight 2^-i, fiber factor j continues with 2^-(nb+j).
// Mismatched factors contribute their weight; left translations are
// isometries of this metric.
struct DefectOptions {
  double delta = 0.5;
  uint64_t horizon = 100;
  uint64_t samples = 100;
  uint64_t seed = 1;
};

struct DefectReport {
  double defect = 0.0;
  double delta = 0.0;
  uint64_t horizon = 0;
  uint64_t samples = 0;
  uint64_t seed = 0;
  double min_positive_distance = 0.0;
  // attaining pair at time 0, as (power of c, fiber element)
  uint64_t p_power = 0, p_fiber = 0;
  uint64_t q_power = 0, q_fiber = 0;
  double initial_distance = 0.0;
  uint64_t attained_step = 0;
};

// Samples pairs at distance <= delta in the restricted system, iterates the
// c-move up to the horizon, and reports the worst separation seen. With the
// trivial cocycle every step is an isometry and the defect equals the
// initial distance; separation beyond delta is the non-equicontinuity
// signature. Throws ValidationError naming the minimal positive distance if
// delta is below the metric's resolution.
DefectReport equicontinuity_defect(const SkewProductSystem& sys, const DefectOptions& opt);

}  // namespace sl2dyn
