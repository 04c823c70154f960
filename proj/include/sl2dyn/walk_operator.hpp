#pragma once

#include <cstdint>
#include <vector>

namespace sl2dyn {

// Normalized adjacency / averaged Koopman operator of a move system on a
// finite vertex set. Matrix-free: the operator is the average of `degree`
// vertex maps stored row-major (moves[v * degree + k]), each a permutation
// when the move multiset is symmetric. Applying it costs degree * size index
// loads; this is the main performance surface of the artifact.
class WalkOperator {
 public:
  WalkOperator(uint64_t size, uint32_t degree, std::vector<uint32_t> moves, bool self_adjoint);

  uint64_t size() const { return size_; }
  uint32_t degree() const { return degree_; }
  bool self_adjoint() const { return self_adjoint_; }

  uint32_t move(uint64_t v, uint32_t k) const { return moves_[v * degree_ + k]; }
  const std::vector<uint32_t>& moves() const { return moves_; }

  // out[v] = (1/d) sum_k in[move_k(v)]. Deterministic regardless of worker
  // count (fixed summation order per vertex).
  void apply(const double* in, double* out) const;

  // Connected components of the move graph = orbits of the generated
  // permutation group.
  uint64_t count_orbits() const;

 private:
  uint64_t size_;
  uint32_t degree_;
  std::vector<uint32_t> moves_;
  bool self_adjoint_;
};

}  // namespace sl2dyn
