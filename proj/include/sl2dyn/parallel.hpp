#pragma once

#include <cstdint>
#include <functional>

namespace sl2dyn {

// Worker count for data-parallel loops. Numeric results never depend on it:
// reductions are accumulated per fixed-size block and the block partials are
// summed in block order, so the floating-point result is a function of the
// data alone.
void set_worker_count(unsigned n);
unsigned worker_count();

inline constexpr uint64_t kReductionBlock = 1u << 14;

// Runs fn(begin, end) over [0, n) split into chunks. Chunks may execute on
// any worker; fn must not touch overlapping state.
void parallel_for_chunks(uint64_t n, const std::function<void(uint64_t, uint64_t)>& fn);

// Deterministic reductions (block partials summed in block order).
double block_dot(const double* a, const double* b, uint64_t n);
double block_sum(const double* a, uint64_t n);

}  // namespace sl2dyn
