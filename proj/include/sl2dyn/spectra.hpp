#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sl2dyn/cayley.hpp"
#include "sl2dyn/walk_operator.hpp"

namespace sl2dyn {

struct SpectralReport {
  double lambda2 = 0.0;     // second-largest eigenvalue of A (largest on mean-zero)
  double gap = 0.0;         // 1 - lambda2
  double lambda_min = 0.0;  // most negative eigenvalue
  std::string method;       // "dense" | "iterative"
  uint64_t iterations = 0;  // operator applications
  double residual_norm = 0.0;
  uint64_t seed = 0;
  std::string flag = "ok";  // "ok" | "degenerate" | "not-converged"
};

struct DenseOptions {
  uint64_t cap = 5000;  // refuse to materialize above this
};

// Full symmetric eigendecomposition of the materialized operator. The oracle
// for everything iterative. If second_vector is non-null it receives a unit
// eigenvector for lambda2, projected to mean zero.
SpectralReport dense_spectrum(const WalkOperator& op, const DenseOptions& opt = {},
                              std::vector<double>* second_vector = nullptr);

struct IterativeOptions {
  double tol = 1e-8;          // Ritz residual target for both spectrum ends
  uint64_t max_applies = 20000;
  uint64_t seed = 1;
  uint32_t basis = 64;        // restart length
  uint32_t keep_top = 16;     // Ritz pairs retained per restart, top end
  uint32_t keep_bottom = 8;   // and bottom end
};

// Largest and smallest eigenvalues of A restricted to the mean-zero subspace
// (the constant eigenvector is deflated by projection). Thick-restart Lanczos
// with full reorthogonalization; memory stays below basis * size doubles.
// Deterministic given the seed, independent of the worker count.
SpectralReport iterative_gap(const WalkOperator& op, const IterativeOptions& opt = {},
                             std::vector<double>* second_vector = nullptr);

struct SweepResult {
  uint64_t set_size = 0;   // |A| of the minimizing prefix
  double ratio = 0.0;      // |boundary A| / (d * min(|A|, |A^c|))
};

// Sorts vertices by the supplied mean-zero vector (ties by index) and sweeps
// prefix sets, returning the minimizer. Relates to the gap via
// gap/2 <= ratio <= sqrt(2 gap) when the vector is a converged second
// eigenvector.
SweepResult cheeger_sweep(const WalkOperator& op, std::span<const double> vector);

struct ScanOptions {
  double tol = 1e-10;
  uint64_t max_applies = 40000;
  uint64_t seed = 1;
  uint64_t dense_cap = 1500;      // solver switchover; above this go matrix-free
  uint64_t max_elements = 20'000'000;
  bool with_cheeger = false;
};

struct ScanRow {
  uint32_t p = 0;
  int class_mod4 = 0;
  uint64_t group_size = 0;
  bool generated = false;
  double lambda2 = 0.0;
  double gap = 0.0;
  std::string method;
  std::string flag = "ok";  // "ok" | "not-generated" | "capacity" | "not-converged"
  SweepResult sweep;        // populated when with_cheeger and the gap was computed
};

// One row per prime, in input order. Primes whose projected generators do
// not generate SL2(Z_p) are flagged and skipped (lambda2/gap stay NaN).
// Per-prime solver seeds are derived from opt.seed and p, so results do not
// depend on which other primes are in the scan.
std::vector<ScanRow> gap_scan(std::span<const Prime> primes, std::span<const IntMat2> gens,
                              const ScanOptions& opt = {});

}  // namespace sl2dyn
