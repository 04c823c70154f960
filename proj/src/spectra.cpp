#include "sl2dyn/spectra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sl2dyn/parallel.hpp"
#include "sl2dyn/rng.hpp"

namespace sl2dyn {

WalkOperator::WalkOperator(uint64_t size, uint32_t degree, std::vector<uint32_t> moves,
                           bool self_adjoint)
    : size_(size), degree_(degree), moves_(std::move(moves)), self_adjoint_(self_adjoint) {
  if (size == 0 || degree == 0) throw ValidationError("WalkOperator: empty operator");
  if (moves_.size() != size_ * degree_) {
    throw ValidationError("WalkOperator: move table size mismatch");
  }
}

void WalkOperator::apply(const double* in, double* out) const {
  const uint32_t d = degree_;
  const double inv_d = 1.0 / d;
  const uint32_t* moves = moves_.data();
  parallel_for_chunks(size_, [&](uint64_t begin, uint64_t end) {
    for (uint64_t v = begin; v < end; ++v) {
      const uint32_t* row = moves + v * d;
      double s = 0.0;
      for (uint32_t k = 0; k < d; ++k) s += in[row[k]];
      out[v] = s * inv_d;
    }
  });
}

uint64_t WalkOperator::count_orbits() const {
  std::vector<uint8_t> seen(size_, 0);
  std::vector<uint32_t> stack;
  uint64_t orbits = 0;
  for (uint64_t root = 0; root < size_; ++root) {
    if (seen[root]) continue;
    ++orbits;
    seen[root] = 1;
    stack.push_back(static_cast<uint32_t>(root));
    while (!stack.empty()) {
      const uint32_t v = stack.back();
      stack.pop_back();
      const uint32_t* row = moves_.data() + static_cast<uint64_t>(v) * degree_;
      for (uint32_t k = 0; k < degree_; ++k) {
        const uint32_t u = row[k];
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
  }
  return orbits;
}

namespace {

SpectralReport degenerate_report(const char* method, uint64_t seed) {
  SpectralReport r;
  r.lambda2 = 1.0;
  r.gap = 0.0;
  r.lambda_min = 1.0;
  r.method = method;
  r.seed = seed;
  r.flag = "degenerate";
  return r;
}

void remove_mean(std::vector<double>& v) {
  const double mean = block_sum(v.data(), v.size()) / static_cast<double>(v.size());
  parallel_for_chunks(v.size(), [&](uint64_t b, uint64_t e) {
    for (uint64_t i = b; i < e; ++i) v[i] -= mean;
  });
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  parallel_for_chunks(y.size(), [&](uint64_t b, uint64_t e) {
    for (uint64_t i = b; i < e; ++i) y[i] += a * x[i];
  });
}

void scale(std::vector<double>& v, double a) {
  parallel_for_chunks(v.size(), [&](uint64_t b, uint64_t e) {
    for (uint64_t i = b; i < e; ++i) v[i] *= a;
  });
}

double norm2(const std::vector<double>& v) {
  return std::sqrt(block_dot(v.data(), v.data(), v.size()));
}

}  // namespace

SpectralReport dense_spectrum(const WalkOperator& op, const DenseOptions& opt,
                              std::vector<double>* second_vector) {
  const uint64_t n = op.size();
  if (n > opt.cap) {
    throw CapacityError("dense solver cap " + std::to_string(opt.cap) +
                        " exceeded by operator of size " + std::to_string(n));
  }
  if (n == 1) {
    if (second_vector) second_vector->assign(1, 0.0);
    return degenerate_report("dense", 0);
  }
  if (!op.self_adjoint()) throw ValidationError("dense_spectrum: operator must be self-adjoint");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double w = 1.0 / op.degree();
  for (uint64_t v = 0; v < n; ++v) {
    for (uint32_t k = 0; k < op.degree(); ++k) {
      a(static_cast<Eigen::Index>(v), op.move(v, k)) += w;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      a, second_vector ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  const auto& ev = es.eigenvalues();

  SpectralReport r;
  // True eigenvalues live in [-1, 1]; clamp solver jitter so gap >= 0 holds.
  r.lambda2 = std::min(ev(static_cast<Eigen::Index>(n) - 2), 1.0);
  r.gap = 1.0 - r.lambda2;
  r.lambda_min = std::max(ev(0), -1.0);
  r.method = "dense";
  r.flag = "ok";

  if (second_vector) {
    // Column n-2. If lambda2 = 1 the eigenspace contains the constant
    // vector; project it out and fall back to column n-1 if that kills the
    // vector.
    for (Eigen::Index col : {static_cast<Eigen::Index>(n) - 2, static_cast<Eigen::Index>(n) - 1}) {
      std::vector<double> v(n);
      for (uint64_t i = 0; i < n; ++i) v[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), col);
      remove_mean(v);
      const double nrm = norm2(v);
      if (nrm > 1e-8) {
        scale(v, 1.0 / nrm);
        *second_vector = std::move(v);
        break;
      }
    }
  }
  return r;
}

SpectralReport iterative_gap(const WalkOperator& op, const IterativeOptions& opt,
                             std::vector<double>* second_vector) {
  const uint64_t n = op.size();
  if (n == 1) {
    if (second_vector) second_vector->assign(1, 0.0);
    return degenerate_report("iterative", opt.seed);
  }
  if (!op.self_adjoint()) throw ValidationError("iterative_gap: operator must be self-adjoint");

  const uint32_t m = static_cast<uint32_t>(std::min<uint64_t>(std::max<uint32_t>(opt.basis, 4), n - 1));
  uint32_t keep_top = std::max<uint32_t>(1, opt.keep_top);
  uint32_t keep_bottom = opt.keep_bottom;
  while (keep_top + keep_bottom + 2 > m) {
    if (keep_bottom > 0 && keep_bottom >= keep_top) {
      --keep_bottom;
    } else if (keep_top > 1) {
      --keep_top;
    } else if (keep_bottom > 0) {
      --keep_bottom;
    } else {
      break;
    }
  }

  Rng rng(mix64(opt.seed));
  std::vector<std::vector<double>> basis;  // orthonormal, all mean zero
  basis.reserve(m + 1);

  auto fresh_vector = [&]() {
    std::vector<double> v(n);
    for (uint64_t i = 0; i < n; ++i) v[i] = rng.unit_double() - 0.5;
    return v;
  };

  // Orthogonalize v against the current basis (two classical Gram-Schmidt
  // passes), recording the first-pass-plus-correction coefficients.
  auto orthogonalize = [&](std::vector<double>& v, std::vector<double>* coeffs) {
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t i = 0; i < basis.size(); ++i) {
        const double c = block_dot(basis[i].data(), v.data(), n);
        if (c != 0.0) axpy(v, -c, basis[i]);
        if (coeffs) (*coeffs)[i] += c;
      }
    }
  };

  {
    std::vector<double> q0 = fresh_vector();
    remove_mean(q0);
    double nrm = norm2(q0);
    while (nrm < 1e-12) {  // essentially impossible, but stay deterministic
      q0 = fresh_vector();
      remove_mean(q0);
      nrm = norm2(q0);
    }
    scale(q0, 1.0 / nrm);
    basis.push_back(std::move(q0));
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> z(n);
  uint64_t applies = 0;
  uint32_t locked = 0;  // kept Ritz vectors at the front of the basis
  bool converged = false;
  bool exhausted = false;  // mean-zero Krylov space fully spanned
  double beta_border = 0.0;

  Eigen::VectorXd theta;
  Eigen::MatrixXd s;
  uint32_t basis_size = 0;

  while (true) {
    // Expand Lanczos columns locked..m-1 (thick restart keeps earlier ones).
    basis_size = static_cast<uint32_t>(basis.size());
    for (uint32_t j = locked; j < m; ++j) {
      op.apply(basis[j].data(), z.data());
      ++applies;
      remove_mean(z);
      std::vector<double> coeffs(basis.size(), 0.0);
      orthogonalize(z, &coeffs);
      for (uint32_t i = 0; i < basis.size(); ++i) {
        h(i, j) = coeffs[i];
        h(j, i) = coeffs[i];
      }
      double beta = norm2(z);
      if (beta < 1e-14) {
        // Invariant subspace hit; try to continue with a fresh direction.
        std::vector<double> w = fresh_vector();
        remove_mean(w);
        orthogonalize(w, nullptr);
        const double wn = norm2(w);
        if (wn < 1e-10) {
          exhausted = true;  // spanned the whole mean-zero space
          basis_size = j + 1;
          beta_border = 0.0;
          break;
        }
        z = std::move(w);
        beta = wn;
        // zero coupling: the new direction starts an independent block
        scale(z, 1.0 / beta);
        beta = 0.0;
        if (j + 1 < m) {
          h(j + 1, j) = 0.0;
          h(j, j + 1) = 0.0;
        }
        beta_border = 0.0;
        basis.push_back(z);
        basis_size = j + 2;
        continue;
      }
      scale(z, 1.0 / beta);
      if (j + 1 < m) {
        h(j + 1, j) = beta;
        h(j, j + 1) = beta;
      }
      beta_border = beta;
      basis.push_back(z);
      basis_size = j + 2;
    }

    const uint32_t dim = std::min<uint32_t>(basis_size >= 1 ? basis_size - (exhausted ? 0 : 1) : 0, m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(dim, dim));
    theta = es.eigenvalues();
    s = es.eigenvectors();

    const double res_top = std::abs(beta_border * s(dim - 1, dim - 1));
    const double res_bottom = std::abs(beta_border * s(dim - 1, 0));
    if (exhausted || (res_top <= opt.tol && res_bottom <= opt.tol)) {
      converged = true;
      break;
    }
    if (applies >= opt.max_applies) break;

    // Thick restart: keep extreme Ritz vectors plus the border vector.
    const uint32_t kt = std::min(keep_top, dim);
    const uint32_t kb = std::min(keep_bottom, dim - kt);
    std::vector<uint32_t> keep;
    for (uint32_t i = 0; i < kb; ++i) keep.push_back(i);
    for (uint32_t i = dim - kt; i < dim; ++i) keep.push_back(i);

    std::vector<std::vector<double>> kept;
    kept.reserve(keep.size() + 1);
    for (uint32_t idx : keep) {
      std::vector<double> y(n, 0.0);
      for (uint32_t i = 0; i < dim; ++i) {
        if (s(i, idx) != 0.0) axpy(y, s(i, idx), basis[i]);
      }
      kept.push_back(std::move(y));
    }
    kept.push_back(std::move(basis[basis_size - 1]));  // border vector

    basis = std::move(kept);
    h.setZero();
    for (uint32_t i = 0; i < keep.size(); ++i) h(i, i) = theta(keep[i]);
    // Couplings of the border column are measured when it is expanded.
    locked = static_cast<uint32_t>(keep.size());
  }

  const uint32_t dim = std::min<uint32_t>(basis_size - (exhausted ? 0 : 1), m);
  SpectralReport r;
  r.method = "iterative";
  r.seed = opt.seed;
  r.iterations = applies;
  r.lambda2 = std::min(theta(dim - 1), 1.0);
  r.gap = 1.0 - r.lambda2;
  r.lambda_min = std::max(theta(0), -1.0);
  r.flag = converged ? "ok" : "not-converged";

  // Explicit residual of the top Ritz pair, beyond the border estimate.
  {
    std::vector<double> y(n, 0.0);
    for (uint32_t i = 0; i < dim; ++i) {
      if (s(i, dim - 1) != 0.0) axpy(y, s(i, dim - 1), basis[i]);
    }
    const double yn = norm2(y);
    if (yn > 0) scale(y, 1.0 / yn);
    std::vector<double> ay(n);
    op.apply(y.data(), ay.data());
    ++applies;
    axpy(ay, -theta(dim - 1), y);
    r.residual_norm = norm2(ay);
    r.iterations = applies;
    if (second_vector) *second_vector = std::move(y);
  }
  return r;
}

SweepResult cheeger_sweep(const WalkOperator& op, std::span<const double> vector) {
  const uint64_t n = op.size();
  if (vector.size() != n) throw ValidationError("cheeger_sweep: vector size mismatch");
  if (n < 2) return SweepResult{0, 0.0};

  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (vector[a] != vector[b]) return vector[a] < vector[b];
    return a < b;  // deterministic tie-break
  });

  std::vector<uint8_t> in_set(n, 0);
  const uint32_t d = op.degree();
  int64_t cut = 0;  // directed move-edges leaving the prefix set
  SweepResult best{0, std::numeric_limits<double>::infinity()};

  for (uint64_t idx = 0; idx + 1 < n; ++idx) {
    const uint32_t w = order[idx];
    // Adding w: edges w->outside open; by multiset symmetry, edges from
    // inside to w close one cut edge each.
    for (uint32_t k = 0; k < d; ++k) {
      const uint32_t u = op.move(w, k);
      if (u == w) continue;
      if (in_set[u]) {
        --cut;
      } else {
        ++cut;
      }
    }
    in_set[w] = 1;
    const uint64_t size = idx + 1;
    const uint64_t small = std::min(size, n - size);
    const double ratio = static_cast<double>(cut) / (static_cast<double>(d) * static_cast<double>(small));
    if (ratio < best.ratio) {
      best.ratio = ratio;
      best.set_size = size;
    }
  }
  return best;
}

std::vector<ScanRow> gap_scan(std::span<const Prime> primes, std::span<const IntMat2> gens,
                              const ScanOptions& opt) {
  std::vector<ScanRow> rows(primes.size());
  const double qnan = std::numeric_limits<double>::quiet_NaN();

  for (size_t i = 0; i < primes.size(); ++i) {
    const Prime& p = primes[i];
    ScanRow& row = rows[i];
    row.p = p.value();
    row.class_mod4 = p.residue_class_mod4();
    row.lambda2 = qnan;
    row.gap = qnan;
    try {
      EnumerationOptions eopt;
      eopt.max_elements = opt.max_elements;
      const GroupTable table = GroupTable::enumerate(p, gens, eopt);
      row.group_size = table.size();
      row.generated = table.size() == sl2_order(p);
      if (!row.generated) {
        row.flag = "not-generated";
        continue;
      }
      const WalkOperator op = walk_operator(table);
      std::vector<double> vec2;
      std::vector<double>* vec_ptr = opt.with_cheeger ? &vec2 : nullptr;
      SpectralReport rep;
      if (op.size() <= opt.dense_cap) {
        DenseOptions dopt;
        dopt.cap = opt.dense_cap;
        rep = dense_spectrum(op, dopt, vec_ptr);
      } else {
        IterativeOptions iopt;
        iopt.tol = opt.tol;
        iopt.max_applies = opt.max_applies;
        // Independent per-prime stream: results do not depend on the scan set.
        iopt.seed = opt.seed ^ mix64(p.value());
        rep = iterative_gap(op, iopt, vec_ptr);
      }
      row.lambda2 = rep.lambda2;
      row.gap = rep.gap;
      row.method = rep.method;
      row.flag = rep.flag;
      if (opt.with_cheeger && !vec2.empty()) {
        row.sweep = cheeger_sweep(op, vec2);
      }
    } catch (const CapacityError&) {
      row.flag = "capacity";
    }
  }
  return rows;
}

}  // namespace sl2dyn
