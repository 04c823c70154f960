#include "sl2dyn/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "sl2dyn/parallel.hpp"
#include "sl2dyn/rng.hpp"

namespace sl2dyn {

TruncatedProduct TruncatedProduct::build(int class_mod4, std::span<const Prime> primes,
                                         std::span<const IntMat2> gens,
                                         const TruncationOptions& opt) {
  if (class_mod4 != 1 && class_mod4 != 3) {
    throw ValidationError("residue class must be 1 or 3 (mod 4)");
  }
  TruncatedProduct prod;
  prod.class_mod4_ = class_mod4;

  std::set<uint32_t> seen;
  for (const Prime& p : primes) {
    if (p.residue_class_mod4() != class_mod4) {
      throw ValidationError("prime " + std::to_string(p.value()) + " is not " +
                            std::to_string(class_mod4) + " mod 4");
    }
    if (!seen.insert(p.value()).second) {
      throw ValidationError("duplicate prime " + std::to_string(p.value()));
    }
  }

  EnumerationOptions eopt;
  eopt.max_elements = opt.max_elements_per_factor;
  unsigned __int128 total = 1;
  for (const Prime& p : primes) {
    GroupTable table = GroupTable::enumerate(p, gens, eopt);
    if (table.size() != sl2_order(p)) {
      throw ValidationError("generators do not generate SL2(Z_p) for p = " +
                            std::to_string(p.value()));
    }
    total *= table.size();
    if (total > (static_cast<unsigned __int128>(1) << 62)) {
      throw CapacityError("truncated product size exceeds 2^62");
    }
    prod.primes_.push_back(p);
    prod.factors_.push_back(std::move(table));
  }

  prod.total_ = static_cast<uint64_t>(total);
  prod.strides_.assign(prod.factors_.size(), 1);
  for (size_t i = prod.factors_.size(); i-- > 1;) {
    prod.strides_[i - 1] = prod.strides_[i] * prod.factors_[i].size();
  }
  return prod;
}

void TruncatedProduct::decompose(uint64_t g, std::span<uint32_t> out) const {
  for (size_t i = 0; i < factors_.size(); ++i) {
    out[i] = static_cast<uint32_t>(g / strides_[i]);
    g %= strides_[i];
  }
}

uint64_t TruncatedProduct::compose(std::span<const uint32_t> comps) const {
  uint64_t g = 0;
  for (size_t i = 0; i < factors_.size(); ++i) g += comps[i] * strides_[i];
  return g;
}

uint64_t TruncatedProduct::mul(uint64_t g, uint64_t h) const {
  uint64_t out = 0;
  for (size_t i = 0; i < factors_.size(); ++i) {
    const uint32_t gi = static_cast<uint32_t>(g / strides_[i]);
    const uint32_t hi = static_cast<uint32_t>(h / strides_[i]);
    g %= strides_[i];
    h %= strides_[i];
    out += static_cast<uint64_t>(factors_[i].mul_index(gi, hi)) * strides_[i];
  }
  return out;
}

uint64_t TruncatedProduct::inverse(uint64_t g) const {
  uint64_t out = 0;
  for (size_t i = 0; i < factors_.size(); ++i) {
    const uint32_t gi = static_cast<uint32_t>(g / strides_[i]);
    g %= strides_[i];
    out += static_cast<uint64_t>(factors_[i].inverse_index(gi)) * strides_[i];
  }
  return out;
}

uint64_t TruncatedProduct::project(const IntMat2& m) const {
  uint64_t out = 0;
  for (size_t i = 0; i < factors_.size(); ++i) {
    const auto idx = factors_[i].index_of(reduce_mod(m, primes_[i]));
    if (!idx) throw std::logic_error("projection missing from a full factor table");
    out += static_cast<uint64_t>(*idx) * strides_[i];
  }
  return out;
}

CyclicClosure cyclic_closure(const TruncatedProduct& parent, uint64_t generator,
                             uint64_t max_parent_size) {
  const uint64_t total = parent.total_size();
  if (total > max_parent_size) {
    throw CapacityError("coset section needs " + std::to_string(total) +
                        " entries, above the bound of " + std::to_string(max_parent_size));
  }

  CyclicClosure cl;
  cl.generator = generator;
  cl.powers.push_back(0);
  for (uint64_t cur = generator; cur != 0; cur = parent.mul(cur, generator)) {
    cl.powers.push_back(cur);
  }
  cl.order = cl.powers.size();

  cl.coset_index.assign(total, UINT32_MAX);
  cl.power_of.assign(total, 0);
  for (uint64_t g = 0; g < total; ++g) {
    if (cl.coset_index[g] != UINT32_MAX) continue;
    // g is unvisited, hence minimal in its coset in index order.
    const uint32_t rep_id = static_cast<uint32_t>(cl.coset_reps.size());
    cl.coset_reps.push_back(g);
    uint64_t x = g;
    for (uint64_t t = 0; t < cl.order; ++t) {
      cl.coset_index[x] = rep_id;
      cl.power_of[x] = static_cast<uint32_t>(t);
      x = parent.mul(x, generator);
    }
    if (x != g) throw std::logic_error("coset walk did not close");
  }
  if (cl.order * cl.coset_reps.size() != total) {
    throw std::logic_error("coset section does not partition the group");
  }
  return cl;
}

namespace {

Cocycle make_cocycle(const CocycleSpec& spec, uint64_t order, uint64_t fiber_size) {
  Cocycle c;
  c.kind = spec.kind;
  c.seed = spec.seed;
  switch (spec.kind) {
    case Cocycle::Kind::trivial:
      c.values.assign(order, 0);
      break;
    case Cocycle::Kind::seeded_random: {
      Rng rng(mix64(spec.seed));
      c.values.resize(order);
      for (uint64_t t = 0; t < order; ++t) c.values[t] = rng.below(fiber_size);
      break;
    }
    case Cocycle::Kind::table:
      if (spec.table.size() != order) {
        throw ValidationError("cocycle table must have one value per power; expected " +
                              std::to_string(order) + ", got " + std::to_string(spec.table.size()));
      }
      for (uint64_t v : spec.table) {
        if (v >= fiber_size) throw ValidationError("cocycle table value outside the fiber");
      }
      c.values = spec.table;
      break;
  }
  return c;
}

}  // namespace

SkewProductSystem::Move SkewProductSystem::inverse_of(Move m) {
  switch (m) {
    case Move::a: return Move::a_inv;
    case Move::b: return Move::b_inv;
    case Move::c: return Move::c_inv;
    case Move::a_inv: return Move::a;
    case Move::b_inv: return Move::b;
    case Move::c_inv: return Move::c;
  }
  throw std::logic_error("bad move");
}

SkewProductSystem::SkewProductSystem(TruncatedProduct base, TruncatedProduct fiber,
                                     const CocycleSpec& spec, const SystemOptions& opt,
                                     const Generators& gens)
    : base_(std::move(base)), fiber_(std::move(fiber)) {
  a_base_ = base_.project(gens.a);
  b_base_ = base_.project(gens.b);
  c_base_ = base_.project(gens.c);
  a_base_inv_ = base_.inverse(a_base_);
  b_base_inv_ = base_.inverse(b_base_);
  c_base_inv_ = base_.inverse(c_base_);
  // The fiber translations are the images of the same two integer matrices.
  f_fiber_ = fiber_.project(gens.a);
  g_fiber_ = fiber_.project(gens.b);
  f_fiber_inv_ = fiber_.inverse(f_fiber_);
  g_fiber_inv_ = fiber_.inverse(g_fiber_);

  closure_ = cyclic_closure(base_, c_base_, opt.closure_cap);
  cocycle_ = make_cocycle(spec, closure_.order, fiber_.total_size());
}

SkewProductSystem::Point SkewProductSystem::apply(Move m, Point p) const {
  switch (m) {
    case Move::a:
      return Point{base_.mul(a_base_, p.base), fiber_.mul(f_fiber_, p.fiber)};
    case Move::a_inv:
      return Point{base_.mul(a_base_inv_, p.base), fiber_.mul(f_fiber_inv_, p.fiber)};
    case Move::b:
      return Point{base_.mul(b_base_, p.base), fiber_.mul(g_fiber_, p.fiber)};
    case Move::b_inv:
      return Point{base_.mul(b_base_inv_, p.base), fiber_.mul(g_fiber_inv_, p.fiber)};
    case Move::c:
      return Point{base_.mul(c_base_, p.base), fiber_.mul(fiber_step(p.base), p.fiber)};
    case Move::c_inv: {
      // Derived inverse: undo the translation the forward move applied at
      // the preimage.
      const uint64_t x = base_.mul(c_base_inv_, p.base);
      return Point{x, fiber_.mul(fiber_.inverse(fiber_step(x)), p.fiber)};
    }
  }
  throw std::logic_error("bad move");
}

std::vector<SkewProductSystem::Move> moves_of(MoveSet set) {
  using Move = SkewProductSystem::Move;
  switch (set) {
    case MoveSet::f3:
      return {Move::a, Move::b, Move::c, Move::a_inv, Move::b_inv, Move::c_inv};
    case MoveSet::f2_diagonal:
      return {Move::a, Move::b, Move::a_inv, Move::b_inv};
    case MoveSet::c_only:
      return {Move::c, Move::c_inv};
  }
  throw std::logic_error("bad move set");
}

WalkOperator koopman_operator(const SkewProductSystem& sys, MoveSet set, uint64_t cap) {
  const uint64_t n = sys.product_size();
  if (n > cap || n > UINT32_MAX) {
    throw CapacityError("product space of size " + std::to_string(n) +
                        " exceeds the operator bound of " + std::to_string(cap));
  }
  const auto moves = moves_of(set);
  const uint32_t d = static_cast<uint32_t>(moves.size());
  std::vector<uint32_t> table(n * d);
  parallel_for_chunks(n, [&](uint64_t begin, uint64_t end) {
    for (uint64_t v = begin; v < end; ++v) {
      const auto pt = sys.decode(v);
      for (uint32_t k = 0; k < d; ++k) {
        table[v * d + k] = static_cast<uint32_t>(sys.encode(sys.apply(moves[k], pt)));
      }
    }
  });
  return WalkOperator(n, d, std::move(table), /*self_adjoint=*/true);
}

TransitivityReport orbit_transitivity(const SkewProductSystem& sys, MoveSet set, uint64_t cap) {
  const WalkOperator op = koopman_operator(sys, set, cap);
  const uint64_t orbits = op.count_orbits();
  return TransitivityReport{orbits == 1, orbits};
}

SpectralReport koopman_gap(const SkewProductSystem& sys, MoveSet set, const KoopmanOptions& opt) {
  const WalkOperator op = koopman_operator(sys, set, opt.cap);
  const bool dense = opt.method == 1 || (opt.method == 0 && op.size() <= opt.dense_cap);
  if (dense) {
    DenseOptions dopt;
    dopt.cap = std::max<uint64_t>(opt.dense_cap, op.size());
    return dense_spectrum(op, dopt);
  }
  return iterative_gap(op, opt.iter);
}

namespace {

std::string format_distance(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

DefectReport equicontinuity_defect(const SkewProductSystem& sys, const DefectOptions& opt) {
  if (opt.samples == 0) throw ValidationError("defect: need at least one sample");
  const auto& closure = sys.closure();
  const auto& base = sys.base();
  const auto& fiber = sys.fiber();
  const uint64_t m = closure.order;
  const size_t nb = base.factor_count();
  const size_t nf = fiber.factor_count();

  std::vector<double> wb(nb), wf(nf);
  for (size_t i = 0; i < nb; ++i) wb[i] = std::ldexp(1.0, -static_cast<int>(i));
  for (size_t j = 0; j < nf; ++j) wf[j] = std::ldexp(1.0, -static_cast<int>(nb + j));

  // Base distance between c^t and c^s depends only on (s - t) mod m:
  // component i differs exactly when c^(s-t) is nontrivial in factor i.
  std::vector<double> base_dist(m, 0.0);
  {
    std::vector<uint32_t> comps(nb);
    for (uint64_t d = 0; d < m; ++d) {
      base.decompose(closure.powers[d], comps);
      double s = 0.0;
      for (size_t i = 0; i < nb; ++i) {
        if (comps[i] != 0) s += wb[i];
      }
      base_dist[d] = s;
    }
  }

  double min_positive = std::numeric_limits<double>::infinity();
  for (uint64_t d = 1; d < m; ++d) min_positive = std::min(min_positive, base_dist[d]);
  for (size_t j = 0; j < nf; ++j) {
    if (fiber.factor(j).size() > 1) min_positive = std::min(min_positive, wf[j]);
  }
  if (!(opt.delta >= min_positive)) {
    throw ValidationError("delta " + format_distance(opt.delta) +
                          " is below the metric resolution; the minimal positive distance is " +
                          format_distance(min_positive));
  }

  std::vector<size_t> fiber_sizes(nf);
  for (size_t j = 0; j < nf; ++j) fiber_sizes[j] = fiber.factor(j).size();

  const auto fiber_distance = [&](uint64_t y1, uint64_t y2) {
    std::vector<uint32_t> c1(nf), c2(nf);
    fiber.decompose(y1, c1);
    fiber.decompose(y2, c2);
    double s = 0.0;
    for (size_t j = 0; j < nf; ++j) {
      if (c1[j] != c2[j]) s += wf[j];
    }
    return s;
  };
  const auto pair_distance = [&](uint64_t t1, uint64_t y1, uint64_t t2, uint64_t y2) {
    return base_dist[(t2 + m - t1) % m] + fiber_distance(y1, y2);
  };

  Rng rng(mix64(opt.seed));
  const auto& values = sys.cocycle().values;

  DefectReport report;
  report.delta = opt.delta;
  report.horizon = opt.horizon;
  report.samples = opt.samples;
  report.seed = opt.seed;
  report.min_positive_distance = min_positive;
  report.defect = -1.0;

  std::vector<uint32_t> ycomps(nf);
  for (uint64_t sample = 0; sample < opt.samples; ++sample) {
    const uint64_t t = rng.below(m);
    for (size_t j = 0; j < nf; ++j) ycomps[j] = static_cast<uint32_t>(rng.below(fiber_sizes[j]));
    const uint64_t y = fiber.compose(ycomps);

    double budget = opt.delta;
    // Base offset: choose uniformly among all powers within budget.
    std::vector<uint64_t> cands;
    for (uint64_t d = 0; d < m; ++d) {
      if (base_dist[d] <= budget) cands.push_back(d);
    }
    const uint64_t off = cands[rng.below(cands.size())];
    uint64_t q_t = (t + off) % m;
    budget -= base_dist[off];

    // Fiber flips, heaviest factor first, coin per factor while affordable.
    std::vector<uint32_t> y2comps = ycomps;
    bool differs = off != 0;
    for (size_t j = 0; j < nf; ++j) {
      if (wf[j] > budget || fiber_sizes[j] <= 1) continue;
      if (rng.below(2) == 1) {
        uint64_t v = rng.below(fiber_sizes[j] - 1);
        if (v >= y2comps[j]) ++v;
        y2comps[j] = static_cast<uint32_t>(v);
        budget -= wf[j];
        differs = true;
      }
    }
    if (!differs) {
      // All coins came up tails; force the cheapest affordable difference.
      // The resolution guard ensures one exists within delta.
      size_t flip = nf;
      for (size_t j = nf; j-- > 0;) {
        if (wf[j] <= opt.delta && fiber_sizes[j] > 1) {
          flip = j;
          break;
        }
      }
      if (flip < nf) {
        uint64_t v = rng.below(fiber_sizes[flip] - 1);
        if (v >= y2comps[flip]) ++v;
        y2comps[flip] = static_cast<uint32_t>(v);
      } else {
        uint64_t best = 1;
        for (uint64_t d = 2; d < m; ++d) {
          if (base_dist[d] < base_dist[best]) best = d;
        }
        q_t = (t + best) % m;
      }
    }
    const uint64_t q_y = fiber.compose(y2comps);

    uint64_t pt = t, qt = q_t;
    uint64_t py = y, qy = q_y;
    const double initial = pair_distance(pt, py, qt, qy);
    double worst = initial;
    uint64_t worst_step = 0;
    for (uint64_t step = 1; step <= opt.horizon; ++step) {
      py = fiber.mul(values[pt], py);
      pt = (pt + 1) % m;
      qy = fiber.mul(values[qt], qy);
      qt = (qt + 1) % m;
      const double dist = pair_distance(pt, py, qt, qy);
      if (dist > worst) {
        worst = dist;
        worst_step = step;
      }
    }
    if (worst > report.defect) {
      report.defect = worst;
      report.p_power = t;
      report.p_fiber = y;
      report.q_power = q_t;
      report.q_fiber = q_y;
      report.initial_distance = initial;
      report.attained_step = worst_step;
    }
  }
  return report;
}

}  // namespace sl2dyn
