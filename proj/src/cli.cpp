#include "sl2dyn/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sl2dyn/parallel.hpp"
#include "sl2dyn/report.hpp"

namespace sl2dyn {

namespace {

std::vector<IntMat2> gens_by_name(const std::string& name) {
  const Generators& g = canonical_generators();
  if (name == "ab") return {g.a, g.b};
  if (name == "abc") return {g.a, g.b, g.c};
  throw ValidationError("--gens must be 'ab' or 'abc', got '" + name + "'");
}

std::vector<Prime> parse_prime_list(const std::string& csv) {
  std::vector<Prime> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.emplace_back(static_cast<uint32_t>(std::stoul(tok)));
  }
  return out;
}

std::vector<Prime> primes_in_range(uint32_t pmin, uint32_t pmax, const std::string& cls) {
  if (cls != "1" && cls != "3" && cls != "all") {
    throw ValidationError("--class must be 1, 3 or all");
  }
  std::vector<Prime> out;
  for (uint32_t v = pmin | 1; v <= pmax; v += 2) {
    try {
      Prime p(v);
      if (cls == "all" || p.residue_class_mod4() == (cls == "1" ? 1 : 3)) out.push_back(p);
    } catch (const ValidationError&) {
      // not prime (or 2); skip
    }
  }
  return out;
}

// Generator file: one matrix per line as four integers a11 a12 a21 a22.
// Blank lines and lines starting with '#' are ignored.
std::vector<IntMat2> load_gens_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open generator file: " + path);
  std::vector<IntMat2> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string e[4];
    if (!(ls >> e[0] >> e[1] >> e[2] >> e[3])) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected four integers");
    }
    out.emplace_back(BigInt(e[0]), BigInt(e[1]), BigInt(e[2]), BigInt(e[3]));
  }
  if (out.empty()) throw ValidationError(path + ": no generators found");
  return out;
}

CocycleSpec parse_cocycle(const std::string& s) {
  if (s == "trivial") return CocycleSpec::trivial();
  if (s.rfind("random:", 0) == 0) {
    return CocycleSpec::seeded_random(std::stoull(s.substr(7)));
  }
  throw ValidationError("--cocycle must be 'trivial' or 'random:SEED', got '" + s + "'");
}

void emit_json(const Json& j, const std::string& out_path) {
  emit_report(j.dump(2) + "\n", out_path);
}

}  // namespace

std::string version_string() {
  const Generators& g = canonical_generators();
  std::ostringstream os;
  os << "sl2dyn 1.0.0\n"
     << "generators: x=" << g.x.str() << " y=" << g.y.str() << " a=" << g.a.str()
     << " b=" << g.b.str() << " c=" << g.c.str() << "\n"
     << "prng: mt19937_64";
  return os.str();
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"exact SL2(Z) generator arithmetic, SL2(Z_p) Cayley-graph spectral gaps, "
               "and a skew-product action simulator"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  unsigned threads = 1;
  app.add_option("--threads", threads,
                 "worker count for data-parallel loops; never changes results")
      ->capture_default_str();

  int result = 0;

  // ---- freecheck ----------------------------------------------------------
  auto* free_cmd =
      app.add_subcommand("freecheck", "exhaustive finite-length freeness scan of generator images");
  uint32_t fc_rank = 3;
  uint32_t fc_maxlen = 10;
  std::string fc_gens = "default";
  std::string fc_out;
  free_cmd->add_option("--rank", fc_rank, "rank for the default generators (2 or 3)")
      ->capture_default_str();
  free_cmd->add_option("--max-len", fc_maxlen, "scan words up to this length")
      ->capture_default_str();
  free_cmd->add_option("--gens", fc_gens, "'default' or a file with one matrix per line")
      ->capture_default_str();
  free_cmd->add_option("--out", fc_out, "write the JSON report here instead of stdout");
  free_cmd->callback([&] {
    set_worker_count(threads);
    std::vector<IntMat2> images;
    if (fc_gens == "default") {
      const Generators& g = canonical_generators();
      if (fc_rank == 2) {
        images = {g.a, g.b};
      } else if (fc_rank == 3) {
        images = {g.a, g.b, g.c};
      } else {
        throw ValidationError("default generators are defined for rank 2 and 3");
      }
    } else {
      images = load_gens_file(fc_gens);
    }
    const FreenessReport rep = freeness_scan(images, fc_maxlen);
    Json j;
    j["command"] = "freecheck";
    j["config"] = Json{{"rank", images.size()},
                       {"max_length", fc_maxlen},
                       {"gens", fc_gens},
                       {"threads", threads}};
    Json imgs = Json::array();
    for (const IntMat2& m : images) imgs.push_back(m.str());
    j["images"] = imgs;
    j["report"] = to_json(rep);
    emit_json(j, fc_out);
    if (rep.witness) {
      std::cerr << "freeness refuted: " << rep.witness->str() << " evaluates to the identity\n";
      result = 1;
    }
  });

  // ---- enumerate ----------------------------------------------------------
  auto* enum_cmd = app.add_subcommand("enumerate", "BFS subgroup enumeration mod p");
  uint32_t en_prime = 0;
  std::string en_gens = "ab";
  std::string en_dump, en_out;
  uint64_t en_cap = 20'000'000;
  enum_cmd->add_option("--prime", en_prime, "odd prime modulus")->required();
  enum_cmd->add_option("--gens", en_gens, "ab | abc")->capture_default_str();
  enum_cmd->add_option("--dump", en_dump, "write the move table as a binary file");
  enum_cmd->add_option("--max-elements", en_cap, "enumeration capacity")->capture_default_str();
  enum_cmd->add_option("--out", en_out, "write the JSON report here instead of stdout");
  enum_cmd->callback([&] {
    set_worker_count(threads);
    const Prime p(en_prime);
    EnumerationOptions eopt;
    eopt.max_elements = en_cap;
    const auto gens = gens_by_name(en_gens);
    const GroupTable table = GroupTable::enumerate(p, gens, eopt);
    GenerationReport rep;
    rep.prime = p.value();
    rep.subgroup_size = table.size();
    rep.full_group_size = sl2_order(p);
    rep.generated = rep.subgroup_size == rep.full_group_size;
    if (!en_dump.empty()) {
      std::ofstream os(en_dump, std::ios::binary);
      if (!os) throw std::runtime_error("cannot open dump file: " + en_dump);
      dump_table(table, os);
    }
    Json j;
    j["command"] = "enumerate";
    j["config"] = Json{{"prime", en_prime},
                       {"gens", en_gens},
                       {"dump", en_dump},
                       {"max_elements", en_cap},
                       {"threads", threads}};
    j["report"] = to_json(rep);
    emit_json(j, en_out);
  });

  // ---- gap ----------------------------------------------------------------
  auto* gap_cmd = app.add_subcommand("gap", "spectral gap of one Cayley graph");
  uint32_t gp_prime = 0;
  std::string gp_gens = "ab";
  bool gp_dense = false, gp_iter = false;
  double gp_tol = 1e-8;
  uint64_t gp_seed = 1;
  uint64_t gp_max_iter = 20'000;
  uint64_t gp_dense_cap = 5000;
  std::string gp_out;
  gap_cmd->add_option("--prime", gp_prime, "odd prime modulus")->required();
  gap_cmd->add_option("--gens", gp_gens, "ab | abc")->capture_default_str();
  gap_cmd->add_flag("--dense", gp_dense, "force the dense solver");
  gap_cmd->add_flag("--iter", gp_iter, "force the iterative solver");
  gap_cmd->add_option("--tol", gp_tol, "iterative residual tolerance")->capture_default_str();
  gap_cmd->add_option("--seed", gp_seed, "iterative start-vector seed")->capture_default_str();
  gap_cmd->add_option("--max-iter", gp_max_iter, "iterative operator-application budget")
      ->capture_default_str();
  gap_cmd->add_option("--dense-cap", gp_dense_cap, "auto mode switches solvers at this size")
      ->capture_default_str();
  gap_cmd->add_option("--out", gp_out, "write the JSON report here instead of stdout");
  gap_cmd->callback([&] {
    set_worker_count(threads);
    if (gp_dense && gp_iter) throw ValidationError("--dense and --iter are mutually exclusive");
    const Prime p(gp_prime);
    const auto gens = gens_by_name(gp_gens);
    const GroupTable table = GroupTable::enumerate(p, gens);
    const WalkOperator op = walk_operator(table);
    SpectralReport rep;
    if (gp_dense || (!gp_iter && op.size() <= gp_dense_cap)) {
      DenseOptions dopt;
      dopt.cap = std::max<uint64_t>(gp_dense_cap, gp_dense ? op.size() : 0);
      rep = dense_spectrum(op, dopt);
    } else {
      IterativeOptions iopt;
      iopt.tol = gp_tol;
      iopt.max_applies = gp_max_iter;
      iopt.seed = gp_seed;
      rep = iterative_gap(op, iopt);
    }
    Json j;
    j["command"] = "gap";
    j["config"] = Json{{"prime", gp_prime}, {"gens", gp_gens},   {"tol", gp_tol},
                       {"seed", gp_seed},   {"max_iter", gp_max_iter}, {"threads", threads},
                       {"prng", "mt19937_64"}};
    j["group"] = Json{{"subgroup_size", table.size()},
                      {"full_group_size", sl2_order(p)},
                      {"generated", table.size() == sl2_order(p)}};
    j["report"] = to_json(rep);
    emit_json(j, gp_out);
    if (rep.flag == "not-converged") result = 3;
  });

  // ---- scan ---------------------------------------------------------------
  auto* scan_cmd = app.add_subcommand("scan", "gap scan over a prime range, CSV output");
  uint32_t sc_pmin = 3, sc_pmax = 3;
  std::string sc_class = "all";
  std::string sc_gens = "ab";
  double sc_tol = 1e-10;
  uint64_t sc_seed = 1;
  uint64_t sc_dense_cap = 1500;
  uint64_t sc_cap = 20'000'000;
  std::string sc_out;
  scan_cmd->add_option("--pmin", sc_pmin, "lower end of the prime range")->required();
  scan_cmd->add_option("--pmax", sc_pmax, "upper end of the prime range")->required();
  scan_cmd->add_option("--class", sc_class, "residue class mod 4: 1 | 3 | all")
      ->capture_default_str();
  scan_cmd->add_option("--gens", sc_gens, "ab | abc")->capture_default_str();
  scan_cmd->add_option("--tol", sc_tol, "iterative residual tolerance")->capture_default_str();
  scan_cmd->add_option("--seed", sc_seed, "per-prime solver seeds derive from this")
      ->capture_default_str();
  scan_cmd->add_option("--dense-cap", sc_dense_cap, "dense/iterative switchover size")
      ->capture_default_str();
  scan_cmd->add_option("--max-elements", sc_cap, "per-prime enumeration capacity")
      ->capture_default_str();
  scan_cmd->add_option("--out", sc_out, "write the CSV here instead of stdout");
  scan_cmd->callback([&] {
    set_worker_count(threads);
    const auto primes = primes_in_range(sc_pmin, sc_pmax, sc_class);
    const auto gens = gens_by_name(sc_gens);
    ScanOptions opt;
    opt.tol = sc_tol;
    opt.seed = sc_seed;
    opt.dense_cap = sc_dense_cap;
    opt.max_elements = sc_cap;
    const auto rows = gap_scan(primes, gens, opt);
    emit_report(to_csv(rows), sc_out);
    for (const ScanRow& r : rows) {
      if (r.flag == "capacity" || r.flag == "not-converged") result = 3;
    }
  });

  // ---- simulate -----------------------------------------------------------
  auto* sim_cmd = app.add_subcommand("simulate", "skew-product transitivity and Koopman gap");
  std::string sm_kprimes, sm_lprimes;
  std::string sm_cocycle = "trivial";
  std::string sm_moves = "abc";
  uint64_t sm_steps = 20'000;
  uint64_t sm_cap = 20'000'000;
  uint64_t sm_dense_cap = 2000;
  uint64_t sm_seed = 1;
  std::string sm_out;
  sim_cmd->add_option("--kprimes", sm_kprimes, "base primes (1 mod 4), comma separated");
  sim_cmd->add_option("--lprimes", sm_lprimes, "fiber primes (3 mod 4), comma separated");
  sim_cmd->add_option("--cocycle", sm_cocycle, "trivial | random:SEED")->capture_default_str();
  sim_cmd->add_option("--moves", sm_moves, "abc | ab | c")->capture_default_str();
  sim_cmd->add_option("--steps", sm_steps, "iterative operator-application budget")
      ->capture_default_str();
  sim_cmd->add_option("--cap", sm_cap, "product-space capacity")->capture_default_str();
  sim_cmd->add_option("--dense-cap", sm_dense_cap, "dense/iterative switchover size")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sm_seed, "iterative start-vector seed")->capture_default_str();
  sim_cmd->add_option("--out", sm_out, "write the JSON report here instead of stdout");
  sim_cmd->callback([&] {
    set_worker_count(threads);
    const Generators& g = canonical_generators();
    const std::vector<IntMat2> kgens{g.a, g.b, g.c};
    const std::vector<IntMat2> lgens{g.a, g.b};
    auto base = TruncatedProduct::build(1, parse_prime_list(sm_kprimes), kgens);
    auto fiber = TruncatedProduct::build(3, parse_prime_list(sm_lprimes), lgens);
    const SkewProductSystem sys(std::move(base), std::move(fiber), parse_cocycle(sm_cocycle));
    MoveSet set;
    if (sm_moves == "abc") {
      set = MoveSet::f3;
    } else if (sm_moves == "ab") {
      set = MoveSet::f2_diagonal;
    } else if (sm_moves == "c") {
      set = MoveSet::c_only;
    } else {
      throw ValidationError("--moves must be abc, ab or c");
    }
    const TransitivityReport trans = orbit_transitivity(sys, set, sm_cap);
    KoopmanOptions kopt;
    kopt.cap = sm_cap;
    kopt.dense_cap = sm_dense_cap;
    kopt.iter.max_applies = sm_steps;
    kopt.iter.seed = sm_seed;
    const SpectralReport gap = koopman_gap(sys, set, kopt);
    Json j;
    j["command"] = "simulate";
    j["config"] = Json{{"kprimes", sm_kprimes}, {"lprimes", sm_lprimes},
                       {"cocycle", sm_cocycle}, {"moves", sm_moves},
                       {"steps", sm_steps},     {"seed", sm_seed},
                       {"threads", threads},    {"prng", "mt19937_64"}};
    j["system"] = Json{{"base_size", sys.base().total_size()},
                       {"fiber_size", sys.fiber().total_size()},
                       {"product_size", sys.product_size()},
                       {"closure_order", sys.closure().order},
                       {"coset_count", sys.closure().coset_reps.size()}};
    j["transitive"] = trans.transitive;
    j["orbit_count"] = trans.orbit_count;
    j["gap_report"] = to_json(gap);
    emit_json(j, sm_out);
    if (gap.flag == "not-converged") result = 3;
  });

  // ---- defect --------------------------------------------------------------
  auto* def_cmd =
      app.add_subcommand("defect", "equicontinuity defect of the c-move on closure x fiber");
  std::string df_kprimes, df_lprimes;
  std::string df_cocycle = "trivial";
  double df_delta = 0.5;
  uint64_t df_horizon = 100;
  uint64_t df_samples = 100;
  uint64_t df_seed = 1;
  std::string df_out;
  def_cmd->add_option("--kprimes", df_kprimes, "base primes (1 mod 4), comma separated");
  def_cmd->add_option("--lprimes", df_lprimes, "fiber primes (3 mod 4), comma separated");
  def_cmd->add_option("--cocycle", df_cocycle, "trivial | random:SEED")->capture_default_str();
  def_cmd->add_option("--delta", df_delta, "initial separation budget")->capture_default_str();
  def_cmd->add_option("--horizon", df_horizon, "c-move iterations per pair")->capture_default_str();
  def_cmd->add_option("--samples", df_samples, "sampled pairs")->capture_default_str();
  def_cmd->add_option("--seed", df_seed, "sampler seed")->capture_default_str();
  def_cmd->add_option("--out", df_out, "write the JSON report here instead of stdout");
  def_cmd->callback([&] {
    set_worker_count(threads);
    const Generators& g = canonical_generators();
    const std::vector<IntMat2> kgens{g.a, g.b, g.c};
    const std::vector<IntMat2> lgens{g.a, g.b};
    auto base = TruncatedProduct::build(1, parse_prime_list(df_kprimes), kgens);
    auto fiber = TruncatedProduct::build(3, parse_prime_list(df_lprimes), lgens);
    const SkewProductSystem sys(std::move(base), std::move(fiber), parse_cocycle(df_cocycle));
    DefectOptions dopt;
    dopt.delta = df_delta;
    dopt.horizon = df_horizon;
    dopt.samples = df_samples;
    dopt.seed = df_seed;
    const DefectReport rep = equicontinuity_defect(sys, dopt);
    Json j;
    j["command"] = "defect";
    j["config"] = Json{{"kprimes", df_kprimes}, {"lprimes", df_lprimes},
                       {"cocycle", df_cocycle}, {"delta", df_delta},
                       {"horizon", df_horizon}, {"samples", df_samples},
                       {"seed", df_seed},       {"threads", threads},
                       {"prng", "mt19937_64"}};
    const Json body = to_json(rep);
    for (const auto& [key, value] : body.items()) j[key] = value;
    emit_json(j, df_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return result;
}

}  // namespace sl2dyn
