/**
 * @file suites.hpp
 * @brief Property suites behind `tiltlab verify`: lemmas, two-out-of-three, bijection and
 *        alcove-cross. Each returns a JSON report {suite, ell, W, config, cases, failures}.
 */
#pragma once

#include "tiltlab/alcove.hpp"
#include "tiltlab/ideals.hpp"

namespace tiltlab {

struct RunConfig {
  int ell = 3;
  int window = 12;
  std::string suite = "lemmas";
  int budget = 30;
  std::uint64_t seed = 1;
  std::string cache_dir;
  std::string output;

  void validate() const {
    if (ell < 3 || ell % 2 == 0) throw std::invalid_argument("ell must be odd and at least 3");
    if (window < 2 * (ell - 1))
      throw std::invalid_argument("window must be at least 2(ell-1) = " + std::to_string(2 * (ell - 1)));
    if (budget < 0) throw std::invalid_argument("budget must be non-negative");
  }

  json to_json() const {
    return json{{"ell", ell},       {"window", window}, {"suite", suite},   {"budget", budget},
                {"seed", seed},     {"cache_dir", cache_dir}, {"output", output}};
  }
};

namespace suites {

inline json report_header(const std::string& name, const RunConfig& cfg) {
  json r;
  r["suite"] = name;
  r["ell"] = cfg.ell;
  r["W"] = cfg.window;
  r["seed"] = cfg.seed;
  r["config"] = cfg.to_json();
  r["cases"] = json::array();
  r["failures"] = json::array();
  return r;
}

inline json multiset_json(const std::map<int, LabelMultiset>& m) {
  json j = json::object();
  for (const auto& [i, ms] : m) {
    std::vector<int> flat;
    for (const auto& [lab, k] : ms) flat.insert(flat.end(), k, lab);
    if (!flat.empty()) j[std::to_string(i)] = flat;
  }
  return j;
}

inline std::map<int, LabelMultiset> shifted(const std::map<int, LabelMultiset>& m, int s) {
  std::map<int, LabelMultiset> out;
  for (const auto& [i, ms] : m) out[i + s] = ms;
  return out;
}

inline LabelMultiset at(const std::map<int, LabelMultiset>& m, int i) {
  auto it = m.find(i);
  return it == m.end() ? LabelMultiset{} : it->second;
}

inline void require_window(const TiltingComplex& C, int W, const std::string& what) {
  for (const auto& [i, l] : C.labels)
    for (int n : l)
      if (n > W) throw WindowOverflow(what + ": C_min label " + std::to_string(n) + " exceeds window W=" + std::to_string(W), n);
}

/// Per-degree equality C_min(M (+) N) = C_min(M) (+) C_min(N).
inline json direct_sum_case(const NamedModule& M, const NamedModule& N, int W, bool& pass) {
  auto cm = minimal_tilting_complex(M.module).complex;
  auto cn = minimal_tilting_complex(N.module).complex;
  auto cs = minimal_tilting_complex(direct_sum(*M.module, *N.module)).complex;
  require_window(cs, W, M.name + "+" + N.name);
  auto expected = cm.multisets();
  for (const auto& [i, ms] : cn.multisets()) expected[i] = multiset_sum(expected[i], ms);
  pass = cs.multisets() == expected;
  return json{{"M", M.name}, {"N", N.name}, {"sum", labels_json(cs)}, {"expected", multiset_json(expected)}, {"pass", pass}};
}

/// The three termwise split-embedding containments for an SES 0 -> A -> B -> C -> 0.
inline json ses_case(const SampledSES& s, int W, bool& pass) {
  auto a = minimal_tilting_complex(s.A).complex;
  auto b = minimal_tilting_complex(s.B).complex;
  auto c = minimal_tilting_complex(s.C).complex;
  for (const auto* x : {&a, &b, &c}) require_window(*x, W, s.description);
  auto A = a.multisets(), B = b.multisets(), C = c.multisets();
  std::set<int> degs;
  for (const auto* m : {&A, &B, &C})
    for (const auto& [i, ms] : *m) {
      degs.insert(i);
      degs.insert(i - 1);
      degs.insert(i + 1);
    }
  std::vector<std::string> violations;
  for (int i : degs) {
    if (!multiset_contains(multiset_sum(at(B, i), at(C, i - 1)), at(A, i))) violations.push_back("A_" + std::to_string(i));
    if (!multiset_contains(multiset_sum(at(A, i), at(C, i)), at(B, i))) violations.push_back("B_" + std::to_string(i));
    if (!multiset_contains(multiset_sum(at(A, i + 1), at(B, i)), at(C, i))) violations.push_back("C_" + std::to_string(i));
  }
  pass = violations.empty() && s.is_exact();
  return json{{"ses", s.id},
              {"description", s.description},
              {"dims", {s.A->dim(), s.B->dim(), s.C->dim()}},
              {"A", labels_json(a)},
              {"B", labels_json(b)},
              {"C", labels_json(c)},
              {"violations", violations},
              {"pass", pass}};
}

/// Sub-multiset containment C_min(M (x) N) in C_min(M) (x) C_min(N) and Kunneth concentration.
inline json tensor_case(const NamedModule& M, const NamedModule& N, int W, bool& pass) {
  auto cm = minimal_tilting_complex(M.module).complex;
  auto cn = minimal_tilting_complex(N.module).complex;
  ModulePtr MN = tensor_module(*M.module, *N.module);
  auto cmn = minimal_tilting_complex(MN).complex;
  require_window(cmn, W, M.name + "(x)" + N.name);
  auto product = tensor_labels(cm, cn);
  bool contained = true;
  for (const auto& [i, ms] : cmn.multisets())
    if (!multiset_contains(at(product, i), ms)) contained = false;
  // Kunneth: the tensor product of the two complexes has cohomology M (x) N in degree zero only
  ChainComplex tc = tensor_tilting_complexes(cm, cn).to_chain_complex();
  auto coh = tc.cohomology_characters();
  Character expect = M.module->character() * N.module->character();
  bool kunneth = coh.size() == 1 && coh.count(0) && coh.at(0) == expect && coh.at(0).dimension() == MN->dim();
  pass = contained && kunneth;
  json cj = json::object();
  for (const auto& [i, c] : coh) cj[std::to_string(i)] = c.dimension();
  return json{{"M", M.name},          {"N", N.name},          {"cmin", labels_json(cmn)},
              {"product", multiset_json(product)}, {"contained", contained}, {"cohomology_dims", cj},
              {"kunneth", kunneth},   {"pass", pass}};
}

/// C_min matches the expected labels and its cohomology is M in degree zero (module isomorphism).
inline json fixed_point_case(const NamedModule& M, const std::map<int, std::vector<int>>& expected, bool& pass) {
  auto C = minimal_tilting_complex(M.module).complex;
  bool labels_ok = C.sorted_labels() == expected;
  ChainComplex cc = C.to_chain_complex();
  bool coh_ok = cc.d_squared_zero();
  for (int i = cc.min_degree(); i <= cc.max_degree() && coh_ok; ++i) {
    ModulePtr H = cc.cohomology(i);
    coh_ok = i == 0 ? are_isomorphic(H, M.module) : H->is_zero();
  }
  if (cc.is_zero()) coh_ok = M.module->is_zero();
  pass = labels_ok && coh_ok && C.is_minimal();
  json ej = json::object();
  for (const auto& [i, l] : expected) ej[std::to_string(i)] = l;
  return json{{"module", M.name}, {"cmin", labels_json(C)}, {"expected", ej}, {"cohomology_oracle", coh_ok}, {"pass", pass}};
}

inline void add_case(json& report, const std::string& id, json c, bool pass) {
  c["id"] = id;
  if (!pass) report["failures"].push_back(id);
  report["cases"].push_back(std::move(c));
}

inline json lemmas(const RunConfig& cfg) {
  json r = report_header("lemmas", cfg);
  const int ell = cfg.ell, W = cfg.window;
  std::mt19937_64 rng(cfg.seed);
  const std::vector<std::string> all_kinds = {"L", "delta", "nabla", "T"};
  char id[64];
  for (int k = 0; k < cfg.budget; ++k) {
    NamedModule M = random_standard_module(rng, ell, 8, all_kinds);
    NamedModule N = random_standard_module(rng, ell, 8, all_kinds);
    bool pass = false;
    json c = direct_sum_case(M, N, W, pass);
    std::snprintf(id, sizeof id, "direct-sum-%03d", k);
    add_case(r, id, c, pass);
  }
  for (const auto& s : sample_ses(ell, cfg.budget, cfg.seed ^ 0x5e5ULL)) {
    bool pass = false;
    json c = ses_case(s, W, pass);
    std::snprintf(id, sizeof id, "ses-%03d", s.id);
    add_case(r, id, c, pass);
  }
  for (int k = 0; k < std::min(cfg.budget, 20); ++k) {
    NamedModule M = random_standard_module(rng, ell, 4, all_kinds);
    NamedModule N = random_standard_module(rng, ell, 4, all_kinds);
    bool pass = false;
    json c = tensor_case(M, N, W, pass);
    std::snprintf(id, sizeof id, "tensor-%03d", k);
    add_case(r, id, c, pass);
  }
  // fixed points: tiltings are their own minimal complexes; L(l) and Delta(l) have three- and two-term complexes
  std::vector<std::pair<NamedModule, std::map<int, std::vector<int>>>> fixed;
  for (int n = 0; n <= ell + 1; ++n) fixed.push_back({named_module(ell, "T", n), {{0, {n}}}});
  fixed.push_back({named_module(ell, "L", ell), {{-1, {ell - 2}}, {0, {ell}}, {1, {ell - 2}}}});
  fixed.push_back({named_module(ell, "delta", ell), {{0, {ell}}, {1, {ell - 2}}}});
  for (std::size_t k = 0; k < fixed.size(); ++k) {
    bool pass = false;
    json c = fixed_point_case(fixed[k].first, fixed[k].second, pass);
    std::snprintf(id, sizeof id, "fixed-%02zu", k);
    add_case(r, id, c, pass);
  }
  return r;
}

inline json two_out_of_three(const RunConfig& cfg) {
  json r = report_header("two-out-of-three", cfg);
  auto sample = sample_ses(cfg.ell, cfg.budget, cfg.seed);
  for (const auto& I : enumerate_tilt_ideals(cfg.ell, cfg.window)) {
    RepIdealHandle J{I};
    // every sampled complex must fit the window before membership is meaningful
    for (const auto& s : sample)
      for (const auto& M : {s.A, s.B, s.C}) require_window(minimal_tilting_complex(M).complex, cfg.window, s.description);
    auto rep = verify_two_out_of_three(J, sample);
    for (const auto& c : rep.cases) {
      std::string id = "ideal-" + I.to_string() + "-ses-" + std::to_string(c.ses_id);
      json cj{{"ideal", I.to_string()},
              {"ses", c.ses_id},
              {"description", c.description},
              {"dims", c.dims},
              {"membership", c.member},
              {"pass", c.consistent}};
      add_case(r, id, cj, c.consistent);
    }
  }
  return r;
}

inline json bijection(const RunConfig& cfg) {
  json r = report_header("bijection", cfg);
  const int ell = cfg.ell, W = cfg.window;
  auto pool = standard_pool(ell, 6);
  for (const auto& s : sample_ses(ell, cfg.budget, cfg.seed)) {
    pool.push_back({"sub[" + s.description + "]", s.A});
    pool.push_back({"quot[" + s.description + "]", s.C});
  }
  for (const auto& p : pool) require_window(minimal_tilting_complex(p.module).complex, W, p.name);
  auto rep = verify_bijection(ell, W, pool);
  json ideals = json::array();
  for (const auto& I : rep.ideals) {
    json ij{{"members", I.members}, {"proper", I.is_proper()}};
    if (I.is_proper()) ij["prime_on_window"] = is_prime_on_window(I);
    ideals.push_back(ij);
  }
  r["ideals"] = ideals;
  r["pool_size"] = pool.size();
  // lattice shape: empty, negligible, full
  auto neg = negligible_set(ell, W);
  bool shape = rep.ideals.size() == 3 && rep.ideals[0].members.empty() && rep.ideals[1].members == neg && rep.ideals[2].is_full() &&
               is_prime_on_window(rep.ideals[1]);
  add_case(r, "lattice", json{{"count", rep.ideals.size()}, {"pass", shape}}, shape);
  for (std::size_t i = 0; i < rep.round_trip.size(); ++i) {
    const auto& [name, ok] = rep.round_trip[i];
    add_case(r, "round-trip-" + name, json{{"ideal", name}, {"pass", ok}}, ok);
  }
  for (const auto& [i, j, w] : rep.separation) {
    bool ok = w >= 0;
    add_case(r, "separate-" + rep.ideals[i].to_string() + "-" + rep.ideals[j].to_string(),
             json{{"witness", ok ? json("T(" + std::to_string(w) + ")") : json(nullptr)}, {"pass", ok}}, ok);
  }
  bool inter = true, minimal = true;
  for (const auto& f : rep.failures) {
    if (f.rfind("(c)", 0) == 0) inter = false;
    if (f.rfind("(d)", 0) == 0) minimal = false;
  }
  add_case(r, "intersections", json{{"checks", rep.intersection_checks}, {"pass", inter}}, inter);
  add_case(r, "minimality", json{{"checks", rep.minimality_checks}, {"pass", minimal}}, minimal);
  for (const auto& f : rep.failures) r["messages"].push_back(f);
  return r;
}

/// gfd(L(lambda)) against d(lambda) for type A1 at p = l, plus degree-bound and linkage probes.
inline json alcove_cross(const RunConfig& cfg) {
  json r = report_header("alcove-cross", cfg);
  const int ell = cfg.ell;
  auto A1 = alcove::build_root_system("A1");
  json table = json::array();
  json observations = json::array();
  for (int lambda = 0; lambda <= cfg.window; ++lambda) {
    auto C = minimal_tilting_complex(simple_module(ell, lambda)).complex;
    auto fd = filtration_dimensions(C);
    long long d = alcove::separating_hyperplane_count(A1, {lambda}, ell);
    bool regular = alcove::is_p_regular(A1, {lambda}, ell);
    bool match = fd.gfd == d;
    table.push_back(json{{"lambda", lambda}, {"p_regular", regular}, {"gfd", fd.gfd}, {"wfd", fd.wfd}, {"d", d}, {"match", match}});
    // degree bound |i| <= d(lambda) - d(nu) and linkage
    auto orbit = alcove::dot_orbit(A1, {lambda}, ell, cfg.window);
    std::set<int> linked;
    for (const auto& w : orbit) linked.insert(static_cast<int>(w[0]));
    for (const auto& [i, labels] : C.labels)
      for (int nu : labels) {
        long long dn = alcove::separating_hyperplane_count(A1, {nu}, ell);
        if (std::abs(i) > d - dn)
          observations.push_back(json{{"lambda", lambda}, {"degree", i}, {"label", nu}, {"probe", "degree-bound"}});
        if (!linked.count(nu)) observations.push_back(json{{"lambda", lambda}, {"degree", i}, {"label", nu}, {"probe", "linkage"}});
      }
    if (!regular) continue;
    bool pass = match || lambda >= ell;
    if (!match && lambda >= ell)
      observations.push_back(json{{"lambda", lambda}, {"gfd", fd.gfd}, {"d", d}, {"probe", "gfd-vs-d"}});
    add_case(r, "gfd-" + std::to_string(lambda), json{{"lambda", lambda}, {"gfd", fd.gfd}, {"d", d}, {"pass", pass}}, pass);
  }
  r["table"] = table;
  r["observations"] = observations;
  return r;
}

inline json run_suite(const RunConfig& cfg) {
  cfg.validate();
  json r;
  if (cfg.suite == "lemmas") r = lemmas(cfg);
  else if (cfg.suite == "two-out-of-three") r = two_out_of_three(cfg);
  else if (cfg.suite == "bijection") r = bijection(cfg);
  else if (cfg.suite == "alcove-cross") r = alcove_cross(cfg);
  else throw std::invalid_argument("unknown suite '" + cfg.suite + "'");
  // cases sorted by id for order-independent output
  auto& cases = r["cases"];
  std::sort(cases.begin(), cases.end(), [](const json& a, const json& b) { return a["id"] < b["id"]; });
  std::sort(r["failures"].begin(), r["failures"].end());
  r["pass"] = r["failures"].empty();
  return r;
}

}  // namespace suites
}  // namespace tiltlab
