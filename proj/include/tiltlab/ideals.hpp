/**
 * @file ideals.hpp
 * @brief Thick tensor ideals of tilting modules on a weight window, the ideals they generate in
 *        the whole module category (via C_min membership), and verifiers for the 2/3-property,
 *        primality and the ideal bijection.
 */
#pragma once

#include <algorithm>
#include <set>

#include "tiltlab/sampling.hpp"

namespace tiltlab {

/// Tensor-product decomposition T(m) (x) T(n) computed from characters.
inline std::map<int, int> tilting_tensor_labels(int ell, int m, int n) {
  auto labs = tilting_labels_from_character(tilting_character(m, ell) * tilting_character(n, ell), ell);
  if (!labs) throw std::logic_error("tensor product of tilting characters is not a tilting character");
  return *labs;
}

struct TensorCertificate {
  int m, n;
  std::map<int, int> labels;
};

/// Ideal of Tilt restricted to [0, W]; `extended` holds the closure computed in [0, 2W].
struct TiltIdeal {
  int ell = 0;
  int W = 0;
  std::set<int> members;
  std::set<int> extended;
  std::vector<TensorCertificate> certificate;

  bool contains(int n) const {
    if (n > 2 * W) throw std::out_of_range("label " + std::to_string(n) + " beyond the extended window");
    return n <= W ? members.count(n) > 0 : extended.count(n) > 0;
  }
  bool is_empty() const { return members.empty(); }
  bool is_full() const { return static_cast<int>(members.size()) == W + 1; }
  bool is_proper() const { return !is_full(); }
  bool operator==(const TiltIdeal& o) const { return ell == o.ell && W == o.W && members == o.members; }

  std::string to_string() const {
    if (members.empty()) return "{}";
    // print runs compactly, e.g. {2..12}
    std::string s = "{";
    auto it = members.begin();
    bool first = true;
    while (it != members.end()) {
      int a = *it, b = a;
      auto jt = std::next(it);
      while (jt != members.end() && *jt == b + 1) b = *jt++;
      s += (first ? "" : ",") + (a == b ? std::to_string(a) : std::to_string(a) + ".." + std::to_string(b));
      first = false;
      it = jt;
    }
    return s + "}";
  }
};

class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Least subset of [0, bound] containing `start` and closed under tensoring with T(k), k <= bound.
inline std::set<int> tensor_closure(int ell, int bound, std::set<int> start, std::vector<TensorCertificate>* cert) {
  std::vector<int> queue(start.begin(), start.end());
  while (!queue.empty()) {
    int a = queue.back();
    queue.pop_back();
    for (int k = 0; k <= bound; ++k) {
      auto labs = tilting_tensor_labels(ell, a, k);
      if (cert) cert->push_back({a, k, labs});
      for (const auto& [lab, mult] : labs)
        if (lab <= bound && start.insert(lab).second) queue.push_back(lab);
    }
  }
  return start;
}

}  // namespace detail

/**
 * Smallest ideal containing the generators. The closure is computed both inside [0, W] and in
 * the extended window [0, 2W]; if the two disagree on [0, W] the window is too small to decide
 * and a ClosureError is raised.
 */
inline TiltIdeal generate_tilt_ideal(const std::set<int>& generators, int ell, int W) {
  for (int g : generators)
    if (g < 0 || g > W) throw std::invalid_argument("generator " + std::to_string(g) + " outside [0, " + std::to_string(W) + "]");
  TiltIdeal I;
  I.ell = ell;
  I.W = W;
  I.extended = detail::tensor_closure(ell, 2 * W, generators, &I.certificate);
  for (int n : I.extended)
    if (n <= W) I.members.insert(n);
  std::set<int> inner = detail::tensor_closure(ell, W, generators, nullptr);
  if (inner != I.members) throw ClosureError("ideal closure depends on labels beyond the window W=" + std::to_string(W));
  return I;
}

inline TiltIdeal intersect(const TiltIdeal& a, const TiltIdeal& b) {
  TiltIdeal r;
  r.ell = a.ell;
  r.W = a.W;
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                        std::inserter(r.members, r.members.end()));
  std::set_intersection(a.extended.begin(), a.extended.end(), b.extended.begin(), b.extended.end(),
                        std::inserter(r.extended, r.extended.end()));
  return r;
}

/// All ideals on [0, W]: closures of every antichain for the order "m lies in the ideal generated by n".
inline std::vector<TiltIdeal> enumerate_tilt_ideals(int ell, int W) {
  std::vector<TiltIdeal> principal;
  for (int n = 0; n <= W; ++n) principal.push_back(generate_tilt_ideal({n}, ell, W));
  auto below = [&](int a, int b) { return principal[b].members.count(a) > 0; };  // a in <b>
  std::vector<TiltIdeal> out;
  std::set<std::set<int>> seen;
  std::vector<int> chosen;
  auto visit = [&](auto&& self, int next) -> void {
    TiltIdeal I = generate_tilt_ideal(std::set<int>(chosen.begin(), chosen.end()), ell, W);
    if (seen.insert(I.members).second) out.push_back(std::move(I));
    for (int n = next; n <= W; ++n) {
      bool comparable = false;
      for (int c : chosen)
        if (below(n, c) || below(c, n)) comparable = true;
      if (comparable) continue;
      chosen.push_back(n);
      self(self, n + 1);
      chosen.pop_back();
    }
  };
  visit(visit, 0);
  std::sort(out.begin(), out.end(), [](const TiltIdeal& a, const TiltIdeal& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return a.members < b.members;
  });
  return out;
}

/// T(n) is negligible iff its quantum dimension vanishes, i.e. n + 1 >= l.
inline bool is_negligible_window(int n, int ell) { return n + 1 >= ell; }

inline std::set<int> negligible_set(int ell, int W) {
  std::set<int> s;
  for (int n = 0; n <= W; ++n)
    if (is_negligible_window(n, ell)) s.insert(n);
  return s;
}

/// If T(m) (x) T(n) lies in I for m, n in the window then T(m) or T(n) does.
inline bool is_prime_on_window(const TiltIdeal& I, std::pair<int, int>* witness = nullptr) {
  if (!I.is_proper()) throw std::invalid_argument("is_prime_on_window: ideal is not proper");
  for (int m = 0; m <= I.W; ++m)
    for (int n = m; n <= I.W; ++n) {
      if (I.contains(m) || I.contains(n)) continue;
      bool all_in = true;
      for (const auto& [lab, mult] : tilting_tensor_labels(I.ell, m, n))
        if (!I.contains(lab)) all_in = false;
      if (all_in) {
        if (witness) *witness = {m, n};
        return false;
      }
    }
  return true;
}

/// Window overflow: a C_min label exceeds W, so membership cannot be decided on the window.
class WindowOverflow : public std::runtime_error {
 public:
  WindowOverflow(const std::string& what, int label) : std::runtime_error(what), label_(label) {}
  int label() const { return label_; }

 private:
  int label_;
};

/// The ideal <I> of all modules whose minimal tilting complex has every term in I.
struct RepIdealHandle {
  TiltIdeal ideal;

  bool contains(const ModulePtr& M) const { return contains(minimal_tilting_complex(M).complex); }

  bool contains(const TiltingComplex& C) const {
    for (const auto& [i, labels] : C.labels)
      for (int n : labels) {
        if (n > ideal.W)
          throw WindowOverflow("C_min label " + std::to_string(n) + " exceeds window W=" + std::to_string(ideal.W), n);
        if (!ideal.members.count(n)) return false;
      }
    return true;
  }
};

inline bool rep_ideal_membership(const RepIdealHandle& J, const ModulePtr& M) { return J.contains(M); }

/// {n in [0, W] : T(n) in J}.
inline std::set<int> intersect_with_tilt(const RepIdealHandle& J, int W) {
  std::set<int> out;
  for (int n = 0; n <= W; ++n)
    if (J.contains(tilting_module(J.ideal.ell, n))) out.insert(n);
  return out;
}

/// Membership pattern of one SES for one ideal.
struct TwoOfThreeCase {
  int ses_id = 0;
  std::string description;
  std::array<int, 3> dims{};
  std::array<bool, 3> member{};
  bool consistent = true;
};

struct TwoOfThreeReport {
  TiltIdeal ideal;
  std::vector<TwoOfThreeCase> cases;
  int violations() const {
    int v = 0;
    for (const auto& c : cases) v += !c.consistent;
    return v;
  }
};

inline TwoOfThreeReport verify_two_out_of_three(const RepIdealHandle& J, const std::vector<SampledSES>& sample) {
  TwoOfThreeReport rep;
  rep.ideal = J.ideal;
  for (const auto& s : sample) {
    TwoOfThreeCase c;
    c.ses_id = s.id;
    c.description = s.description;
    c.dims = {s.A->dim(), s.B->dim(), s.C->dim()};
    c.member = {J.contains(s.A), J.contains(s.B), J.contains(s.C)};
    int k = c.member[0] + c.member[1] + c.member[2];
    c.consistent = k != 2;
    rep.cases.push_back(c);
  }
  return rep;
}

/// Bijection verification data, parts (a)-(d).
struct BijectionReport {
  int ell = 0, W = 0;
  std::vector<TiltIdeal> ideals;
  std::vector<std::string> pool;
  std::vector<std::string> failures;
  // (a) restriction round trip per ideal
  std::vector<std::pair<std::string, bool>> round_trip;
  // (b) separating tilting witness per ordered pair of ideals (i < j), or -1
  std::vector<std::tuple<int, int, int>> separation;
  // (c) number of (ideal pair, module) intersection checks performed
  int intersection_checks = 0;
  // (d) number of monotonicity checks performed
  int minimality_checks = 0;
  bool ok() const { return failures.empty(); }
};

/**
 * (a) <I> restricted to tilting modules gives back I;
 * (b) distinct ideals are separated by some T(n) in one and not the other;
 * (c) M in <I cap I'> iff M in <I> and M in <I'>, for every pool module M;
 * (d) every pool module in <I> lies in <I'> for each enumerated I' containing I.
 */
inline BijectionReport verify_bijection(int ell, int W, const std::vector<NamedModule>& pool) {
  BijectionReport rep;
  rep.ell = ell;
  rep.W = W;
  rep.ideals = enumerate_tilt_ideals(ell, W);
  for (const auto& p : pool) rep.pool.push_back(p.name);
  const auto& ideals = rep.ideals;
  // membership table: ideal x module
  std::vector<std::vector<bool>> mem(ideals.size(), std::vector<bool>(pool.size()));
  std::vector<TiltingComplex> cmins;
  for (const auto& p : pool) cmins.push_back(minimal_tilting_complex(p.module).complex);
  for (std::size_t i = 0; i < ideals.size(); ++i) {
    RepIdealHandle J{ideals[i]};
    for (std::size_t k = 0; k < pool.size(); ++k) mem[i][k] = J.contains(cmins[k]);
    bool rt = intersect_with_tilt(J, W) == ideals[i].members;
    rep.round_trip.push_back({ideals[i].to_string(), rt});
    if (!rt) rep.failures.push_back("(a) restriction of <" + ideals[i].to_string() + "> differs from the ideal");
  }
  for (std::size_t i = 0; i < ideals.size(); ++i)
    for (std::size_t j = i + 1; j < ideals.size(); ++j) {
      int witness = -1;
      for (int n = 0; n <= W && witness < 0; ++n)
        if (ideals[i].members.count(n) != ideals[j].members.count(n)) {
          RepIdealHandle Ji{ideals[i]}, Jj{ideals[j]};
          auto T = tilting_module(ell, n);
          if (Ji.contains(T) != Jj.contains(T)) witness = n;
        }
      rep.separation.emplace_back(static_cast<int>(i), static_cast<int>(j), witness);
      if (witness < 0)
        rep.failures.push_back("(b) no tilting witness separates " + ideals[i].to_string() + " and " + ideals[j].to_string());
    }
  for (std::size_t i = 0; i < ideals.size(); ++i)
    for (std::size_t j = 0; j < ideals.size(); ++j) {
      RepIdealHandle Jij{intersect(ideals[i], ideals[j])};
      for (std::size_t k = 0; k < pool.size(); ++k) {
        ++rep.intersection_checks;
        if (Jij.contains(cmins[k]) != (mem[i][k] && mem[j][k]))
          rep.failures.push_back("(c) intersection mismatch for " + pool[k].name + " on " + ideals[i].to_string() + " and " +
                                 ideals[j].to_string());
      }
      if (!std::includes(ideals[j].members.begin(), ideals[j].members.end(), ideals[i].members.begin(), ideals[i].members.end()))
        continue;
      for (std::size_t k = 0; k < pool.size(); ++k) {
        ++rep.minimality_checks;
        if (mem[i][k] && !mem[j][k])
          rep.failures.push_back("(d) " + pool[k].name + " lies in <" + ideals[i].to_string() + "> but not in <" +
                                 ideals[j].to_string() + ">");
      }
    }
  return rep;
}

/// Default pool: L, Delta, nabla, T for n <= max_n.
inline std::vector<NamedModule> standard_pool(int ell, int max_n) {
  std::vector<NamedModule> pool;
  for (const char* k : {"L", "delta", "nabla", "T"})
    for (int n = 0; n <= max_n; ++n) pool.push_back(named_module(ell, k, n));
  return pool;
}

}  // namespace tiltlab
