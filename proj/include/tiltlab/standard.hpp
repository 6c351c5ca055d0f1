/**
 * @file standard.hpp
 * @brief Weyl, dual Weyl, simple and indecomposable tilting modules; decomposition
 *        into indecomposables with witness morphisms; standard-filtration peeling.
 */
#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tiltlab/hom.hpp"

namespace tiltlab {

// ---------------------------------------------------------------------------
// Characters of tilting modules

/// Largest wall k*l - 1 strictly below n (or -1 if none).
inline int wall_below(int n, int ell) {
  int w = ((n + 1) / ell) * ell - 1;
  if (w >= n) w -= ell;
  return w;
}

/// Character of T(n): chi(n) on walls and below l, otherwise chi(n) + chi(n') with
/// n' the mirror image of n in the wall below it.
inline Character tilting_character(int n, int ell) {
  if (n < 0) throw std::invalid_argument("tilting_character: negative weight");
  if (n < ell || (n + 1) % ell == 0) return Character::weyl(n);
  int w = wall_below(n, ell);
  return Character::weyl(n) + Character::weyl(2 * w - n);
}

/// Tilting multiplicities of a character, peeling from the top. Returns nullopt if
/// the character is not a nonnegative combination of tilting characters.
inline std::optional<std::map<int, int>> tilting_labels_from_character(Character c, int ell) {
  std::map<int, int> out;
  while (!c.is_zero()) {
    int top = c.max_weight();
    long long m = c[top];
    if (top < 0 || m <= 0) return std::nullopt;
    out[top] += static_cast<int>(m);
    c -= tilting_character(top, ell).scaled(m);
  }
  return out;
}

/// Weyl-filtration multiplicities of a character; nullopt when some coefficient is negative.
inline std::optional<std::map<int, int>> weyl_multiplicities(const Character& c) {
  std::map<int, int> out;
  for (const auto& [w, m] : c.weyl_coordinates()) {
    if (m < 0) return std::nullopt;
    if (m > 0) out[w] = static_cast<int>(m);
  }
  Character back;
  for (const auto& [w, m] : out) back += Character::weyl(w).scaled(m);
  if (back != c) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------
// Constructors

/// Delta(n) with basis m_0..m_n, F^(r) m_i = [i+r choose r] m_(i+r), E^(r) m_i = [n-i+r choose r] m_(i-r).
inline ModulePtr build_weyl_module(const CyclotomicField* f, int n) {
  if (n < 0) throw std::invalid_argument("weyl_module: n must be >= 0");
  const int l = f->ell();
  std::map<int, int> dims;
  for (int i = 0; i <= n; ++i) dims[n - 2 * i] = 1;
  std::array<UModule::Blocks, 4> acts;
  auto one_by_one = [&](const Cyclo& c) {
    ExactMatrix m(f, 1, 1);
    m(0, 0) = c;
    return m;
  };
  for (int i = 0; i <= n; ++i) {
    int w = n - 2 * i;
    if (i + 1 <= n) acts[1][w] = one_by_one(quantum_binomial(i + 1, 1, f));
    if (i - 1 >= 0) acts[0][w] = one_by_one(quantum_binomial(n - i + 1, 1, f));
    if (i + l <= n) acts[3][w] = one_by_one(quantum_binomial(i + l, l, f));
    if (i - l >= 0) acts[2][w] = one_by_one(quantum_binomial(n - i + l, l, f));
  }
  return make_module(f, std::move(dims), std::move(acts));
}

struct Summand {
  int label = -1;           // n for a summand isomorphic to T(n), -1 otherwise
  std::string description;  // "T(n)" or a note on a non-tilting part
  ModulePtr module;
  UMorphism inclusion;   // module -> M
  UMorphism projection;  // M -> module
};

struct DecompositionResult {
  std::vector<Summand> parts;
  std::string status = "ok";  // "ok" or "non-split/undetermined"

  std::map<int, int> tilting_multiplicities() const {
    std::map<int, int> out;
    for (const auto& p : parts)
      if (p.label >= 0) out[p.label] += 1;
    return out;
  }
  bool all_tilting() const {
    for (const auto& p : parts)
      if (p.label < 0) return false;
    return true;
  }
};

class StandardModules;
inline StandardModules& standard_modules();

inline DecompositionResult decompose_indecomposables(const ModulePtr& M, const std::optional<std::map<int, int>>& expected = {},
                                              int max_label = INT_MAX);

/**
 * Memoised constructors for Delta(n), nabla(n), L(n), T(n) and Hom(T(a), T(b)),
 * keyed by (l, kind, n). A single recursive mutex protects the tables.
 */
class StandardModules {
 public:
  ModulePtr weyl(int ell, int n) {
    return get(ell, 'D', n, [&] { return build_weyl_module(CyclotomicField::get(ell), n); });
  }
  ModulePtr dual_weyl(int ell, int n) {
    return get(ell, 'N', n, [&] { return dual_module(*weyl(ell, n)); });
  }
  ModulePtr simple(int ell, int n) {
    return get(ell, 'L', n, [&] {
      auto basis = hom_space(weyl(ell, n), dual_weyl(ell, n));
      if (basis.size() != 1) throw std::logic_error("Hom(Delta(n), nabla(n)) is not one-dimensional");
      return image_module(basis[0]).module;
    });
  }
  ModulePtr tilting(int ell, int n) {
    if (n < 0) throw std::invalid_argument("tilting_module: n must be >= 0");
    return get(ell, 'T', n, [&]() -> ModulePtr {
      if (n <= 1) return weyl(ell, n);
      ModulePtr prod = tensor_module(*tilting(ell, n - 1), *tilting(ell, 1));
      auto expected = tilting_labels_from_character(prod->character(), ell);
      if (!expected || expected->count(n) != 1 || expected->at(n) != 1)
        throw std::logic_error("unexpected character of T(n-1) (x) T(1)");
      expected->erase(n);
      // Peel the known smaller tiltings; the remainder is T(n).
      auto dec = decompose_indecomposables(prod, *expected, n - 1);
      ModulePtr rest;
      for (const auto& p : dec.parts)
        if (p.label < 0 || p.label == n) rest = p.module;
      if (!rest || rest->character() != tilting_character(n, ell))
        throw std::logic_error("tilting recursion left an unexpected remainder for n=" + std::to_string(n));
      return rest;
    });
  }

  /// Cached basis of Hom(T(a), T(b)).
  const std::vector<UMorphism>& tilting_hom(int ell, int a, int b) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto key = std::make_tuple(ell, a, b);
    auto it = homs_.find(key);
    if (it != homs_.end()) return it->second;
    auto basis = hom_space(tilting(ell, a), tilting(ell, b));
    return homs_.emplace(key, std::move(basis)).first->second;
  }

  void clear() {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    modules_.clear();
    homs_.clear();
  }

 private:
  template <class Fn>
  ModulePtr get(int ell, char kind, int n, Fn&& build) {
    std::lock_guard<std::recursive_mutex> lock(mutex_);
    auto key = std::make_tuple(ell, kind, n);
    auto it = modules_.find(key);
    if (it != modules_.end()) return it->second;
    ModulePtr m = build();
    modules_[key] = m;
    return m;
  }

  std::recursive_mutex mutex_;
  std::map<std::tuple<int, char, int>, ModulePtr> modules_;
  std::map<std::tuple<int, int, int>, std::vector<UMorphism>> homs_;
};

inline StandardModules& standard_modules() {
  static StandardModules instance;
  return instance;
}

inline ModulePtr weyl_module(int ell, int n) { return standard_modules().weyl(ell, n); }
inline ModulePtr dual_weyl_module(int ell, int n) { return standard_modules().dual_weyl(ell, n); }
inline ModulePtr simple_module(int ell, int n) { return standard_modules().simple(ell, n); }
inline ModulePtr tilting_module(int ell, int n) { return standard_modules().tilting(ell, n); }

// ---------------------------------------------------------------------------
// Decomposition

namespace detail {

/// Coordinates of a map into a submodule: solves incl * X = phi blockwise.
inline UMorphism corestrict(const UMorphism& phi, const Submodule& S) {
  GradedMatrix out;
  for (const auto& [m, b] : phi.blocks()) {
    auto x = S.inclusion.block(m).solve(b);
    if (!x) throw std::logic_error("corestrict: map does not land in the submodule");
    out[m] = *x;
  }
  return UMorphism(phi.source(), S.module, std::move(out));
}

struct Piece {
  ModulePtr module;
  UMorphism inclusion;   // piece -> M
  UMorphism projection;  // M -> piece
};

/// Splits off all summands isomorphic to T(mu) from the piece R using the pairing
/// Hom(T(mu), R) x Hom(R, T(mu)) -> End(T(mu)) -> End(T(mu))_mu. Returns the number of copies.
inline int peel_tilting(Piece& R, int mu, std::vector<Summand>& out) {
  const int ell = R.module->ell();
  const auto* f = R.module->field();
  if (R.module->dim_at(mu) == 0) return 0;
  ModulePtr T = tilting_module(ell, mu);
  auto Fs = hom_space(T, R.module);
  if (Fs.empty()) return 0;
  auto Gs = hom_space(R.module, T);
  if (Gs.empty()) return 0;
  // pairing[j][i] = scalar of G_j o F_i on the one-dimensional space T(mu)_mu
  ExactMatrix pairing(f, static_cast<int>(Gs.size()), static_cast<int>(Fs.size()));
  for (std::size_t j = 0; j < Gs.size(); ++j)
    for (std::size_t i = 0; i < Fs.size(); ++i)
      pairing(static_cast<int>(j), static_cast<int>(i)) = (Gs[j].block(mu) * Fs[i].block(mu))(0, 0);
  std::vector<int> cols;
  pairing.rref(&cols);
  const int r = static_cast<int>(cols.size());
  if (r == 0) return 0;
  std::vector<int> rows;
  pairing.select_columns(cols).transpose().rref(&rows);

  std::vector<ModulePtr> copies(r, T);
  DirectSum Tr = direct_sum_of(f, copies);
  UMorphism Fp(Tr.module, R.module), Gp(R.module, Tr.module);
  for (int k = 0; k < r; ++k) {
    Fp += Fs[cols[k]] * Tr.projections[k];
    Gp += Tr.inclusions[k] * Gs[rows[k]];
  }
  auto inv = (Gp * Fp).inverse();
  if (!inv) throw std::logic_error("pairing minor invertible but composite is not");
  UMorphism P = *inv * Gp;  // R -> T^r with P o Fp = id
  for (int k = 0; k < r; ++k) {
    Summand s;
    s.label = mu;
    s.description = "T(" + std::to_string(mu) + ")";
    s.module = T;
    s.inclusion = R.inclusion * Fs[cols[k]];
    s.projection = Tr.projections[k] * P * R.projection;
    out.push_back(std::move(s));
  }
  // complement = ker P, with retraction 1 - Fp o P
  Submodule K = kernel_module(P);
  UMorphism retract = UMorphism::identity(R.module) - Fp * P;
  UMorphism toK = corestrict(retract, K);
  R = Piece{K.module, R.inclusion * K.inclusion, toK * R.projection};
  return r;
}

/// Structure constants of an algebra given by a basis of End(M): returns L_a matrices.
inline std::vector<ExactMatrix> left_regular(const std::vector<UMorphism>& basis) {
  const std::size_t k = basis.size();
  std::vector<ExactMatrix> L;
  if (k == 0) return L;
  const auto* f = basis[0].source()->field();
  // flatten each basis element into a column
  std::vector<std::pair<int, int>> layout;
  for (const auto& [m, d] : basis[0].source()->weight_dims()) layout.emplace_back(m, d);
  auto flatten = [&](const UMorphism& x) {
    int total = 0;
    for (auto [m, d] : layout) total += d * d;
    ExactMatrix v(f, total, 1);
    int pos = 0;
    for (auto [m, d] : layout) {
      ExactMatrix b = x.block(m);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v(pos++, 0) = b(i, j);
    }
    return v;
  };
  ExactMatrix B(f, 0, 0);
  for (std::size_t i = 0; i < k; ++i) B = (i == 0) ? flatten(basis[i]) : ExactMatrix::hstack(B, flatten(basis[i]));
  for (std::size_t a = 0; a < k; ++a) {
    ExactMatrix La(f, static_cast<int>(k), static_cast<int>(k));
    ExactMatrix rhs(f, B.rows(), static_cast<int>(k));
    for (std::size_t b = 0; b < k; ++b) rhs.set_block(0, static_cast<int>(b), flatten(basis[a] * basis[b]));
    auto x = B.solve(rhs);
    if (!x) throw std::logic_error("End(M) basis is not closed under composition");
    L.push_back(*x);
  }
  return L;
}

/// Dimension of the radical of the trace form of the left regular representation.
inline int radical_dimension(const std::vector<ExactMatrix>& L) {
  const std::size_t k = L.size();
  if (k == 0) return 0;
  ExactMatrix G(L[0].field(), static_cast<int>(k), static_cast<int>(k));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      Cyclo t = (L[a] * L[b]).trace();
      G(static_cast<int>(a), static_cast<int>(b)) = t;
      G(static_cast<int>(b), static_cast<int>(a)) = t;
    }
  return static_cast<int>(k) - G.rank();
}

inline bool is_nilpotent(const UMorphism& x) {
  UMorphism p = x;
  for (int i = 1; i < x.source()->dim() && !p.is_zero(); i *= 2) p = p * p;
  return p.is_zero();
}

/// Fitting decomposition M = im x^N (+) ker x^N for a non-nilpotent, non-invertible x.
inline std::optional<std::pair<GradedSubspace, GradedSubspace>> fitting_split(const UMorphism& x) {
  if (x.is_isomorphism() || is_nilpotent(x)) return std::nullopt;
  UMorphism p = x;
  for (int i = 1; i < x.source()->dim(); i *= 2) p = p * p;
  return std::make_pair(image_subspace(p), kernel_subspace(p));
}

/// Splits a piece with local-or-not endomorphism algebra; appends indecomposable parts.
inline bool split_by_endomorphisms(const Piece& R, std::vector<Summand>& out, int depth = 0) {
  if (R.module->is_zero()) return true;
  auto basis = end_algebra(R.module);
  auto L = left_regular(basis);
  int rad = radical_dimension(L);
  int semisimple_dim = static_cast<int>(basis.size()) - rad;
  if (semisimple_dim == 1) {
    Summand s;
    s.label = -1;
    s.description = "indecomposable (dim " + std::to_string(R.module->dim()) + ")";
    s.module = R.module;
    s.inclusion = R.inclusion;
    s.projection = R.projection;
    out.push_back(std::move(s));
    return true;
  }
  // candidate splitting elements
  std::vector<UMorphism> cands = basis;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      cands.push_back(basis[i] + basis[j]);
      cands.push_back(basis[i] - basis[j]);
      cands.push_back(basis[i] * basis[j]);
    }
  std::vector<UMorphism> shifted;
  for (const auto& x : cands)
    for (const auto& [m, d] : R.module->weight_dims()) {
      ExactMatrix b = x.block(m);
      for (int i = 0; i < d; ++i) {
        Cyclo c = b(i, i);
        if (c.is_zero()) continue;
        shifted.push_back(x - UMorphism::identity(R.module).scaled(c));
      }
      if (shifted.size() > 4 * cands.size()) break;
    }
  cands.insert(cands.end(), shifted.begin(), shifted.end());
  for (const auto& x : cands) {
    auto split = fitting_split(x);
    if (!split) continue;
    Submodule A = make_submodule(R.module, split->first);
    Submodule B = make_submodule(R.module, split->second);
    // projections via coordinates in the basis [A | B]
    GradedMatrix pa, pb;
    for (const auto& [m, d] : R.module->weight_dims()) {
      ExactMatrix ia = A.inclusion.block(m), ib = B.inclusion.block(m);
      ExactMatrix both = ExactMatrix::hstack(ia, ib);
      auto inv = both.inverse();
      if (!inv) throw std::logic_error("Fitting decomposition is not direct");
      if (ia.cols()) pa[m] = inv->block(0, 0, ia.cols(), d);
      if (ib.cols()) pb[m] = inv->block(ia.cols(), 0, ib.cols(), d);
    }
    Piece PA{A.module, R.inclusion * A.inclusion, UMorphism(R.module, A.module, std::move(pa)) * R.projection};
    Piece PB{B.module, R.inclusion * B.inclusion, UMorphism(R.module, B.module, std::move(pb)) * R.projection};
    bool ok = split_by_endomorphisms(PA, out, depth + 1);
    return split_by_endomorphisms(PB, out, depth + 1) && ok;
  }
  Summand s;
  s.label = -1;
  s.description = "non-split/undetermined (dim End/rad = " + std::to_string(semisimple_dim) + ")";
  s.module = R.module;
  s.inclusion = R.inclusion;
  s.projection = R.projection;
  out.push_back(std::move(s));
  return false;
}

}  // namespace detail

/**
 * Krull-Schmidt decomposition with witnesses. Tilting summands are split off by
 * the pairing-rank test, trying labels in `expected` (with the given
 * multiplicities) or else every dominant weight of M up to `max_label`, from the
 * top. Whatever remains is split by the endomorphism-algebra fallback.
 */
inline DecompositionResult decompose_indecomposables(const ModulePtr& M, const std::optional<std::map<int, int>>& expected,
                                                     int max_label) {
  DecompositionResult res;
  detail::Piece R{M, UMorphism::identity(M), UMorphism::identity(M)};
  if (expected) {
    for (auto it = expected->rbegin(); it != expected->rend(); ++it) {
      int got = detail::peel_tilting(R, it->first, res.parts);
      if (got != it->second)
        throw std::logic_error("decompose: expected " + std::to_string(it->second) + " copies of T(" +
                               std::to_string(it->first) + "), found " + std::to_string(got));
    }
  } else {
    std::vector<int> mus;
    for (const auto& [m, d] : M->weight_dims())
      if (m >= 0 && m <= max_label) mus.push_back(m);
    std::sort(mus.rbegin(), mus.rend());
    for (int mu : mus) {
      if (R.module->is_zero()) break;
      detail::peel_tilting(R, mu, res.parts);
    }
  }
  if (!R.module->is_zero()) {
    if (!detail::split_by_endomorphisms(R, res.parts)) res.status = "non-split/undetermined";
  }
  return res;
}

/// Decomposition of a module known to be tilting: labels from the character, witnesses by peeling.
inline DecompositionResult decompose_tilting(const ModulePtr& M) {
  auto labels = tilting_labels_from_character(M->character(), M->ell());
  if (!labels) throw std::invalid_argument("decompose_tilting: character is not a tilting character");
  return decompose_indecomposables(M, labels);
}

// ---------------------------------------------------------------------------
// Standard filtrations

enum class FiltrationSide { Delta, Nabla };

struct PeelResult {
  bool ok = false;
  std::vector<int> weights;  // peel order (maximal weight first)
  std::string reason;
};

/// Delta-side: repeatedly embed Delta(mu)^d for the maximal weight mu and pass to the quotient.
/// Nabla-side: the Delta-peel of the dual module.
inline PeelResult peel_standard_filtration(const ModulePtr& M, FiltrationSide side) {
  PeelResult res;
  ModulePtr R = side == FiltrationSide::Delta ? M : dual_module(*M);
  const int ell = M->ell();
  while (!R->is_zero()) {
    int mu = R->max_weight();
    if (mu < 0) {
      res.reason = "maximal weight " + std::to_string(mu) + " is not dominant";
      return res;
    }
    int d = R->dim_at(mu);
    ModulePtr D = weyl_module(ell, mu);
    auto homs = hom_space(D, R);
    // values at the highest weight vector m_0
    ExactMatrix vals(R->field(), d, static_cast<int>(homs.size()));
    for (std::size_t i = 0; i < homs.size(); ++i) vals.set_block(0, static_cast<int>(i), homs[i].block(mu));
    std::vector<int> piv;
    vals.rref(&piv);
    if (static_cast<int>(piv.size()) < d) {
      res.reason = "weight " + std::to_string(mu) + " is not spanned by images of Delta(" + std::to_string(mu) + ")";
      return res;
    }
    std::vector<ModulePtr> copies(d, D);
    DirectSum Dd = direct_sum_of(R->field(), copies);
    UMorphism emb(Dd.module, R);
    for (int k = 0; k < d; ++k) emb += homs[piv[k]] * Dd.projections[k];
    if (!emb.is_injective()) {
      res.reason = "Delta(" + std::to_string(mu) + ")^" + std::to_string(d) + " does not embed";
      return res;
    }
    for (int k = 0; k < d; ++k) res.weights.push_back(mu);
    R = quotient_module(R, emb).module;
  }
  res.ok = true;
  return res;
}

inline bool is_tilting(const ModulePtr& M) {
  return peel_standard_filtration(M, FiltrationSide::Delta).ok && peel_standard_filtration(M, FiltrationSide::Nabla).ok;
}

}  // namespace tiltlab
