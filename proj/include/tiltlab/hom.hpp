/**
 * @file hom.hpp
 * @brief Hom spaces between weight-graded modules and isomorphism search.
 */
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "tiltlab/umodule.hpp"

namespace tiltlab {

/// Basis of Hom_U(M, N): weight-preserving maps commuting with E, F, E^(l), F^(l).
inline std::vector<UMorphism> hom_space(const ModulePtr& M, const ModulePtr& N) {
  if (M->field() != N->field()) throw ArithmeticError("hom_space: mismatched l");
  const auto* f = M->field();
  const int l = M->ell();
  std::map<int, int> base;
  int nvars = 0;
  for (const auto& [m, dm] : M->weight_dims()) {
    int dn = N->dim_at(m);
    if (dn == 0) continue;
    base[m] = nvars;
    nvars += dm * dn;
  }
  std::vector<UMorphism> out;
  if (nvars == 0) return out;

  SparseEliminator elim(f, nvars);
  for (Gen g : kGenerators) {
    int s = gen_shift(g, l);
    for (const auto& [m, dm] : M->weight_dims()) {
      int t = m + s;
      int dnt = N->dim_at(t);
      if (dnt == 0) continue;
      const ExactMatrix* ng = base.count(m) ? N->action_ptr(g, m) : nullptr;
      const ExactMatrix* mg = base.count(t) ? M->action_ptr(g, m) : nullptr;
      if (!ng && !mg) continue;
      int dnm = N->dim_at(m);
      int dmt = M->dim_at(t);
      for (int p = 0; p < dnt; ++p) {
        for (int q = 0; q < dm; ++q) {
          SparseEliminator::Row row;
          if (ng)
            for (int i = 0; i < dnm; ++i) {
              const Cyclo& c = (*ng)(p, i);
              if (!c.is_zero()) row.emplace_back(base[m] + i * dm + q, c);
            }
          if (mg)
            for (int j = 0; j < dmt; ++j) {
              const Cyclo& c = (*mg)(j, q);
              if (!c.is_zero()) row.emplace_back(base[t] + p * dmt + j, -c);
            }
          if (!row.empty()) elim.add_row(std::move(row));
        }
      }
    }
  }
  for (const auto& v : elim.kernel()) {
    GradedMatrix blocks;
    for (const auto& [m, b0] : base) {
      int dm = M->dim_at(m), dn = N->dim_at(m);
      ExactMatrix X(f, dn, dm);
      for (int i = 0; i < dn; ++i)
        for (int j = 0; j < dm; ++j) X(i, j) = v[b0 + i * dm + j];
      blocks[m] = std::move(X);
    }
    out.emplace_back(M, N, std::move(blocks));
  }
  return out;
}

inline int hom_dimension(const ModulePtr& M, const ModulePtr& N) { return static_cast<int>(hom_space(M, N).size()); }

/// Linear combination sum c_i * basis_i with integer coefficients.
inline UMorphism combine(const ModulePtr& M, const ModulePtr& N, const std::vector<UMorphism>& basis,
                         const std::vector<long>& coeffs) {
  UMorphism acc(M, N);
  for (std::size_t i = 0; i < basis.size() && i < coeffs.size(); ++i)
    if (coeffs[i] != 0) acc += basis[i].scaled(Cyclo(M->field(), coeffs[i]));
  return acc;
}

/// Finds an isomorphism M -> N if one exists, by testing random combinations of a Hom basis.
/// A generic combination of the Hom basis is invertible whenever any element is, so a
/// handful of attempts with distinct seeds suffices in practice.
inline std::optional<UMorphism> find_isomorphism(const ModulePtr& M, const ModulePtr& N, int attempts = 8,
                                                 unsigned seed = 12345) {
  if (M->weight_dims() != N->weight_dims()) return std::nullopt;
  if (M->dim() == 0) return UMorphism(M, N);
  auto basis = hom_space(M, N);
  if (basis.empty()) return std::nullopt;
  std::mt19937 rng(seed);
  std::uniform_int_distribution<long> dist(-9, 9);
  for (int a = 0; a < attempts; ++a) {
    std::vector<long> c(basis.size());
    for (auto& x : c) x = dist(rng);
    if (a == 0)
      for (auto& x : c) x = 1;
    UMorphism phi = combine(M, N, basis, c);
    if (phi.is_isomorphism()) return phi;
  }
  return std::nullopt;
}

inline bool are_isomorphic(const ModulePtr& M, const ModulePtr& N) { return find_isomorphism(M, N).has_value(); }

/// Endomorphism algebra basis of M.
inline std::vector<UMorphism> end_algebra(const ModulePtr& M) { return hom_space(M, M); }

}  // namespace tiltlab
