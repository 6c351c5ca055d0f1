/**
 * @file sampling.hpp
 * @brief Named standard modules and seeded samplers for module pairs and short exact sequences.
 */
#pragma once

#include <random>
#include <string>

#include "tiltlab/cmin.hpp"

namespace tiltlab {

struct NamedModule {
  std::string name;
  ModulePtr module;
};

/// kind is one of L, delta, nabla, T (case-insensitive; "Delta"/"D" and "nabla"/"N" also accepted).
inline NamedModule named_module(int ell, const std::string& kind, int n) {
  if (n < 0) throw std::invalid_argument("highest weight must be non-negative");
  std::string k;
  for (char c : kind) k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (k == "l") return {"L(" + std::to_string(n) + ")", simple_module(ell, n)};
  if (k == "delta" || k == "d") return {"Delta(" + std::to_string(n) + ")", weyl_module(ell, n)};
  if (k == "nabla" || k == "n") return {"nabla(" + std::to_string(n) + ")", dual_weyl_module(ell, n)};
  if (k == "t") return {"T(" + std::to_string(n) + ")", tilting_module(ell, n)};
  throw std::invalid_argument("unknown module kind '" + kind + "' (expected L, delta, nabla or T)");
}

/// Parses "kind:n", e.g. "L:3".
inline NamedModule parse_module_spec(int ell, const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("module spec must look like kind:n, got '" + spec + "'");
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("module spec '" + spec + "' has a malformed highest weight");
  }
  return named_module(ell, spec.substr(0, colon), n);
}

/// Uniform pick from [lo, hi] built on raw engine output, so that sequences do not depend on
/// the standard library's distribution implementations.
inline int pick(std::mt19937_64& rng, int lo, int hi) {
  auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

inline NamedModule random_standard_module(std::mt19937_64& rng, int ell, int max_n, const std::vector<std::string>& kinds) {
  const std::string& k = kinds[pick(rng, 0, static_cast<int>(kinds.size()) - 1)];
  return named_module(ell, k, pick(rng, 0, max_n));
}

/// A short exact sequence 0 -> A -> B -> C -> 0 with explicit maps.
struct SampledSES {
  int id = 0;
  std::string description;
  ModulePtr A, B, C;
  UMorphism inclusion;   // A -> B
  UMorphism projection;  // B -> C

  bool is_exact() const {
    if (!inclusion.is_injective() || !projection.is_surjective()) return false;
    if (!(projection * inclusion).is_zero()) return false;
    return A->dim() + C->dim() == B->dim();
  }
};

/// Random vector in the weight-m space of M, embedded in the global basis, coordinates in {-2,-1,-1/2,0,1/2,1,2}.
inline ExactMatrix random_weight_vector(std::mt19937_64& rng, const UModule& M, int m) {
  const auto* f = M.field();
  ExactMatrix v(f, M.dim(), 1);
  static const mpq_class choices[] = {mpq_class(-2), mpq_class(-1), mpq_class(-1, 2), mpq_class(0),
                                      mpq_class(1, 2), mpq_class(1), mpq_class(2)};
  bool nonzero = false;
  while (!nonzero) {
    for (int i = 0; i < M.dim_at(m); ++i) {
      const mpq_class& c = choices[pick(rng, 0, 6)];
      v(M.offset(m) + i, 0) = Cyclo(f, c);
      if (c != 0) nonzero = true;
    }
  }
  return v;
}

struct SesSamplerOptions {
  int max_factor_weight = 4;  // highest weight of each tensor factor
  int max_total_weight = 6;   // bound on the sum of the two highest weights
  int max_generators = 2;
  std::vector<std::string> kinds = {"delta", "L", "T"};
};

/**
 * Samples SES by taking B = X(a) (x) Y(b) for random X, Y among the chosen kinds, generating a
 * proper nonzero submodule A from random weight vectors, and setting C = B/A.
 */
inline std::vector<SampledSES> sample_ses(int ell, int count, std::uint64_t seed, const SesSamplerOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::vector<SampledSES> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 50 * count + 100) throw std::runtime_error("sample_ses: could not find enough proper submodules");
    NamedModule X = random_standard_module(rng, ell, opt.max_factor_weight, opt.kinds);
    NamedModule Y = random_standard_module(rng, ell, std::min(opt.max_factor_weight, opt.max_total_weight - X.module->max_weight()),
                                           opt.kinds);
    ModulePtr B = tensor_module(*X.module, *Y.module);
    std::vector<int> weights;
    for (const auto& [m, d] : B->weight_dims()) weights.push_back(m);
    int g = pick(rng, 1, opt.max_generators);
    std::vector<ExactMatrix> gens;
    std::string gdesc;
    for (int t = 0; t < g; ++t) {
      int m = weights[pick(rng, 0, static_cast<int>(weights.size()) - 1)];
      gens.push_back(random_weight_vector(rng, *B, m));
      gdesc += (t ? "," : "") + std::to_string(m);
    }
    Submodule A = submodule_generated(B, gens);
    if (A.module->is_zero() || A.module->dim() == B->dim()) continue;
    Quotient C = quotient_module(B, A.inclusion);
    SampledSES s;
    s.id = static_cast<int>(out.size());
    s.description = X.name + "(x)" + Y.name + " / <weight vectors at " + gdesc + ">";
    s.A = A.module;
    s.B = B;
    s.C = C.module;
    s.inclusion = A.inclusion;
    s.projection = C.projection;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace tiltlab
