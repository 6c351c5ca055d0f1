/**
 * @file cmin.hpp
 * @brief Minimal tilting complexes C_min(M).
 *
 * Construction: a coresolution 0 -> M -> Q^0 -> ... -> Q^(k-1) -> C^k -> 0 by
 * tilting modules, stopped once C^k has a nabla-filtration; a left resolution
 * 0 -> P_r -> ... -> P_0 -> C^k -> 0 by tilting modules with nabla-filtered
 * kernels, stopped once the kernel is tilting; lifts phi_i : Q^i -> P_(k-1-i) of
 * the connecting map; totalisation of the resulting two-row double complex; and
 * finally Gaussian elimination.
 */
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

#include "tiltlab/serialize.hpp"

namespace tiltlab {

/// Raised when a search window or step cap is exhausted; carries the attempted bound.
class WindowError : public std::runtime_error {
 public:
  WindowError(const std::string& what, int bound) : std::runtime_error(what), bound_(bound) {}
  int bound() const { return bound_; }

 private:
  int bound_;
};

struct CminOptions {
  int window_doublings = 3;  // window slack 2(l-1) is doubled at most this many times
  int max_steps = 16;        // cap on coresolution and resolution lengths
};

namespace detail {

/// A direct sum of tilting modules with its canonical inclusions and projections.
struct TiltingSum {
  std::vector<int> labels;
  DirectSum sum;
};

inline TiltingSum make_tilting_sum(int ell, const std::vector<int>& labels) {
  std::vector<ModulePtr> parts;
  for (int n : labels) parts.push_back(tilting_module(ell, n));
  return {labels, direct_sum_of(CyclotomicField::get(ell), parts)};
}

/// Flattens a morphism into a column vector (entries of blocks over the source weights).
inline ExactMatrix flatten(const UMorphism& x) {
  const auto& S = *x.source();
  const auto& T = *x.target();
  int total = 0;
  for (const auto& [m, d] : S.weight_dims()) total += d * T.dim_at(m);
  ExactMatrix v(S.field(), total, 1);
  int pos = 0;
  for (const auto& [m, d] : S.weight_dims()) {
    int t = T.dim_at(m);
    if (t == 0) continue;
    auto it = x.blocks().find(m);
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < d; ++j, ++pos)
        if (it != x.blocks().end()) v(pos, 0) = it->second(i, j);
  }
  return v;
}

/**
 * Injective map C -> Q into a sum of tiltings, chosen greedily: candidate labels
 * mu ascend through [0, max weight + slack]; a Hom(C, T(mu)) basis element is
 * kept whenever it is nonzero on the common kernel of the maps kept so far.
 */
inline std::pair<TiltingSum, UMorphism> embed_into_tilting(const ModulePtr& C, const CminOptions& opt) {
  const int ell = C->ell();
  const auto* f = C->field();
  int slack = 2 * (ell - 1);
  int tried_up_to = -1;
  std::vector<int> labels;
  std::vector<UMorphism> maps;
  std::map<int, ExactMatrix> K;  // common kernel, per weight
  for (const auto& [m, d] : C->weight_dims()) K[m] = ExactMatrix::identity(f, d);
  auto kernel_dim = [&] {
    int s = 0;
    for (const auto& [m, b] : K) s += b.cols();
    return s;
  };
  for (int attempt = 0; attempt <= opt.window_doublings; ++attempt) {
    int bound = std::max(0, C->max_weight()) + slack;
    for (int mu = tried_up_to + 1; mu <= bound && kernel_dim() > 0; ++mu) {
      ModulePtr T = tilting_module(ell, mu);
      bool overlap = false;
      for (const auto& [m, b] : K)
        if (b.cols() && T->dim_at(m)) overlap = true;
      if (!overlap) continue;
      for (const auto& h : hom_space(C, T)) {
        bool useful = false;
        for (const auto& [m, b] : K)
          if (b.cols() && !(h.block(m) * b).is_zero()) useful = true;
        if (!useful) continue;
        labels.push_back(mu);
        maps.push_back(h);
        for (auto& [m, b] : K) {
          if (!b.cols()) continue;
          ExactMatrix hb = h.block(m) * b;
          if (hb.is_zero()) continue;
          b = b * hb.kernel();
        }
        if (kernel_dim() == 0) break;
      }
    }
    tried_up_to = std::max(tried_up_to, bound);
    if (kernel_dim() == 0) break;
    slack *= 2;
  }
  if (kernel_dim() > 0)
    throw WindowError("window too small: no embedding into tilting modules T(mu), mu <= " + std::to_string(tried_up_to),
                      tried_up_to);
  TiltingSum Q = make_tilting_sum(ell, labels);
  UMorphism iota(C, Q.sum.module);
  for (std::size_t k = 0; k < maps.size(); ++k) iota += Q.sum.inclusions[k] * maps[k];
  return {Q, iota};
}

/// Values at the highest weight vector of a Hom(Delta(lambda), X) basis, as columns of X_lambda.
inline ExactMatrix primitive_values(const ModulePtr& X, int lambda) {
  ModulePtr D = weyl_module(X->ell(), lambda);
  auto homs = hom_space(D, X);
  ExactMatrix v(X->field(), X->dim_at(lambda), 0);
  for (const auto& h : homs) v = ExactMatrix::hstack(v, h.block(lambda));
  return v;
}

/**
 * Surjection P -> X from a sum of tiltings such that every Hom(Delta(lambda), X)
 * lifts to P; for nabla-filtered X the kernel is then nabla-filtered as well.
 */
inline std::pair<TiltingSum, UMorphism> tilting_cover(const ModulePtr& X, const CminOptions& opt) {
  const int ell = X->ell();
  const auto* f = X->field();
  std::vector<int> labels;
  std::vector<UMorphism> maps;
  std::vector<int> lambdas;
  for (const auto& [m, d] : X->weight_dims())
    if (m >= 0) lambdas.push_back(m);
  std::sort(lambdas.rbegin(), lambdas.rend());
  auto covered_at = [&](int lambda) {
    ExactMatrix cov(f, X->dim_at(lambda), 0);
    for (std::size_t k = 0; k < maps.size(); ++k) {
      ExactMatrix pv = primitive_values(tilting_module(ell, labels[k]), lambda);
      if (pv.cols()) cov = ExactMatrix::hstack(cov, maps[k].block(lambda) * pv);
    }
    return cov;
  };
  for (int lambda : lambdas) {
    ExactMatrix want = primitive_values(X, lambda);
    if (want.cols() == 0) continue;
    ExactMatrix cov = covered_at(lambda);
    int target = want.rank();
    auto spans = [&](const ExactMatrix& c) { return c.cols() && c.rank() == ExactMatrix::hstack(c, want).rank(); };
    if (spans(cov)) continue;
    ModulePtr T = tilting_module(ell, lambda);
    for (const auto& g : hom_space(T, X)) {
      ExactMatrix val = g.block(lambda);  // T(lambda)_lambda is one-dimensional
      ExactMatrix ext = cov.cols() ? ExactMatrix::hstack(cov, val) : val;
      if (ext.rank() == (cov.cols() ? cov.rank() : 0)) continue;
      labels.push_back(lambda);
      maps.push_back(g);
      cov = ext;
      if (spans(cov)) break;
    }
    if (!spans(cov))
      throw std::logic_error("tilting_cover: primitive vectors of weight " + std::to_string(lambda) + " do not lift (target rank " +
                             std::to_string(target) + ")");
  }
  auto image_rank = [&] {
    int r = 0;
    for (const auto& [m, d] : X->weight_dims()) {
      ExactMatrix im(f, d, 0);
      for (const auto& g : maps)
        if (g.block(m).cols()) im = ExactMatrix::hstack(im, g.block(m));
      r += im.cols() ? im.rank() : 0;
    }
    return r;
  };
  if (image_rank() < X->dim()) {
    // top up surjectivity with further maps from tiltings in the window
    int bound = std::max(0, X->max_weight()) + 2 * (ell - 1) * (1 << opt.window_doublings);
    for (int mu = 0; mu <= bound && image_rank() < X->dim(); ++mu) {
      for (const auto& g : hom_space(tilting_module(ell, mu), X)) {
        int before = image_rank();
        labels.push_back(mu);
        maps.push_back(g);
        if (image_rank() == before) {
          labels.pop_back();
          maps.pop_back();
        }
        if (image_rank() == X->dim()) break;
      }
    }
    if (image_rank() < X->dim()) throw WindowError("window too small: no surjection from tilting modules", bound);
  }
  TiltingSum P = make_tilting_sum(ell, labels);
  UMorphism eps(P.sum.module, X);
  for (std::size_t k = 0; k < maps.size(); ++k) eps += maps[k] * P.sum.projections[k];
  return {P, eps};
}

/// Solves d o phi = target for phi : S -> P where S = sum T(a), P = sum T(b); phi built blockwise.
inline UMorphism lift_through(const TiltingSum& S, const TiltingSum& P, const UMorphism& d, const UMorphism& target) {
  const int ell = target.source()->ell();
  UMorphism phi(S.sum.module, P.sum.module);
  for (std::size_t a = 0; a < S.labels.size(); ++a) {
    UMorphism rhs = target * S.sum.inclusions[a];
    if (rhs.is_zero()) continue;
    std::vector<UMorphism> cands;
    ExactMatrix A(rhs.source()->field(), flatten(rhs).rows(), 0);
    for (std::size_t b = 0; b < P.labels.size(); ++b)
      for (const auto& h : standard_modules().tilting_hom(ell, S.labels[a], P.labels[b])) {
        UMorphism c = P.sum.inclusions[b] * h;
        cands.push_back(c);
        A = ExactMatrix::hstack(A, flatten(d * c));
      }
    auto sol = A.cols() ? A.solve(flatten(rhs)) : std::nullopt;
    if (!sol) throw std::logic_error("lift_through: no lift exists for summand T(" + std::to_string(S.labels[a]) + ")");
    UMorphism part(S.sum.module, P.sum.module);
    UMorphism local(tilting_module(ell, S.labels[a]), P.sum.module);
    for (std::size_t t = 0; t < cands.size(); ++t)
      if (!(*sol)(static_cast<int>(t), 0).is_zero()) local += cands[t].scaled((*sol)(static_cast<int>(t), 0));
    phi += local * S.sum.projections[a];
  }
  return phi;
}

}  // namespace detail

/// All intermediate data of the construction, exposed for inspection and tests.
struct TiltingConstruction {
  std::vector<detail::TiltingSum> Q;  // Q^0..Q^(k-1)
  std::vector<UMorphism> q;           // q^i : Q^i -> Q^(i+1), i < k-1
  ModulePtr Ck;                       // nabla-filtered module ending the coresolution
  std::vector<detail::TiltingSum> P;  // P_0..P_r
  std::vector<UMorphism> dP;          // dP[j] : P_(j+1) -> P_j
  std::vector<UMorphism> phi;         // phi[i] : Q^i -> P_(k-1-i)
  DoubleComplex grid;
  std::map<int, std::vector<int>> labels;  // total degree -> labels
};

/// Runs the coresolution / resolution / lifting steps and returns the double complex.
inline TiltingConstruction build_tilting_double_complex(const ModulePtr& M, const CminOptions& opt = {}) {
  TiltingConstruction tc;
  const int ell = M->ell();
  const auto* f = M->field();
  if (M->is_zero()) return tc;

  // (1) coresolution
  ModulePtr C = M;
  std::vector<UMorphism> iotas, pis;
  while (!peel_standard_filtration(C, FiltrationSide::Nabla).ok) {
    if (static_cast<int>(tc.Q.size()) >= opt.max_steps) throw WindowError("coresolution did not terminate", opt.max_steps);
    auto [Qi, iota] = detail::embed_into_tilting(C, opt);
    Quotient cok = cokernel_module(iota);
    tc.Q.push_back(Qi);
    iotas.push_back(iota);
    pis.push_back(cok.projection);
    C = cok.module;
  }
  const int k = static_cast<int>(tc.Q.size());
  for (int i = 0; i + 1 < k; ++i) tc.q.push_back(iotas[i + 1] * pis[i]);
  tc.Ck = C;

  // (2) left resolution of C^k
  UMorphism eps;
  if (!C->is_zero()) {
    ModulePtr X = C;
    UMorphism to_prev;  // kernel inclusion into the previous P
    while (true) {
      if (static_cast<int>(tc.P.size()) >= opt.max_steps) throw WindowError("tilting resolution did not terminate", opt.max_steps);
      if (!tc.P.empty() && peel_standard_filtration(X, FiltrationSide::Delta).ok) {
        // X is tilting: rewrite it as a sum of T's through a witnessed decomposition
        auto dec = decompose_tilting(X);
        std::vector<int> labels;
        for (const auto& p : dec.parts) labels.push_back(p.label);
        detail::TiltingSum S = detail::make_tilting_sum(ell, labels);
        UMorphism iso(S.sum.module, X);
        for (std::size_t t = 0; t < dec.parts.size(); ++t) iso += dec.parts[t].inclusion * S.sum.projections[t];
        tc.P.push_back(S);
        tc.dP.push_back(to_prev * iso);
        break;
      }
      auto [Pj, e] = detail::tilting_cover(X, opt);
      if (tc.P.empty()) eps = e;
      else tc.dP.push_back(to_prev * e);
      tc.P.push_back(Pj);
      Submodule K = kernel_module(e);
      if (K.module->is_zero()) break;
      X = K.module;
      to_prev = K.inclusion;
    }
  }

  // (3) lifts phi_(k-1), ..., phi_0
  tc.phi.assign(k, UMorphism());
  if (k > 0 && !tc.P.empty()) {
    tc.phi[k - 1] = detail::lift_through(tc.Q[k - 1], tc.P[0], eps, pis[k - 1]);
    for (int i = k - 2; i >= 0; --i) {
      int j = k - 1 - i;  // phi_i : Q^i -> P_j
      if (j >= static_cast<int>(tc.P.size())) {
        tc.phi[i] = UMorphism(tc.Q[i].sum.module, UModule::zero(f));
        continue;
      }
      tc.phi[i] = detail::lift_through(tc.Q[i], tc.P[j], tc.dP[j - 1], tc.phi[i + 1] * tc.q[i]);
    }
  }

  // (4) two-row double complex: row 0 holds Q^p at (p, 0); row 1 holds P_j at (k-1-j, 1)
  // total_complex orders each total degree by p, so P_(k-n) (at p = n-1) precedes Q^n
  for (std::size_t j = 0; j < tc.P.size(); ++j) {
    int p = k - 1 - static_cast<int>(j);
    tc.grid.nodes[{p, 1}] = tc.P[j].sum.module;
    tc.labels[p + 1] = tc.P[j].labels;
    if (j >= 1) tc.grid.horizontal[{p, 1}] = tc.dP[j - 1];
  }
  for (int p = 0; p < k; ++p) {
    tc.grid.nodes[{p, 0}] = tc.Q[p].sum.module;
    auto& l = tc.labels[p];
    l.insert(l.end(), tc.Q[p].labels.begin(), tc.Q[p].labels.end());
    if (p + 1 < k) tc.grid.horizontal[{p, 0}] = tc.q[p];
  }
  for (int p = 0; p < k; ++p) {
    int j = k - 1 - p;
    if (j < static_cast<int>(tc.P.size()) && !tc.phi[p].is_zero()) tc.grid.vertical[{p, 0}] = tc.phi[p];
  }
  return tc;
}

/// Bounded complex of tilting modules quasi-isomorphic to M (not yet minimal).
inline TiltingComplex tilting_complex_of(const ModulePtr& M, const CminOptions& opt = {}) {
  TiltingComplex out;
  out.ell = M->ell();
  if (M->is_zero()) return out;
  TiltingConstruction tc = build_tilting_double_complex(M, opt);
  ChainComplex tot = total_complex(tc.grid, M->field());
  return block_form(tot, M->ell(), tc.labels);
}

struct MinimalTiltingComplex {
  TiltingComplex complex;
  ModulePtr source;
};

/**
 * Process-wide C_min cache keyed by SHA-256 of the canonical module JSON. When the
 * TILTLAB_CACHE environment variable names a directory, results are also stored
 * there; unreadable entries are rebuilt with a warning on stderr.
 */
class CminCache {
 public:
  static CminCache& instance() {
    static CminCache c;
    return c;
  }

  std::optional<TiltingComplex> lookup(const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) return it->second;
    auto dir = directory();
    if (!dir) return std::nullopt;
    std::filesystem::path p = *dir / (key + ".json");
    if (!std::filesystem::exists(p)) return std::nullopt;
    try {
      std::ifstream in(p);
      json j = json::parse(in);
      TiltingComplex X = tilting_complex_from_json(j);
      memory_[key] = X;
      return X;
    } catch (const std::exception& e) {
      std::cerr << "warning: discarding corrupt cache entry " << p << ": " << e.what() << "\n";
      std::error_code ec;
      std::filesystem::remove(p, ec);
      return std::nullopt;
    }
  }

  void store(const std::string& key, const TiltingComplex& X) {
    std::lock_guard<std::mutex> lock(mutex_);
    memory_[key] = X;
    auto dir = directory();
    if (!dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    std::filesystem::path tmp = *dir / (key + ".json.tmp");
    {
      std::ofstream out(tmp);
      out << to_json(X).dump();
    }
    std::filesystem::rename(tmp, *dir / (key + ".json"), ec);
  }

  void clear_memory() {
    std::lock_guard<std::mutex> lock(mutex_);
    memory_.clear();
  }

  std::size_t hits() const { return hits_; }
  void count_hit() { ++hits_; }

 private:
  static std::optional<std::filesystem::path> directory() {
    const char* env = std::getenv("TILTLAB_CACHE");
    if (!env || !*env) return std::nullopt;
    return std::filesystem::path(env);
  }

  std::mutex mutex_;
  std::map<std::string, TiltingComplex> memory_;
  std::size_t hits_ = 0;
};

/// C_min(M) = minimalize(tilting_complex_of(M)), cached by module fingerprint.
inline MinimalTiltingComplex minimal_tilting_complex(const ModulePtr& M, const CminOptions& opt = {}) {
  std::string key = std::to_string(M->ell()) + "-" + fingerprint(*M);
  auto& cache = CminCache::instance();
  if (auto hit = cache.lookup(key)) {
    cache.count_hit();
    return {*hit, M};
  }
  TiltingComplex X = minimalize(tilting_complex_of(M, opt)).complex;
  cache.store(key, X);
  return {X, M};
}

struct FiltrationDimensions {
  int gfd = 0;
  int wfd = 0;
};

/// gfd = top degree of C_min(M), wfd = minus its bottom degree.
inline FiltrationDimensions filtration_dimensions(const TiltingComplex& C) {
  if (C.is_zero()) return {0, 0};
  return {C.max_degree(), -C.min_degree()};
}

inline FiltrationDimensions filtration_dimensions(const ModulePtr& M) {
  return filtration_dimensions(minimal_tilting_complex(M).complex);
}

}  // namespace tiltlab
