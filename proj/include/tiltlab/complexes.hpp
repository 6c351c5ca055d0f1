/**
 * @file complexes.hpp
 * @brief Bounded cochain complexes of modules, totalisation, tensor products of
 *        complexes, and complexes of tilting modules in block form together with
 *        Gaussian elimination down to a minimal complex.
 *
 * Differentials raise degree: d_i : X_i -> X_(i+1).
 */
#pragma once

#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "tiltlab/standard.hpp"

namespace tiltlab {

class ChainComplex {
 public:
  explicit ChainComplex(const CyclotomicField* f = nullptr) : field_(f) {}

  const CyclotomicField* field() const { return field_; }

  void set_term(int i, ModulePtr M) {
    if (!field_) field_ = M->field();
    if (M->is_zero()) terms_.erase(i);
    else terms_[i] = std::move(M);
  }
  void set_differential(int i, UMorphism d) {
    if (d.is_zero()) differentials_.erase(i);
    else differentials_[i] = std::move(d);
  }

  ModulePtr term(int i) const {
    auto it = terms_.find(i);
    if (it != terms_.end()) return it->second;
    return zero_module();
  }
  UMorphism differential(int i) const {
    auto it = differentials_.find(i);
    if (it != differentials_.end()) return it->second;
    return UMorphism(term(i), term(i + 1));
  }
  const std::map<int, ModulePtr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int min_degree() const { return terms_.empty() ? 0 : terms_.begin()->first; }
  int max_degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  /// d_(i+1) o d_i = 0 for all i.
  bool d_squared_zero() const {
    for (const auto& [i, d] : differentials_) {
      auto it = differentials_.find(i + 1);
      if (it == differentials_.end()) continue;
      if (!(it->second * d).is_zero()) return false;
    }
    return true;
  }

  /// Character of H^i computed weight by weight from ranks of the differentials.
  Character cohomology_character(int i) const {
    Character c;
    ModulePtr X = term(i);
    UMorphism din = differential(i - 1), dout = differential(i);
    for (const auto& [m, d] : X->weight_dims()) {
      int ker = d - dout.block(m).rank();
      int im = din.block(m).rank();
      c.add(m, ker - im);
    }
    return c;
  }

  std::map<int, Character> cohomology_characters() const {
    std::map<int, Character> out;
    for (const auto& [i, M] : terms_) {
      Character c = cohomology_character(i);
      if (!c.is_zero()) out[i] = c;
    }
    return out;
  }

  /// H^i = ker d_i / im d_(i-1) with its induced module structure.
  ModulePtr cohomology(int i) const {
    Submodule K = kernel_module(differential(i));
    UMorphism din = differential(i - 1);
    std::map<int, ExactMatrix> cols;
    for (const auto& [m, b] : din.blocks()) {
      auto x = K.inclusion.block(m).solve(b);
      if (!x) throw std::logic_error("cohomology: d o d != 0");
      cols[m] = *x;
    }
    return make_quotient(K.module, subspace_from_columns(cols)).module;
  }

  std::map<int, ModulePtr> cohomology() const {
    std::map<int, ModulePtr> out;
    for (const auto& [i, M] : terms_) {
      ModulePtr H = cohomology(i);
      if (!H->is_zero()) out[i] = H;
    }
    return out;
  }

  /// Alternating sum of term characters.
  Character euler_character() const {
    Character c;
    for (const auto& [i, M] : terms_) c += M->character().scaled(i % 2 == 0 ? 1 : -1);
    return c;
  }

 private:
  ModulePtr zero_module() const { return UModule::zero(field_); }

  const CyclotomicField* field_;
  std::map<int, ModulePtr> terms_;
  std::map<int, UMorphism> differentials_;
};

/// A single module placed in degree `deg`.
inline ChainComplex complex_of_module(const ModulePtr& M, int deg = 0) {
  ChainComplex X(M->field());
  X.set_term(deg, M);
  return X;
}

// ---------------------------------------------------------------------------
// Tensor products of morphisms and complexes

/// f (x) g : M (x) N -> M' (x) N' for the modules produced by tensor_module.
inline UMorphism tensor_morphism(const UMorphism& f, const UMorphism& g, const ModulePtr& MN, const ModulePtr& MN2) {
  const auto* fld = MN->field();
  TensorLayout L1 = tensor_layout(*f.source(), *g.source());
  TensorLayout L2 = tensor_layout(*f.target(), *g.target());
  GradedMatrix out;
  for (const auto& [w, offs] : L1.offset) {
    if (!L2.dims.count(w)) continue;
    ExactMatrix blk(fld, L2.dims.at(w), L1.dims.at(w));
    bool any = false;
    for (const auto& [m, off] : offs) {
      int n = w - m;
      auto it2 = L2.offset.at(w).find(m);
      if (it2 == L2.offset.at(w).end()) continue;
      ExactMatrix fm = f.block(m), gn = g.block(n);
      if (fm.is_zero() || gn.is_zero()) continue;
      ExactMatrix k = detail::kron(fm, gn);
      blk.set_block(it2->second, off, k);
      any = true;
    }
    if (any) out[w] = blk;
  }
  return UMorphism(MN, MN2, std::move(out));
}

/// (X (x) Y)_i = sum_{j+k=i} X_j (x) Y_k with d = d_j (x) id + (-1)^j id (x) d'_k.
inline ChainComplex tensor_complexes(const ChainComplex& X, const ChainComplex& Y) {
  const auto* f = X.field() ? X.field() : Y.field();
  ChainComplex out(f);
  if (X.is_zero() || Y.is_zero()) return out;
  // pieces[(j,k)] = X_j (x) Y_k
  std::map<std::pair<int, int>, ModulePtr> pieces;
  for (const auto& [j, Xj] : X.terms())
    for (const auto& [k, Yk] : Y.terms()) pieces[{j, k}] = tensor_module(*Xj, *Yk);
  std::map<int, DirectSum> sums;
  std::map<int, std::vector<std::pair<int, int>>> order;
  for (const auto& [jk, P] : pieces) order[jk.first + jk.second].push_back(jk);
  for (const auto& [i, list] : order) {
    std::vector<ModulePtr> parts;
    for (const auto& jk : list) parts.push_back(pieces[jk]);
    sums.emplace(i, direct_sum_of(f, parts));
    out.set_term(i, sums.at(i).module);
  }
  for (const auto& [i, list] : order) {
    if (!sums.count(i + 1)) continue;
    const DirectSum& src = sums.at(i);
    const DirectSum& tgt = sums.at(i + 1);
    UMorphism d(src.module, tgt.module);
    for (std::size_t s = 0; s < list.size(); ++s) {
      auto [j, k] = list[s];
      const auto& tl = order.at(i + 1);
      for (std::size_t t = 0; t < tl.size(); ++t) {
        auto [j2, k2] = tl[t];
        UMorphism piece;
        if (j2 == j + 1 && k2 == k) {
          UMorphism dx = X.differential(j);
          if (dx.is_zero()) continue;
          piece = tensor_morphism(dx, UMorphism::identity(Y.term(k)), pieces[{j, k}], pieces[{j2, k2}]);
        } else if (j2 == j && k2 == k + 1) {
          UMorphism dy = Y.differential(k);
          if (dy.is_zero()) continue;
          piece = tensor_morphism(UMorphism::identity(X.term(j)), dy, pieces[{j, k}], pieces[{j2, k2}]);
          if (j % 2 != 0) piece = piece.scaled(Cyclo(f, -1L));
        } else {
          continue;
        }
        d += tgt.inclusions[t] * piece * src.projections[s];
      }
    }
    out.set_differential(i, d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Double complexes

/// Grid of modules with horizontal maps (p,q) -> (p+1,q) and vertical maps (p,q) -> (p,q+1).
/// Squares are expected to commute; the totalisation twists vertical maps by (-1)^p.
struct DoubleComplex {
  std::map<std::pair<int, int>, ModulePtr> nodes;
  std::map<std::pair<int, int>, UMorphism> horizontal;
  std::map<std::pair<int, int>, UMorphism> vertical;
};

/// Total complex; node order inside each total degree is by increasing p.
inline ChainComplex total_complex(const DoubleComplex& D, const CyclotomicField* f) {
  auto node = [&](int p, int q) -> ModulePtr {
    auto it = D.nodes.find({p, q});
    return it == D.nodes.end() ? UModule::zero(f) : it->second;
  };
  auto hmap = [&](int p, int q) -> UMorphism {
    auto it = D.horizontal.find({p, q});
    return it == D.horizontal.end() ? UMorphism(node(p, q), node(p + 1, q)) : it->second;
  };
  auto vmap = [&](int p, int q) -> UMorphism {
    auto it = D.vertical.find({p, q});
    return it == D.vertical.end() ? UMorphism(node(p, q), node(p, q + 1)) : it->second;
  };
  for (const auto& [pq, M] : D.nodes) {
    auto [p, q] = pq;
    UMorphism a = vmap(p + 1, q) * hmap(p, q);
    UMorphism b = hmap(p, q + 1) * vmap(p, q);
    if (!(a == b))
      throw std::invalid_argument("total_complex: square at (" + std::to_string(p) + "," + std::to_string(q) +
                                  ") does not commute");
  }
  std::map<int, std::vector<std::pair<int, int>>> order;
  for (const auto& [pq, M] : D.nodes)
    if (!M->is_zero()) order[pq.first + pq.second].push_back(pq);
  ChainComplex out(f);
  std::map<int, DirectSum> sums;
  for (auto& [n, list] : order) {
    std::sort(list.begin(), list.end());
    std::vector<ModulePtr> parts;
    for (const auto& pq : list) parts.push_back(D.nodes.at(pq));
    sums.emplace(n, direct_sum_of(f, parts));
    out.set_term(n, sums.at(n).module);
  }
  for (const auto& [n, list] : order) {
    if (!sums.count(n + 1)) continue;
    const auto& tl = order.at(n + 1);
    UMorphism d(sums.at(n).module, sums.at(n + 1).module);
    for (std::size_t s = 0; s < list.size(); ++s) {
      auto [p, q] = list[s];
      for (std::size_t t = 0; t < tl.size(); ++t) {
        auto [p2, q2] = tl[t];
        UMorphism piece;
        if (p2 == p + 1 && q2 == q) piece = hmap(p, q);
        else if (p2 == p && q2 == q + 1) piece = p % 2 == 0 ? vmap(p, q) : vmap(p, q).scaled(Cyclo(f, -1L));
        else continue;
        if (piece.is_zero()) continue;
        d += sums.at(n + 1).inclusions[t] * piece * sums.at(n).projections[s];
      }
    }
    out.set_differential(n, d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complexes of tilting modules in block form

/// Matrix of morphisms T(src[c]) -> T(tgt[r]).
struct BlockMatrix {
  int ell = 0;
  std::vector<int> src, tgt;
  std::vector<std::vector<UMorphism>> e;  // e[r][c]

  static BlockMatrix zero(int ell, std::vector<int> src, std::vector<int> tgt) {
    BlockMatrix b;
    b.ell = ell;
    b.src = std::move(src);
    b.tgt = std::move(tgt);
    b.e.resize(b.tgt.size());
    for (std::size_t r = 0; r < b.tgt.size(); ++r)
      for (std::size_t c = 0; c < b.src.size(); ++c)
        b.e[r].emplace_back(tilting_module(ell, b.src[c]), tilting_module(ell, b.tgt[r]));
    return b;
  }
  static BlockMatrix identity(int ell, const std::vector<int>& labels) {
    BlockMatrix b = zero(ell, labels, labels);
    for (std::size_t k = 0; k < labels.size(); ++k) b.e[k][k] = UMorphism::identity(tilting_module(ell, labels[k]));
    return b;
  }
  bool is_zero() const {
    for (const auto& row : e)
      for (const auto& x : row)
        if (!x.is_zero()) return false;
    return true;
  }
  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.src != b.tgt) throw std::invalid_argument("BlockMatrix product: label mismatch");
    BlockMatrix r = zero(a.ell, b.src, a.tgt);
    for (std::size_t i = 0; i < a.tgt.size(); ++i)
      for (std::size_t k = 0; k < a.src.size(); ++k) {
        if (a.e[i][k].is_zero()) continue;
        for (std::size_t j = 0; j < b.src.size(); ++j) {
          if (b.e[k][j].is_zero()) continue;
          r.e[i][j] += a.e[i][k] * b.e[k][j];
        }
      }
    return r;
  }
  friend bool operator==(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.src != b.src || a.tgt != b.tgt) return false;
    for (std::size_t r = 0; r < a.tgt.size(); ++r)
      for (std::size_t c = 0; c < a.src.size(); ++c)
        if (!(a.e[r][c] == b.e[r][c])) return false;
    return true;
  }
};

using LabelMultiset = std::map<int, int>;  // label -> multiplicity

inline LabelMultiset to_multiset(const std::vector<int>& labels) {
  LabelMultiset m;
  for (int x : labels) m[x] += 1;
  return m;
}

/// True if a is contained in b as a multiset.
inline bool multiset_contains(const LabelMultiset& b, const LabelMultiset& a) {
  for (const auto& [k, n] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second < n) return false;
  }
  return true;
}

inline LabelMultiset multiset_sum(const LabelMultiset& a, const LabelMultiset& b) {
  LabelMultiset r = a;
  for (const auto& [k, n] : b) r[k] += n;
  return r;
}

/**
 * Complex whose degree-i term is the direct sum of T(labels[i][c]); the differential
 * d[i] is a BlockMatrix from degree i to degree i+1.
 */
struct TiltingComplex {
  int ell = 0;
  std::map<int, std::vector<int>> labels;
  std::map<int, BlockMatrix> d;

  std::vector<int> labels_at(int i) const {
    auto it = labels.find(i);
    return it == labels.end() ? std::vector<int>{} : it->second;
  }
  BlockMatrix differential(int i) const {
    auto it = d.find(i);
    if (it != d.end()) return it->second;
    return BlockMatrix::zero(ell, labels_at(i), labels_at(i + 1));
  }
  bool is_zero() const {
    for (const auto& [i, l] : labels)
      if (!l.empty()) return false;
    return true;
  }
  int min_degree() const {
    for (const auto& [i, l] : labels)
      if (!l.empty()) return i;
    return 0;
  }
  int max_degree() const {
    for (auto it = labels.rbegin(); it != labels.rend(); ++it)
      if (!it->second.empty()) return it->first;
    return 0;
  }
  /// degree -> label multiset, nonempty degrees only.
  std::map<int, LabelMultiset> multisets() const {
    std::map<int, LabelMultiset> out;
    for (const auto& [i, l] : labels)
      if (!l.empty()) out[i] = to_multiset(l);
    return out;
  }
  /// degree -> sorted labels, nonempty degrees only.
  std::map<int, std::vector<int>> sorted_labels() const {
    std::map<int, std::vector<int>> out;
    for (const auto& [i, l] : labels)
      if (!l.empty()) {
        auto s = l;
        std::sort(s.begin(), s.end());
        out[i] = s;
      }
    return out;
  }

  bool d_squared_zero() const {
    for (const auto& [i, di] : d) {
      auto it = d.find(i + 1);
      if (it == d.end()) continue;
      if (!(it->second * di).is_zero()) return false;
    }
    return true;
  }

  /// No differential block is an isomorphism.
  bool is_minimal() const {
    for (const auto& [i, di] : d)
      for (std::size_t r = 0; r < di.tgt.size(); ++r)
        for (std::size_t c = 0; c < di.src.size(); ++c)
          if (di.src[c] == di.tgt[r] && !di.e[r][c].is_zero() && di.e[r][c].is_isomorphism()) return false;
    return true;
  }

  /// Assembles the complex of modules (terms are direct_sum_of the T's in label order).
  ChainComplex to_chain_complex() const {
    const auto* f = CyclotomicField::get(ell);
    ChainComplex X(f);
    std::map<int, DirectSum> sums;
    for (const auto& [i, l] : labels) {
      if (l.empty()) continue;
      std::vector<ModulePtr> parts;
      for (int n : l) parts.push_back(tilting_module(ell, n));
      sums.emplace(i, direct_sum_of(f, parts));
      X.set_term(i, sums.at(i).module);
    }
    for (const auto& [i, di] : d) {
      if (!sums.count(i) || !sums.count(i + 1)) continue;
      UMorphism m(sums.at(i).module, sums.at(i + 1).module);
      for (std::size_t r = 0; r < di.tgt.size(); ++r)
        for (std::size_t c = 0; c < di.src.size(); ++c)
          if (!di.e[r][c].is_zero()) m += sums.at(i + 1).inclusions[r] * di.e[r][c] * sums.at(i).projections[c];
      X.set_differential(i, m);
    }
    return X;
  }
};

/// Direct sum of tilting complexes (labels of a followed by labels of b in each degree).
inline TiltingComplex direct_sum(const TiltingComplex& a, const TiltingComplex& b) {
  TiltingComplex out;
  out.ell = a.ell ? a.ell : b.ell;
  std::set<int> degs;
  for (const auto& [i, l] : a.labels) degs.insert(i);
  for (const auto& [i, l] : b.labels) degs.insert(i);
  for (int i : degs) {
    auto la = a.labels_at(i), lb = b.labels_at(i);
    std::vector<int> all = la;
    all.insert(all.end(), lb.begin(), lb.end());
    out.labels[i] = all;
  }
  for (int i : degs) {
    if (!degs.count(i + 1)) continue;
    BlockMatrix m = BlockMatrix::zero(out.ell, out.labels[i], out.labels[i + 1]);
    BlockMatrix da = a.differential(i), db = b.differential(i);
    for (std::size_t r = 0; r < da.tgt.size(); ++r)
      for (std::size_t c = 0; c < da.src.size(); ++c) m.e[r][c] = da.e[r][c];
    for (std::size_t r = 0; r < db.tgt.size(); ++r)
      for (std::size_t c = 0; c < db.src.size(); ++c) m.e[da.tgt.size() + r][da.src.size() + c] = db.e[r][c];
    out.d[i] = m;
  }
  return out;
}

/// Converts a complex whose terms are direct_sum_of(T(labels)) into block form.
inline TiltingComplex block_form(const ChainComplex& X, int ell, const std::map<int, std::vector<int>>& labels) {
  const auto* f = CyclotomicField::get(ell);
  TiltingComplex out;
  out.ell = ell;
  out.labels = labels;
  std::map<int, DirectSum> sums;
  for (const auto& [i, l] : labels) {
    if (l.empty()) continue;
    std::vector<ModulePtr> parts;
    for (int n : l) parts.push_back(tilting_module(ell, n));
    sums.emplace(i, direct_sum_of(f, parts));
    if (sums.at(i).module->weight_dims() != X.term(i)->weight_dims())
      throw std::invalid_argument("block_form: term " + std::to_string(i) + " does not match its labels");
  }
  for (const auto& [i, l] : labels) {
    if (!sums.count(i) || !sums.count(i + 1)) continue;
    UMorphism di = X.differential(i);
    BlockMatrix m = BlockMatrix::zero(ell, l, labels.at(i + 1));
    // reinterpret di between the canonical direct sums (same weight layout)
    UMorphism canon(sums.at(i).module, sums.at(i + 1).module, di.blocks());
    for (std::size_t r = 0; r < m.tgt.size(); ++r)
      for (std::size_t c = 0; c < m.src.size(); ++c)
        m.e[r][c] = sums.at(i + 1).projections[r] * canon * sums.at(i).inclusions[c];
    out.d[i] = m;
  }
  return out;
}

/// Homotopy equivalence data carried through Gaussian elimination: f: X -> Y, g: Y -> X, f o g = id.
struct MinimalizeResult {
  TiltingComplex complex;
  std::map<int, BlockMatrix> f;
  std::map<int, BlockMatrix> g;
  int cancellations = 0;
};

/**
 * Gaussian elimination on complexes. Repeatedly picks an invertible differential
 * block phi: A -> B (lowest degree first, then by source and target index), and
 * replaces X_i = A + C, X_(i+1) = B + D by C, D with d' = eps - gamma phi^-1 delta.
 */
inline MinimalizeResult minimalize(const TiltingComplex& X) {
  MinimalizeResult res;
  res.complex = X;
  TiltingComplex& Y = res.complex;
  const int ell = X.ell;
  for (const auto& [i, l] : X.labels) {
    res.f.emplace(i, BlockMatrix::identity(ell, l));
    res.g.emplace(i, BlockMatrix::identity(ell, l));
  }
  while (true) {
    bool found = false;
    int deg = 0;
    std::size_t c0 = 0, r0 = 0;
    for (const auto& [i, di] : Y.d) {
      for (std::size_t c = 0; c < di.src.size() && !found; ++c)
        for (std::size_t r = 0; r < di.tgt.size() && !found; ++r)
          if (di.src[c] == di.tgt[r] && !di.e[r][c].is_zero() && di.e[r][c].is_isomorphism()) {
            found = true;
            deg = i;
            c0 = c;
            r0 = r;
          }
      if (found) break;
    }
    if (!found) break;
    ++res.cancellations;
    const BlockMatrix di = Y.differential(deg);
    UMorphism phi_inv = *di.e[r0][c0].inverse();
    std::vector<int> A = Y.labels_at(deg), B = Y.labels_at(deg + 1);
    std::vector<int> C, Dl;
    std::vector<std::size_t> cidx, didx;
    for (std::size_t c = 0; c < A.size(); ++c)
      if (c != c0) {
        C.push_back(A[c]);
        cidx.push_back(c);
      }
    for (std::size_t r = 0; r < B.size(); ++r)
      if (r != r0) {
        Dl.push_back(B[r]);
        didx.push_back(r);
      }
    // new d_deg
    BlockMatrix nd = BlockMatrix::zero(ell, C, Dl);
    for (std::size_t r = 0; r < Dl.size(); ++r)
      for (std::size_t c = 0; c < C.size(); ++c) {
        UMorphism v = di.e[didx[r]][cidx[c]];
        const UMorphism& gam = di.e[didx[r]][c0];
        const UMorphism& del = di.e[r0][cidx[c]];
        if (!gam.is_zero() && !del.is_zero()) v -= gam * phi_inv * del;
        nd.e[r][c] = v;
      }
    // d_(deg-1): keep rows of C
    std::optional<BlockMatrix> prev;
    if (Y.d.count(deg - 1)) {
      const BlockMatrix& dp = Y.d.at(deg - 1);
      BlockMatrix np = BlockMatrix::zero(ell, dp.src, C);
      for (std::size_t r = 0; r < C.size(); ++r) np.e[r] = dp.e[cidx[r]];
      prev = np;
    }
    // d_(deg+1): keep columns of D
    std::optional<BlockMatrix> next;
    if (Y.d.count(deg + 1)) {
      const BlockMatrix& dn = Y.d.at(deg + 1);
      BlockMatrix nn = BlockMatrix::zero(ell, Dl, dn.tgt);
      for (std::size_t r = 0; r < dn.tgt.size(); ++r)
        for (std::size_t c = 0; c < Dl.size(); ++c) nn.e[r][c] = dn.e[r][didx[c]];
      next = nn;
    }
    // witnesses for this step
    BlockMatrix fi = BlockMatrix::zero(ell, A, C);
    for (std::size_t r = 0; r < C.size(); ++r) fi.e[r][cidx[r]] = UMorphism::identity(tilting_module(ell, C[r]));
    BlockMatrix fi1 = BlockMatrix::zero(ell, B, Dl);
    for (std::size_t r = 0; r < Dl.size(); ++r) {
      fi1.e[r][didx[r]] = UMorphism::identity(tilting_module(ell, Dl[r]));
      const UMorphism& gam = di.e[didx[r]][c0];
      if (!gam.is_zero()) fi1.e[r][r0] = (gam * phi_inv).scaled(Cyclo(CyclotomicField::get(ell), -1L));
    }
    BlockMatrix gi = BlockMatrix::zero(ell, C, A);
    for (std::size_t c = 0; c < C.size(); ++c) {
      gi.e[cidx[c]][c] = UMorphism::identity(tilting_module(ell, C[c]));
      const UMorphism& del = di.e[r0][cidx[c]];
      if (!del.is_zero()) gi.e[c0][c] = (phi_inv * del).scaled(Cyclo(CyclotomicField::get(ell), -1L));
    }
    BlockMatrix gi1 = BlockMatrix::zero(ell, Dl, B);
    for (std::size_t c = 0; c < Dl.size(); ++c) gi1.e[didx[c]][c] = UMorphism::identity(tilting_module(ell, Dl[c]));

    res.f[deg] = fi * res.f[deg];
    res.f[deg + 1] = fi1 * res.f[deg + 1];
    res.g[deg] = res.g[deg] * gi;
    res.g[deg + 1] = res.g[deg + 1] * gi1;

    Y.labels[deg] = C;
    Y.labels[deg + 1] = Dl;
    Y.d[deg] = nd;
    if (prev) Y.d[deg - 1] = *prev;
    if (next) Y.d[deg + 1] = *next;
  }
  // drop empty degrees and differentials touching them
  for (auto it = Y.labels.begin(); it != Y.labels.end();) {
    if (it->second.empty()) it = Y.labels.erase(it);
    else ++it;
  }
  for (auto it = Y.d.begin(); it != Y.d.end();) {
    if (!Y.labels.count(it->first) || !Y.labels.count(it->first + 1)) it = Y.d.erase(it);
    else ++it;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Tensor products of tilting complexes

/// Decomposition of T(a) (x) T(b) with witnesses, memoised per (l, a, b).
inline const DecompositionResult& tilting_tensor_decomposition(int ell, int a, int b, ModulePtr* product = nullptr) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::pair<ModulePtr, DecompositionResult>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(ell, a, b);
  auto it = cache.find(key);
  if (it == cache.end()) {
    ModulePtr P = tensor_module(*tilting_module(ell, a), *tilting_module(ell, b));
    it = cache.emplace(key, std::make_pair(P, decompose_tilting(P))).first;
  }
  if (product) *product = it->second.first;
  return it->second.second;
}

/// Labels of a tensor product of tilting complexes, from characters only.
inline std::map<int, LabelMultiset> tensor_labels(const TiltingComplex& X, const TiltingComplex& Y) {
  std::map<int, LabelMultiset> out;
  for (const auto& [j, lx] : X.labels)
    for (const auto& [k, ly] : Y.labels)
      for (int a : lx)
        for (int b : ly) {
          auto labs = tilting_labels_from_character(tilting_character(a, X.ell) * tilting_character(b, X.ell), X.ell);
          for (const auto& [n, m] : *labs) out[j + k][n] += m;
        }
  return out;
}

/**
 * X (x) Y in block form: each T(a) (x) T(b) is decomposed with witnesses and the
 * signed tensor differential is rewritten in the resulting bases.
 */
inline TiltingComplex tensor_tilting_complexes(const TiltingComplex& X, const TiltingComplex& Y) {
  const int ell = X.ell;
  const auto* f = CyclotomicField::get(ell);
  struct Slot {
    int j, k;
    std::size_t ix, iy;
    std::size_t part;
  };
  TiltingComplex out;
  out.ell = ell;
  std::map<int, std::vector<Slot>> slots;
  for (const auto& [j, lx] : X.labels)
    for (const auto& [k, ly] : Y.labels)
      for (std::size_t ix = 0; ix < lx.size(); ++ix)
        for (std::size_t iy = 0; iy < ly.size(); ++iy) {
          const auto& dec = tilting_tensor_decomposition(ell, lx[ix], ly[iy]);
          for (std::size_t p = 0; p < dec.parts.size(); ++p) {
            slots[j + k].push_back({j, k, ix, iy, p});
            out.labels[j + k].push_back(dec.parts[p].label);
          }
        }
  Cyclo minus(f, -1L);
  for (const auto& [i, src] : slots) {
    if (!slots.count(i + 1)) continue;
    const auto& tgt = slots.at(i + 1);
    BlockMatrix m = BlockMatrix::zero(ell, out.labels[i], out.labels[i + 1]);
    for (std::size_t c = 0; c < src.size(); ++c) {
      const Slot& s = src[c];
      int a = X.labels.at(s.j)[s.ix], b = Y.labels.at(s.k)[s.iy];
      ModulePtr Pab;
      const auto& dsrc = tilting_tensor_decomposition(ell, a, b, &Pab);
      for (std::size_t r = 0; r < tgt.size(); ++r) {
        const Slot& t = tgt[r];
        UMorphism piece;
        int a2 = X.labels.at(t.j)[t.ix], b2 = Y.labels.at(t.k)[t.iy];
        ModulePtr Pab2;
        const auto& dtgt = tilting_tensor_decomposition(ell, a2, b2, &Pab2);
        if (t.j == s.j + 1 && t.k == s.k && t.iy == s.iy) {
          const UMorphism dx = X.differential(s.j).e[t.ix][s.ix];
          if (dx.is_zero()) continue;
          piece = tensor_morphism(dx, UMorphism::identity(tilting_module(ell, b)), Pab, Pab2);
        } else if (t.j == s.j && t.k == s.k + 1 && t.ix == s.ix) {
          const UMorphism dy = Y.differential(s.k).e[t.iy][s.iy];
          if (dy.is_zero()) continue;
          piece = tensor_morphism(UMorphism::identity(tilting_module(ell, a)), dy, Pab, Pab2);
          if (s.j % 2 != 0) piece = piece.scaled(minus);
        } else {
          continue;
        }
        m.e[r][c] = dtgt.parts[t.part].projection * piece * dsrc.parts[s.part].inclusion;
      }
    }
    out.d[i] = m;
  }
  return out;
}

}  // namespace tiltlab
