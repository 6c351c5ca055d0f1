/**
 * @file umodule.hpp
 * @brief Finite-dimensional type-one modules for the quantum group U_zeta(sl2) with divided powers.
 *
 * A module is stored in a weight basis: for every integer weight m we keep the
 * dimension of M_m, and each of the generators E, F, E^(l), F^(l) is stored as a
 * family of blocks M_m -> M_(m+shift). K acts on M_m by zeta^m and is therefore
 * implicit. The global basis orders weight spaces by decreasing weight.
 */
#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tiltlab/character.hpp"
#include "tiltlab/matrix.hpp"
#include "tiltlab/qnumbers.hpp"

namespace tiltlab {

enum class Gen { E = 0, F = 1, Ediv = 2, Fdiv = 3 };
inline constexpr std::array<Gen, 4> kGenerators{Gen::E, Gen::F, Gen::Ediv, Gen::Fdiv};

inline const char* gen_name(Gen g) {
  switch (g) {
    case Gen::E: return "E";
    case Gen::F: return "F";
    case Gen::Ediv: return "E^(l)";
    case Gen::Fdiv: return "F^(l)";
  }
  return "?";
}

/// Weight shift of a generator.
inline int gen_shift(Gen g, int ell) {
  switch (g) {
    case Gen::E: return 2;
    case Gen::F: return -2;
    case Gen::Ediv: return 2 * ell;
    case Gen::Fdiv: return -2 * ell;
  }
  return 0;
}

/// Weight-preserving linear map data: one block per weight (target_m x source_m).
using GradedMatrix = std::map<int, ExactMatrix>;

/// Per-weight subspace: columns of `basis[m]` span the subspace inside M_m and
/// rows `pivots[m]` of the basis form an identity matrix.
struct GradedSubspace {
  std::map<int, ExactMatrix> basis;
  std::map<int, std::vector<int>> pivots;

  int dim() const {
    int d = 0;
    for (const auto& [m, b] : basis) d += b.cols();
    return d;
  }
  int dim_at(int m) const {
    auto it = basis.find(m);
    return it == basis.end() ? 0 : it->second.cols();
  }
};

/// Column-echelon normal form of the span of the columns of `a`.
inline std::pair<ExactMatrix, std::vector<int>> echelon_span(const ExactMatrix& a) {
  std::vector<int> piv;
  ExactMatrix r = a.transpose().rref(&piv);
  ExactMatrix basis = r.block(0, 0, static_cast<int>(piv.size()), a.rows()).transpose();
  return {basis, piv};
}

class UModule;
using ModulePtr = std::shared_ptr<const UModule>;

class UModule {
 public:
  using Blocks = std::map<int, ExactMatrix>;  // source weight -> block

  UModule(const CyclotomicField* f, std::map<int, int> weight_dims, std::array<Blocks, 4> actions)
      : field_(f), dims_(std::move(weight_dims)), actions_(std::move(actions)) {
    for (auto it = dims_.begin(); it != dims_.end();) {
      if (it->second < 0) throw std::invalid_argument("negative weight-space dimension");
      if (it->second == 0) it = dims_.erase(it);
      else ++it;
    }
    dim_ = 0;
    for (auto it = dims_.rbegin(); it != dims_.rend(); ++it) {
      offsets_[it->first] = dim_;
      dim_ += it->second;
    }
    for (Gen g : kGenerators) {
      auto& blocks = actions_[static_cast<int>(g)];
      for (auto it = blocks.begin(); it != blocks.end();) {
        int m = it->first;
        int t = m + gen_shift(g, ell());
        if (dim_at(m) == 0 || dim_at(t) == 0 || it->second.is_zero()) {
          it = blocks.erase(it);
          continue;
        }
        if (it->second.rows() != dim_at(t) || it->second.cols() != dim_at(m)) {
          throw std::invalid_argument(std::string("generator block shape mismatch for ") + gen_name(g) +
                                      " at weight " + std::to_string(m));
        }
        ++it;
      }
    }
  }

  static ModulePtr zero(const CyclotomicField* f) { return std::make_shared<UModule>(f, std::map<int, int>{}, std::array<Blocks, 4>{}); }

  const CyclotomicField* field() const { return field_; }
  int ell() const { return field_->ell(); }
  int dim() const { return dim_; }
  bool is_zero() const { return dim_ == 0; }
  const std::map<int, int>& weight_dims() const { return dims_; }
  int dim_at(int m) const {
    auto it = dims_.find(m);
    return it == dims_.end() ? 0 : it->second;
  }
  int offset(int m) const { return offsets_.at(m); }
  int max_weight() const { return dims_.empty() ? 0 : dims_.rbegin()->first; }
  int min_weight() const { return dims_.empty() ? 0 : dims_.begin()->first; }

  Character character() const {
    Character c;
    for (const auto& [m, d] : dims_) c.add(m, d);
    return c;
  }

  const Blocks& blocks(Gen g) const { return actions_[static_cast<int>(g)]; }
  /// Block of `g` on M_m (dim_(m+shift) x dim_m), zero when absent.
  ExactMatrix action(Gen g, int m) const {
    const auto& b = blocks(g);
    auto it = b.find(m);
    if (it != b.end()) return it->second;
    return ExactMatrix(field_, dim_at(m + gen_shift(g, ell())), dim_at(m));
  }
  const ExactMatrix* action_ptr(Gen g, int m) const {
    const auto& b = blocks(g);
    auto it = b.find(m);
    return it == b.end() ? nullptr : &it->second;
  }

  /// Divided power E^(a) (or F^(a)) on M_m for 0 <= a <= l; interior powers are E^a/[a]!.
  ExactMatrix divided_power(bool raising, int a, int m) const {
    const int l = ell();
    if (a == 0) return ExactMatrix::identity(field_, dim_at(m));
    if (a == l) return action(raising ? Gen::Ediv : Gen::Fdiv, m);
    if (a < 0 || a > l) throw std::invalid_argument("divided power exponent out of range");
    Gen g = raising ? Gen::E : Gen::F;
    int step = gen_shift(g, l);
    ExactMatrix acc = action(g, m);
    for (int i = 1; i < a; ++i) acc = action(g, m + i * step) * acc;
    return acc.scaled(quantum_factorial(a, field_).inverse());
  }

  /// Dense matrix of a generator in the global basis.
  ExactMatrix dense(Gen g) const {
    ExactMatrix out(field_, dim_, dim_);
    for (const auto& [m, blk] : blocks(g)) out.set_block(offset(m + gen_shift(g, ell())), offset(m), blk);
    return out;
  }
  ExactMatrix dense_K(int power = 1) const {
    ExactMatrix out(field_, dim_, dim_);
    for (const auto& [m, d] : dims_)
      for (int i = 0; i < d; ++i) out(offset(m) + i, offset(m) + i) = Cyclo::zeta_pow(field_, ((long)power * m % ell() + ell()) % ell());
    return out;
  }
  /// Weight of every global basis vector.
  std::vector<int> basis_weights() const {
    std::vector<int> w;
    for (auto it = dims_.rbegin(); it != dims_.rend(); ++it)
      for (int i = 0; i < it->second; ++i) w.push_back(it->first);
    return w;
  }

 private:
  const CyclotomicField* field_;
  std::map<int, int> dims_;
  std::map<int, int> offsets_;
  int dim_ = 0;
  std::array<Blocks, 4> actions_;
};

/// A weight-preserving linear map between two modules; `is_intertwiner` checks U-linearity.
class UMorphism {
 public:
  UMorphism() = default;
  UMorphism(ModulePtr src, ModulePtr tgt, GradedMatrix blocks = {})
      : src_(std::move(src)), tgt_(std::move(tgt)), blocks_(std::move(blocks)) {
    for (auto it = blocks_.begin(); it != blocks_.end();) {
      int m = it->first;
      if (src_->dim_at(m) == 0 || tgt_->dim_at(m) == 0 || it->second.is_zero()) {
        it = blocks_.erase(it);
        continue;
      }
      if (it->second.rows() != tgt_->dim_at(m) || it->second.cols() != src_->dim_at(m))
        throw std::invalid_argument("morphism block shape mismatch at weight " + std::to_string(m));
      ++it;
    }
  }

  static UMorphism identity(const ModulePtr& m) {
    GradedMatrix b;
    for (const auto& [w, d] : m->weight_dims()) b[w] = ExactMatrix::identity(m->field(), d);
    return UMorphism(m, m, std::move(b));
  }
  static UMorphism zero(const ModulePtr& s, const ModulePtr& t) { return UMorphism(s, t); }

  const ModulePtr& source() const { return src_; }
  const ModulePtr& target() const { return tgt_; }
  const GradedMatrix& blocks() const { return blocks_; }
  ExactMatrix block(int m) const {
    auto it = blocks_.find(m);
    if (it != blocks_.end()) return it->second;
    return ExactMatrix(src_->field(), tgt_->dim_at(m), src_->dim_at(m));
  }
  bool is_zero() const { return blocks_.empty(); }

  /// this o other
  UMorphism after(const UMorphism& first) const {
    GradedMatrix out;
    for (const auto& [m, b] : blocks_) {
      auto it = first.blocks_.find(m);
      if (it == first.blocks_.end()) continue;
      out[m] = b * it->second;
    }
    return UMorphism(first.src_, tgt_, std::move(out));
  }
  friend UMorphism operator*(const UMorphism& g, const UMorphism& f) { return g.after(f); }

  UMorphism& operator+=(const UMorphism& o) {
    for (const auto& [m, b] : o.blocks_) {
      auto it = blocks_.find(m);
      if (it == blocks_.end()) blocks_[m] = b;
      else it->second += b;
    }
    prune();
    return *this;
  }
  UMorphism& operator-=(const UMorphism& o) { return *this += o.scaled(Cyclo(src_->field(), -1L)); }
  friend UMorphism operator+(UMorphism a, const UMorphism& b) { return a += b; }
  friend UMorphism operator-(UMorphism a, const UMorphism& b) { return a -= b; }
  UMorphism scaled(const Cyclo& s) const {
    GradedMatrix out;
    if (s.is_zero()) return UMorphism(src_, tgt_);
    for (const auto& [m, b] : blocks_) out[m] = b.scaled(s);
    return UMorphism(src_, tgt_, std::move(out));
  }

  ExactMatrix dense() const {
    ExactMatrix out(src_->field(), tgt_->dim(), src_->dim());
    for (const auto& [m, b] : blocks_) out.set_block(tgt_->offset(m), src_->offset(m), b);
    return out;
  }

  int rank() const {
    int r = 0;
    for (const auto& [m, b] : blocks_) r += b.rank();
    return r;
  }
  bool is_injective() const { return rank() == src_->dim(); }
  bool is_surjective() const { return rank() == tgt_->dim(); }
  bool is_isomorphism() const { return src_->dim() == tgt_->dim() && is_injective(); }

  std::optional<UMorphism> inverse() const {
    if (!is_isomorphism()) return std::nullopt;
    GradedMatrix out;
    for (const auto& [m, d] : src_->weight_dims()) {
      auto inv = block(m).inverse();
      if (!inv) return std::nullopt;
      out[m] = *inv;
    }
    return UMorphism(tgt_, src_, std::move(out));
  }

  /// Checks that the map commutes with E, F, E^(l), F^(l).
  bool is_intertwiner() const {
    for (Gen g : kGenerators) {
      int s = gen_shift(g, src_->ell());
      for (const auto& [m, d] : src_->weight_dims()) {
        if (tgt_->dim_at(m + s) == 0) continue;
        ExactMatrix lhs = tgt_->action(g, m) * block(m);
        ExactMatrix rhs = block(m + s) * src_->action(g, m);
        if (lhs != rhs) return false;
      }
    }
    return true;
  }

  friend bool operator==(const UMorphism& a, const UMorphism& b) {
    if (a.blocks_.size() != b.blocks_.size()) return false;
    for (const auto& [m, blk] : a.blocks_) {
      auto it = b.blocks_.find(m);
      if (it == b.blocks_.end() || it->second != blk) return false;
    }
    return true;
  }

 private:
  void prune() {
    for (auto it = blocks_.begin(); it != blocks_.end();) {
      if (it->second.is_zero()) it = blocks_.erase(it);
      else ++it;
    }
  }

  ModulePtr src_;
  ModulePtr tgt_;
  GradedMatrix blocks_;
};

// ---------------------------------------------------------------------------
// Relation checking

struct RelationFailure {
  std::string relation;
  int weight = 0;
  int witness_column = -1;  // global basis index of a column where the relation fails
};

struct RelationReport {
  std::vector<RelationFailure> failures;
  std::vector<std::string> checked;
  bool ok() const { return failures.empty(); }
  std::string summary() const {
    if (ok()) return "all relations hold";
    std::string s;
    for (const auto& f : failures) {
      if (!s.empty()) s += "; ";
      s += f.relation + " fails at weight " + std::to_string(f.weight) + " (column " +
           std::to_string(f.witness_column) + ")";
    }
    return s;
  }
};

namespace detail {
// [K; c] on a weight-m vector: (zeta^(m+c) - zeta^-(m+c)) / (zeta - zeta^-1)
inline Cyclo k_bracket(const CyclotomicField* f, int m, int c) {
  int e = m + c;
  Cyclo num = Cyclo::zeta_pow(f, ((e % f->ell()) + f->ell()) % f->ell()) -
              Cyclo::zeta_pow(f, (((-e) % f->ell()) + f->ell()) % f->ell());
  Cyclo den = Cyclo::zeta_pow(f, 1) - Cyclo::zeta_pow(f, f->ell() - 1);
  return num / den;
}

inline int first_bad_column(const ExactMatrix& diff) {
  for (int j = 0; j < diff.cols(); ++j)
    for (int i = 0; i < diff.rows(); ++i)
      if (!diff(i, j).is_zero()) return j;
  return -1;
}
}  // namespace detail

/**
 * Verifies the defining relations on the stored generators:
 * [E,F] = (K - K^-1)/(z - z^-1), E^l = F^l = 0, E and F commute with E^(l) and
 * F^(l) respectively, and the mixed identities
 *   E F^(l) - F^(l) E = F^(l-1) [K; 1-l],   E^(l) F - F E^(l) = E^(l-1) [K; l-1].
 * The K-conjugation relations hold by construction of the weight grading and are
 * listed as checked.
 */
inline RelationReport check_relations(const UModule& M) {
  RelationReport rep;
  const auto* f = M.field();
  const int l = M.ell();
  rep.checked = {"KEK^-1 = z^2 E (grading)", "KFK^-1 = z^-2 F (grading)", "K commutes with E^(l), F^(l) (grading)",
                 "[E,F]", "E^l = 0", "F^l = 0", "[E, E^(l)] = 0", "[F, F^(l)] = 0",
                 "E F^(l) - F^(l) E", "E^(l) F - F E^(l)"};
  auto report = [&](const std::string& name, int m, const ExactMatrix& diff) {
    int col = detail::first_bad_column(diff);
    if (col >= 0) rep.failures.push_back({name, m, M.offset(m) + col});
  };
  for (const auto& [m, d] : M.weight_dims()) {
    {
      ExactMatrix ef = M.action(Gen::E, m - 2) * M.action(Gen::F, m);
      ExactMatrix fe = M.action(Gen::F, m + 2) * M.action(Gen::E, m);
      ExactMatrix rhs = ExactMatrix::identity(f, d).scaled(detail::k_bracket(f, m, 0));
      report("[E,F] = (K - K^-1)/(z - z^-1)", m, ef - fe - rhs);
    }
    {
      ExactMatrix acc = M.action(Gen::E, m);
      for (int i = 1; i < l; ++i) acc = M.action(Gen::E, m + 2 * i) * acc;
      report("E^l = 0", m, acc);
      acc = M.action(Gen::F, m);
      for (int i = 1; i < l; ++i) acc = M.action(Gen::F, m - 2 * i) * acc;
      report("F^l = 0", m, acc);
    }
    {
      ExactMatrix a = M.action(Gen::E, m + 2 * l) * M.action(Gen::Ediv, m);
      ExactMatrix b = M.action(Gen::Ediv, m + 2) * M.action(Gen::E, m);
      report("[E, E^(l)] = 0", m, a - b);
      a = M.action(Gen::F, m - 2 * l) * M.action(Gen::Fdiv, m);
      b = M.action(Gen::Fdiv, m - 2) * M.action(Gen::F, m);
      report("[F, F^(l)] = 0", m, a - b);
    }
    {
      ExactMatrix lhs = M.action(Gen::E, m - 2 * l) * M.action(Gen::Fdiv, m) -
                        M.action(Gen::Fdiv, m + 2) * M.action(Gen::E, m);
      ExactMatrix rhs = M.divided_power(false, l - 1, m).scaled(detail::k_bracket(f, m, 1 - l));
      report("E F^(l) - F^(l) E = F^(l-1) [K; 1-l]", m, lhs - rhs);
    }
    {
      ExactMatrix lhs = M.action(Gen::Ediv, m - 2) * M.action(Gen::F, m) -
                        M.action(Gen::F, m + 2 * l) * M.action(Gen::Ediv, m);
      ExactMatrix rhs = M.divided_power(true, l - 1, m).scaled(detail::k_bracket(f, m, l - 1));
      report("E^(l) F - F E^(l) = E^(l-1) [K; l-1]", m, lhs - rhs);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Constructions

/// Module with the same weights as M and generator blocks produced by `fn`.
inline ModulePtr make_module(const CyclotomicField* f, std::map<int, int> dims, std::array<UModule::Blocks, 4> acts) {
  return std::make_shared<UModule>(f, std::move(dims), std::move(acts));
}

namespace detail {
inline ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b) {
  ExactMatrix r(a.field() ? a.field() : b.field(), a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      const Cyclo& x = a(i, j);
      if (x.is_zero()) continue;
      for (int p = 0; p < b.rows(); ++p)
        for (int q = 0; q < b.cols(); ++q) {
          const Cyclo& y = b(p, q);
          if (!y.is_zero()) r(i * b.rows() + p, j * b.cols() + q) = x * y;
        }
    }
  return r;
}
inline Cyclo zpow(const CyclotomicField* f, long e) {
  long l = f->ell();
  return Cyclo::zeta_pow(f, ((e % l) + l) % l);
}
}  // namespace detail

/// Layout of (M (x) N)_w: components M_m (x) N_(w-m) in decreasing m, Kronecker order inside.
struct TensorLayout {
  std::map<int, std::map<int, int>> offset;  // w -> (m -> offset inside (M(x)N)_w)
  std::map<int, int> dims;
};

inline TensorLayout tensor_layout(const UModule& M, const UModule& N) {
  TensorLayout L;
  for (auto im = M.weight_dims().rbegin(); im != M.weight_dims().rend(); ++im) {
    for (auto in = N.weight_dims().rbegin(); in != N.weight_dims().rend(); ++in) {
      int w = im->first + in->first;
      auto& off = L.offset[w];
      off[im->first] = L.dims[w];
      L.dims[w] += im->second * in->second;
    }
  }
  return L;
}

/**
 * M (x) N via Delta(K)=K(x)K, Delta(E)=E(x)1+K(x)E, Delta(F)=F(x)K^-1+1(x)F and
 *   Delta(E^(l)) = sum_{a+b=l} z^(-ab) K^b E^(a) (x) E^(b),
 *   Delta(F^(l)) = sum_{a+b=l} z^(-ab) F^(a) (x) K^(-a) F^(b).
 */
inline ModulePtr tensor_module(const UModule& M, const UModule& N) {
  if (M.field() != N.field()) throw ArithmeticError("tensor_module: mismatched l");
  const auto* f = M.field();
  const int l = M.ell();
  TensorLayout L = tensor_layout(M, N);
  std::array<UModule::Blocks, 4> acts;

  // Adds coeff * (A (x) B) from component (m, n) to component (m + dm, n + dn).
  auto add_term = [&](Gen g, int m, int n, int dm, int dn, const ExactMatrix& A, const ExactMatrix& B,
                      const Cyclo& coeff) {
    if (A.empty() || B.empty() || A.is_zero() || B.is_zero() || coeff.is_zero()) return;
    int w = m + n;
    int w2 = w + dm + dn;
    if (!L.dims.count(w2)) return;
    auto& blk = acts[static_cast<int>(g)][w];
    if (blk.rows() == 0 && blk.cols() == 0) blk = ExactMatrix(f, L.dims[w2], L.dims[w]);
    ExactMatrix k = detail::kron(A, B).scaled(coeff);
    blk.set_block(L.offset[w2][m + dm], L.offset[w][m], blk.block(L.offset[w2][m + dm], L.offset[w][m], k.rows(), k.cols()) + k);
  };

  for (const auto& [m, dm_] : M.weight_dims()) {
    for (const auto& [n, dn_] : N.weight_dims()) {
      ExactMatrix IM = ExactMatrix::identity(f, dm_);
      ExactMatrix IN = ExactMatrix::identity(f, dn_);
      Cyclo one = Cyclo::one(f);
      // E
      if (M.dim_at(m + 2)) add_term(Gen::E, m, n, 2, 0, M.action(Gen::E, m), IN, one);
      if (N.dim_at(n + 2)) add_term(Gen::E, m, n, 0, 2, IM, N.action(Gen::E, n), detail::zpow(f, m));
      // F
      if (M.dim_at(m - 2)) add_term(Gen::F, m, n, -2, 0, M.action(Gen::F, m), IN, detail::zpow(f, -n));
      if (N.dim_at(n - 2)) add_term(Gen::F, m, n, 0, -2, IM, N.action(Gen::F, n), one);
      // divided powers
      for (int a = 0; a <= l; ++a) {
        int b = l - a;
        if (M.dim_at(m + 2 * a) && N.dim_at(n + 2 * b)) {
          // z^(-ab) K^b acting on weight m + 2a: z^(-ab + b(m + 2a)) = z^(ab + bm)
          Cyclo c = detail::zpow(f, (long)a * b + (long)b * m);
          add_term(Gen::Ediv, m, n, 2 * a, 2 * b, M.divided_power(true, a, m), N.divided_power(true, b, n), c);
        }
        if (M.dim_at(m - 2 * a) && N.dim_at(n - 2 * b)) {
          // z^(-ab) K^(-a) acting on weight n - 2b: z^(-ab - a(n - 2b)) = z^(ab - an)
          Cyclo c = detail::zpow(f, (long)a * b - (long)a * n);
          add_term(Gen::Fdiv, m, n, -2 * a, -2 * b, M.divided_power(false, a, m), N.divided_power(false, b, n), c);
        }
      }
    }
  }
  return make_module(f, L.dims, std::move(acts));
}

/// Index of the basis vector m_i (x) n_j of M (x) N in the global basis.
inline int tensor_index(const UModule& M, const UModule& N, const TensorLayout& L, int i, int j) {
  auto wm = M.basis_weights();
  auto wn = N.basis_weights();
  int m = wm[i], n = wn[j];
  int li = i - M.offset(m), lj = j - N.offset(n);
  int w = m + n;
  int off = 0;
  for (auto it = L.dims.rbegin(); it != L.dims.rend(); ++it) {
    if (it->first == w) break;
    off += it->second;
  }
  return off + L.offset.at(w).at(m) + li * N.dim_at(n) + lj;
}

/**
 * Dual module M* with u . phi = phi o S(u), S(E) = -K^-1 E, S(F) = -F K,
 * S(E^(l)) = -K^-l E^(l), S(F^(l)) = -F^(l) K^l. The dual basis of M_m spans M*_(-m).
 */
inline ModulePtr dual_module(const UModule& M) {
  const auto* f = M.field();
  const int l = M.ell();
  std::map<int, int> dims;
  for (const auto& [m, d] : M.weight_dims()) dims[-m] = d;
  std::array<UModule::Blocks, 4> acts;
  Cyclo minus = Cyclo(f, -1L);
  for (const auto& [m, blk] : M.blocks(Gen::E))  // M_m -> M_(m+2); dual: -(m+2) -> -m
    acts[0][-(m + 2)] = blk.transpose().scaled(minus * detail::zpow(f, -(m + 2)));
  for (const auto& [m, blk] : M.blocks(Gen::F))  // M_m -> M_(m-2); dual: -(m-2) -> -m
    acts[1][-(m - 2)] = blk.transpose().scaled(minus * detail::zpow(f, m));
  for (const auto& [m, blk] : M.blocks(Gen::Ediv))
    acts[2][-(m + 2 * l)] = blk.transpose().scaled(minus * detail::zpow(f, -(long)l * (m + 2 * l)));
  for (const auto& [m, blk] : M.blocks(Gen::Fdiv))
    acts[3][-(m - 2 * l)] = blk.transpose().scaled(minus * detail::zpow(f, (long)l * m));
  return make_module(f, std::move(dims), std::move(acts));
}

/// Dual of a morphism f: M -> N is f*: N* -> M* (transposed blocks).
inline UMorphism dual_morphism(const UMorphism& phi, const ModulePtr& src_dual, const ModulePtr& tgt_dual) {
  GradedMatrix out;
  for (const auto& [m, b] : phi.blocks()) out[-m] = b.transpose();
  return UMorphism(tgt_dual, src_dual, std::move(out));
}

/// Pullback of the classical (a+1)-dimensional simple sl2-module through quantum Frobenius.
inline ModulePtr frobenius_twist(const CyclotomicField* f, int a) {
  if (a < 0) throw std::invalid_argument("frobenius_twist: highest weight must be >= 0");
  const int l = f->ell();
  std::map<int, int> dims;
  for (int i = 0; i <= a; ++i) dims[l * (a - 2 * i)] = 1;
  std::array<UModule::Blocks, 4> acts;
  for (int i = 0; i <= a; ++i) {
    int w = l * (a - 2 * i);
    ExactMatrix e(f, 1, 1), fm(f, 1, 1);
    if (i > 0) {
      e(0, 0) = Cyclo(f, (long)(a - i + 1));
      acts[2][w] = e;
    }
    if (i < a) {
      fm(0, 0) = Cyclo(f, (long)(i + 1));
      acts[3][w] = fm;
    }
  }
  return make_module(f, std::move(dims), std::move(acts));
}

inline ModulePtr trivial_module(const CyclotomicField* f) {
  return make_module(f, {{0, 1}}, {});
}

/// Direct sum with the layout (M_m first, then N_m) inside every weight space.
inline ModulePtr direct_sum(const UModule& M, const UModule& N) {
  const auto* f = M.field();
  if (f != N.field()) throw ArithmeticError("direct_sum: mismatched l");
  std::map<int, int> dims = M.weight_dims();
  for (const auto& [m, d] : N.weight_dims()) dims[m] += d;
  std::array<UModule::Blocks, 4> acts;
  for (Gen g : kGenerators) {
    int s = gen_shift(g, M.ell());
    for (const auto& [m, d] : dims) {
      if (!dims.count(m + s)) continue;
      ExactMatrix blk(f, dims[m + s], d);
      if (M.dim_at(m) && M.dim_at(m + s)) blk.set_block(0, 0, M.action(g, m));
      if (N.dim_at(m) && N.dim_at(m + s)) blk.set_block(M.dim_at(m + s), M.dim_at(m), N.action(g, m));
      acts[static_cast<int>(g)][m] = blk;
    }
  }
  return make_module(f, std::move(dims), std::move(acts));
}

/// Direct sum of a list of modules together with the canonical inclusions and projections.
struct DirectSum {
  ModulePtr module;
  std::vector<UMorphism> inclusions;
  std::vector<UMorphism> projections;
};

inline DirectSum direct_sum_of(const CyclotomicField* f, const std::vector<ModulePtr>& parts) {
  std::map<int, int> dims;
  std::vector<std::map<int, int>> local_off(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (const auto& [m, d] : parts[k]->weight_dims()) {
      local_off[k][m] = dims[m];
      dims[m] += d;
    }
  std::array<UModule::Blocks, 4> acts;
  const int l = f->ell();
  for (Gen g : kGenerators) {
    int s = gen_shift(g, l);
    for (const auto& [m, d] : dims) {
      if (!dims.count(m + s)) continue;
      ExactMatrix blk(f, dims[m + s], d);
      bool any = false;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const auto* b = parts[k]->action_ptr(g, m);
        if (!b) continue;
        blk.set_block(local_off[k].at(m + s), local_off[k].at(m), *b);
        any = true;
      }
      if (any) acts[static_cast<int>(g)][m] = blk;
    }
  }
  DirectSum out;
  out.module = make_module(f, dims, std::move(acts));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    GradedMatrix inc, proj;
    for (const auto& [m, d] : parts[k]->weight_dims()) {
      ExactMatrix i(f, dims[m], d), p(f, d, dims[m]);
      for (int t = 0; t < d; ++t) {
        i(local_off[k][m] + t, t) = Cyclo::one(f);
        p(t, local_off[k][m] + t) = Cyclo::one(f);
      }
      inc[m] = i;
      proj[m] = p;
    }
    out.inclusions.emplace_back(parts[k], out.module, std::move(inc));
    out.projections.emplace_back(out.module, parts[k], std::move(proj));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subspaces, submodules, quotients

/// Splits a global vector of M into weight components (column vectors).
inline std::map<int, ExactMatrix> weight_components(const UModule& M, const ExactMatrix& v) {
  std::map<int, ExactMatrix> out;
  for (const auto& [m, d] : M.weight_dims()) {
    ExactMatrix c = v.block(M.offset(m), 0, d, 1);
    if (!c.is_zero()) out[m] = c;
  }
  return out;
}

/// Incrementally grown per-weight span, kept as reduced rows for fast membership tests.
class WeightSpanBuilder {
 public:
  explicit WeightSpanBuilder(const UModule& M) : M_(M) {}

  /// Adds v (a vector in M_m); returns the reduced new direction if it enlarged the span.
  std::optional<ExactMatrix> add(int m, const ExactMatrix& v) {
    auto& rows = rows_[m];
    auto& piv = piv_[m];
    ExactMatrix r = v.transpose();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Cyclo& c = r(0, piv[k]);
      if (c.is_zero()) continue;
      r -= rows[k].scaled(c);
    }
    int lead = -1;
    for (int j = 0; j < r.cols(); ++j)
      if (!r(0, j).is_zero()) {
        lead = j;
        break;
      }
    if (lead < 0) return std::nullopt;
    r = r.scaled(r(0, lead).inverse());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Cyclo c = rows[k](0, lead);
      if (!c.is_zero()) rows[k] -= r.scaled(c);
    }
    rows.push_back(r);
    piv.push_back(lead);
    return r.transpose();
  }

  GradedSubspace result() const {
    GradedSubspace s;
    for (const auto& [m, rows] : rows_) {
      if (rows.empty()) continue;
      ExactMatrix stacked(M_.field(), 0, M_.dim_at(m));
      for (const auto& r : rows) stacked = ExactMatrix::vstack(stacked, r);
      auto [basis, piv] = echelon_span(stacked.transpose());
      s.basis[m] = basis;
      s.pivots[m] = piv;
    }
    return s;
  }

 private:
  const UModule& M_;
  std::map<int, std::vector<ExactMatrix>> rows_;
  std::map<int, std::vector<int>> piv_;
};

/// Smallest generator-stable subspace containing the given weight vectors.
inline GradedSubspace generated_subspace(const UModule& M, const std::vector<std::pair<int, ExactMatrix>>& seeds) {
  WeightSpanBuilder span(M);
  std::vector<std::pair<int, ExactMatrix>> queue;
  for (const auto& [m, v] : seeds)
    if (auto r = span.add(m, v)) queue.emplace_back(m, *r);
  while (!queue.empty()) {
    auto [m, v] = queue.back();
    queue.pop_back();
    for (Gen g : kGenerators) {
      const auto* b = M.action_ptr(g, m);
      if (!b) continue;
      int t = m + gen_shift(g, M.ell());
      ExactMatrix w = *b * v;
      if (w.is_zero()) continue;
      if (auto r = span.add(t, w)) queue.emplace_back(t, *r);
    }
  }
  return span.result();
}

/// Normalises arbitrary per-weight spanning columns into a GradedSubspace.
inline GradedSubspace subspace_from_columns(const std::map<int, ExactMatrix>& cols) {
  GradedSubspace s;
  for (const auto& [m, c] : cols) {
    if (c.cols() == 0) continue;
    auto [basis, piv] = echelon_span(c);
    if (basis.cols() == 0) continue;
    s.basis[m] = basis;
    s.pivots[m] = piv;
  }
  return s;
}

/// True if every generator maps the subspace into itself.
inline bool is_stable(const UModule& M, const GradedSubspace& S) {
  for (Gen g : kGenerators) {
    int s = gen_shift(g, M.ell());
    for (const auto& [m, B] : S.basis) {
      const auto* blk = M.action_ptr(g, m);
      if (!blk) continue;
      ExactMatrix img = *blk * B;
      if (img.is_zero()) continue;
      auto it = S.basis.find(m + s);
      if (it == S.basis.end()) return false;
      const auto& piv = S.pivots.at(m + s);
      ExactMatrix coords = img.select_rows(piv);
      if (it->second * coords != img) return false;
    }
  }
  return true;
}

struct Submodule {
  ModulePtr module;
  UMorphism inclusion;
};

/// Induced module structure on a stable subspace, with its inclusion.
inline Submodule make_submodule(const ModulePtr& M, const GradedSubspace& S) {
  const auto* f = M->field();
  std::map<int, int> dims;
  for (const auto& [m, B] : S.basis) dims[m] = B.cols();
  std::array<UModule::Blocks, 4> acts;
  for (Gen g : kGenerators) {
    int s = gen_shift(g, M->ell());
    for (const auto& [m, B] : S.basis) {
      const auto* blk = M->action_ptr(g, m);
      if (!blk) continue;
      ExactMatrix img = *blk * B;
      if (img.is_zero()) continue;
      auto it = S.basis.find(m + s);
      if (it == S.basis.end()) throw std::invalid_argument("subspace is not stable under " + std::string(gen_name(g)));
      ExactMatrix coords = img.select_rows(S.pivots.at(m + s));
      if (it->second * coords != img)
        throw std::invalid_argument("subspace is not stable under " + std::string(gen_name(g)));
      acts[static_cast<int>(g)][m] = coords;
    }
  }
  ModulePtr sub = make_module(f, dims, std::move(acts));
  GradedMatrix inc;
  for (const auto& [m, B] : S.basis) inc[m] = B;
  return {sub, UMorphism(sub, M, std::move(inc))};
}

/// Submodule generated by arbitrary vectors of M (global coordinates, one column each).
inline Submodule submodule_generated(const ModulePtr& M, const std::vector<ExactMatrix>& vectors) {
  std::vector<std::pair<int, ExactMatrix>> seeds;
  for (const auto& v : vectors) {
    if (v.rows() != M->dim() || v.cols() != 1) throw std::invalid_argument("submodule_generated: vector length mismatch");
    for (auto& [m, c] : weight_components(*M, v)) seeds.emplace_back(m, c);
  }
  return make_submodule(M, generated_subspace(*M, seeds));
}

struct Quotient {
  ModulePtr module;
  UMorphism projection;
  GradedMatrix section;  // linear (not U-linear) right inverse of the projection, per weight
};

/// M / S for a stable subspace S; quotient basis is the complement of the pivot rows.
inline Quotient make_quotient(const ModulePtr& M, const GradedSubspace& S) {
  if (!is_stable(*M, S)) throw std::invalid_argument("quotient_module: subspace is not generator-stable");
  const auto* f = M->field();
  std::map<int, int> dims;
  std::map<int, ExactMatrix> proj;   // Q_m x M_m
  std::map<int, std::vector<int>> nonpiv;
  GradedMatrix section;
  for (const auto& [m, d] : M->weight_dims()) {
    std::vector<char> isp(d, 0);
    auto it = S.basis.find(m);
    if (it != S.basis.end())
      for (int p : S.pivots.at(m)) isp[p] = 1;
    std::vector<int> np;
    for (int i = 0; i < d; ++i)
      if (!isp[i]) np.push_back(i);
    if (np.empty()) continue;
    dims[m] = static_cast<int>(np.size());
    ExactMatrix P(f, static_cast<int>(np.size()), d);
    for (std::size_t r = 0; r < np.size(); ++r) P(static_cast<int>(r), np[r]) = Cyclo::one(f);
    if (it != S.basis.end()) {
      const auto& B = it->second;
      const auto& piv = S.pivots.at(m);
      for (std::size_t r = 0; r < np.size(); ++r)
        for (std::size_t k = 0; k < piv.size(); ++k) {
          const Cyclo& v = B(np[r], static_cast<int>(k));
          if (!v.is_zero()) P(static_cast<int>(r), piv[k]) = -v;
        }
    }
    ExactMatrix sec(f, d, static_cast<int>(np.size()));
    for (std::size_t r = 0; r < np.size(); ++r) sec(np[r], static_cast<int>(r)) = Cyclo::one(f);
    proj[m] = P;
    section[m] = sec;
    nonpiv[m] = np;
  }
  std::array<UModule::Blocks, 4> acts;
  for (Gen g : kGenerators) {
    int s = gen_shift(g, M->ell());
    for (const auto& [m, np] : nonpiv) {
      if (!proj.count(m + s)) continue;
      const auto* blk = M->action_ptr(g, m);
      if (!blk) continue;
      ExactMatrix act = proj[m + s] * blk->select_columns(np);
      if (!act.is_zero()) acts[static_cast<int>(g)][m] = act;
    }
  }
  ModulePtr Q = make_module(f, dims, std::move(acts));
  return {Q, UMorphism(M, Q, std::move(proj)), std::move(section)};
}

/// Quotient by the image of an injective morphism into M.
inline Quotient quotient_module(const ModulePtr& M, const UMorphism& inclusion) {
  if (inclusion.target().get() != M.get() && inclusion.target()->dim() != M->dim())
    throw std::invalid_argument("quotient_module: inclusion does not land in M");
  if (!inclusion.is_injective()) throw std::invalid_argument("quotient_module: map is not injective");
  std::map<int, ExactMatrix> cols;
  for (const auto& [m, b] : inclusion.blocks()) cols[m] = b;
  return make_quotient(M, subspace_from_columns(cols));
}

inline GradedSubspace kernel_subspace(const UMorphism& phi) {
  std::map<int, ExactMatrix> cols;
  for (const auto& [m, d] : phi.source()->weight_dims()) cols[m] = phi.block(m).kernel();
  return subspace_from_columns(cols);
}

inline GradedSubspace image_subspace(const UMorphism& phi) {
  std::map<int, ExactMatrix> cols;
  for (const auto& [m, b] : phi.blocks()) cols[m] = b;
  return subspace_from_columns(cols);
}

inline Submodule kernel_module(const UMorphism& phi) { return make_submodule(phi.source(), kernel_subspace(phi)); }
inline Submodule image_module(const UMorphism& phi) { return make_submodule(phi.target(), image_subspace(phi)); }
inline Quotient cokernel_module(const UMorphism& phi) { return make_quotient(phi.target(), image_subspace(phi)); }

/// Restriction of phi: M -> N to a submodule S -> M whose image lies in the submodule T -> N.
inline UMorphism restrict_morphism(const UMorphism& phi, const Submodule& S, const Submodule& T) {
  GradedMatrix out;
  for (const auto& [m, B] : S.inclusion.blocks()) {
    ExactMatrix img = phi.block(m) * B;
    if (img.is_zero()) continue;
    auto sol = T.inclusion.block(m).solve(img);
    if (!sol) throw std::invalid_argument("restrict_morphism: image leaves the target submodule");
    out[m] = *sol;
  }
  return UMorphism(S.module, T.module, std::move(out));
}

/// Map induced on quotients M/A -> N/B by phi: M -> N with phi(A) in B.
inline UMorphism induced_on_quotients(const UMorphism& phi, const Quotient& QM, const Quotient& QN) {
  GradedMatrix out;
  for (const auto& [m, sec] : QM.section) {
    ExactMatrix blk = QN.projection.block(m) * phi.block(m) * sec;
    if (!blk.is_zero()) out[m] = blk;
  }
  return UMorphism(QM.module, QN.module, std::move(out));
}

}  // namespace tiltlab
