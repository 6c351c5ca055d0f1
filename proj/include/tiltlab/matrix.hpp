/**
 * @file matrix.hpp
 * @brief Dense matrices over Q(zeta_l) with pivoted Gaussian elimination.
 */
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tiltlab/cyclotomic.hpp"

namespace tiltlab {

class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(const CyclotomicField* f, int rows, int cols)
      : field_(f), rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, Cyclo(f)) {}

  static ExactMatrix identity(const CyclotomicField* f, int n) {
    ExactMatrix m(f, n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Cyclo::one(f);
    return m;
  }

  const CyclotomicField* field() const { return field_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Cyclo& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Cyclo& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool is_zero() const {
    for (const auto& x : data_)
      if (!x.is_zero()) return false;
    return true;
  }

  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (std::size_t k = 0; k < a.data_.size(); ++k)
      if (a.data_[k] != b.data_[k]) return false;
    return true;
  }
  friend bool operator!=(const ExactMatrix& a, const ExactMatrix& b) { return !(a == b); }

  ExactMatrix& operator+=(const ExactMatrix& o) {
    same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k)
      if (!o.data_[k].is_zero()) data_[k] += o.data_[k];
    return *this;
  }
  ExactMatrix& operator-=(const ExactMatrix& o) {
    same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k)
      if (!o.data_[k].is_zero()) data_[k] -= o.data_[k];
    return *this;
  }
  friend ExactMatrix operator+(ExactMatrix a, const ExactMatrix& b) { return a += b; }
  friend ExactMatrix operator-(ExactMatrix a, const ExactMatrix& b) { return a -= b; }
  ExactMatrix operator-() const {
    ExactMatrix r(*this);
    for (auto& x : r.data_)
      if (!x.is_zero()) x = -x;
    return r;
  }

  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw std::invalid_argument("matrix product shape mismatch " + a.shape() + " * " + b.shape());
    }
    const CyclotomicField* f = a.field_ ? a.field_ : b.field_;
    ExactMatrix r(f, a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int k = 0; k < a.cols_; ++k) {
        const Cyclo& x = a(i, k);
        if (x.is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) {
          const Cyclo& y = b(k, j);
          if (y.is_zero()) continue;
          r(i, j) += x * y;
        }
      }
    }
    return r;
  }

  ExactMatrix scaled(const Cyclo& s) const {
    ExactMatrix r(*this);
    for (auto& x : r.data_)
      if (!x.is_zero()) x = x * s;
    return r;
  }

  ExactMatrix transpose() const {
    ExactMatrix r(field_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  ExactMatrix block(int r0, int c0, int nr, int nc) const {
    ExactMatrix r(field_, nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
  }
  void set_block(int r0, int c0, const ExactMatrix& b) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }
  ExactMatrix column(int j) const { return block(0, j, rows_, 1); }
  ExactMatrix select_columns(const std::vector<int>& idx) const {
    ExactMatrix r(field_, rows_, static_cast<int>(idx.size()));
    for (int i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < idx.size(); ++k) r(i, static_cast<int>(k)) = (*this)(i, idx[k]);
    return r;
  }
  ExactMatrix select_rows(const std::vector<int>& idx) const {
    ExactMatrix r(field_, static_cast<int>(idx.size()), cols_);
    for (std::size_t k = 0; k < idx.size(); ++k)
      for (int j = 0; j < cols_; ++j) r(static_cast<int>(k), j) = (*this)(idx[k], j);
    return r;
  }

  static ExactMatrix hstack(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.rows_ != b.rows_) throw std::invalid_argument("hstack row mismatch");
    ExactMatrix r(a.field_ ? a.field_ : b.field_, a.rows_, a.cols_ + b.cols_);
    r.set_block(0, 0, a);
    r.set_block(0, a.cols_, b);
    return r;
  }
  static ExactMatrix vstack(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.cols_ != b.cols_) throw std::invalid_argument("vstack column mismatch");
    ExactMatrix r(a.field_ ? a.field_ : b.field_, a.rows_ + b.rows_, a.cols_);
    r.set_block(0, 0, a);
    r.set_block(a.rows_, 0, b);
    return r;
  }

  /// In-place reduced row echelon form; returns pivot columns.
  std::vector<int> rref_in_place() {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < cols_ && row < rows_; ++col) {
      int piv = -1;
      for (int i = row; i < rows_; ++i)
        if (!(*this)(i, col).is_zero()) {
          piv = i;
          break;
        }
      if (piv < 0) continue;
      if (piv != row)
        for (int j = 0; j < cols_; ++j) std::swap((*this)(piv, j), (*this)(row, j));
      Cyclo inv = (*this)(row, col).inverse();
      for (int j = col; j < cols_; ++j)
        if (!(*this)(row, j).is_zero()) (*this)(row, j) = (*this)(row, j) * inv;
      for (int i = 0; i < rows_; ++i) {
        if (i == row) continue;
        Cyclo f = (*this)(i, col);
        if (f.is_zero()) continue;
        for (int j = col; j < cols_; ++j) {
          const Cyclo& y = (*this)(row, j);
          if (!y.is_zero()) (*this)(i, j) -= f * y;
        }
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  ExactMatrix rref(std::vector<int>* pivots = nullptr) const {
    ExactMatrix r(*this);
    auto p = r.rref_in_place();
    if (pivots) *pivots = std::move(p);
    return r;
  }

  int rank() const {
    ExactMatrix r(*this);
    return static_cast<int>(r.rref_in_place().size());
  }

  /// Columns form a basis of the right kernel, in echelon normal form.
  ExactMatrix kernel() const {
    std::vector<int> piv;
    ExactMatrix r = rref(&piv);
    std::vector<char> is_piv(cols_, 0);
    for (int p : piv) is_piv[p] = 1;
    std::vector<int> free;
    for (int j = 0; j < cols_; ++j)
      if (!is_piv[j]) free.push_back(j);
    ExactMatrix k(field_, cols_, static_cast<int>(free.size()));
    for (std::size_t t = 0; t < free.size(); ++t) {
      int fj = free[t];
      k(fj, static_cast<int>(t)) = Cyclo::one(field_);
      for (std::size_t i = 0; i < piv.size(); ++i) {
        const Cyclo& v = r(static_cast<int>(i), fj);
        if (!v.is_zero()) k(piv[i], static_cast<int>(t)) = -v;
      }
    }
    return k;
  }

  /// Basis of the column space, as the pivot columns of the matrix itself.
  ExactMatrix image() const {
    std::vector<int> piv;
    rref(&piv);
    return select_columns(piv);
  }

  /// Canonical basis of the column space: transposed RREF of the transpose.
  ExactMatrix column_space_echelon() const {
    std::vector<int> piv;
    ExactMatrix r = transpose().rref(&piv);
    return r.block(0, 0, static_cast<int>(piv.size()), rows_).transpose();
  }

  /// Solve this * x = b; nullopt when inconsistent.
  std::optional<ExactMatrix> solve(const ExactMatrix& b) const {
    if (b.rows_ != rows_) throw std::invalid_argument("solve: right-hand side row mismatch");
    ExactMatrix aug = hstack(*this, b);
    std::vector<int> piv = aug.rref_in_place();
    ExactMatrix x(field_, cols_, b.cols_);
    for (std::size_t i = 0; i < piv.size(); ++i) {
      if (piv[i] >= cols_) return std::nullopt;
      for (int j = 0; j < b.cols_; ++j) x(piv[i], j) = aug(static_cast<int>(i), cols_ + j);
    }
    return x;
  }

  std::optional<ExactMatrix> inverse() const {
    if (rows_ != cols_) return std::nullopt;
    ExactMatrix aug = hstack(*this, identity(field_, rows_));
    std::vector<int> piv = aug.rref_in_place();
    if (static_cast<int>(piv.size()) < rows_ || (rows_ > 0 && piv[rows_ - 1] >= cols_)) return std::nullopt;
    return aug.block(0, cols_, rows_, cols_);
  }

  Cyclo determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
    ExactMatrix r(*this);
    Cyclo det = Cyclo::one(field_);
    for (int col = 0; col < cols_; ++col) {
      int piv = -1;
      for (int i = col; i < rows_; ++i)
        if (!r(i, col).is_zero()) {
          piv = i;
          break;
        }
      if (piv < 0) return Cyclo::zero(field_);
      if (piv != col) {
        for (int j = 0; j < cols_; ++j) std::swap(r(piv, j), r(col, j));
        det = -det;
      }
      det = det * r(col, col);
      Cyclo inv = r(col, col).inverse();
      for (int i = col + 1; i < rows_; ++i) {
        Cyclo f = r(i, col) * inv;
        if (f.is_zero()) continue;
        for (int j = col; j < cols_; ++j)
          if (!r(col, j).is_zero()) r(i, j) -= f * r(col, j);
      }
    }
    return det;
  }

  Cyclo trace() const {
    Cyclo t = Cyclo::zero(field_);
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void same_shape(const ExactMatrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("matrix ") + op + " shape mismatch " + shape() + " vs " + o.shape());
  }

  const CyclotomicField* field_ = nullptr;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Cyclo> data_;
};

enum class SolveMode { kernel, image, rank, solve };

/// Outcome of `solve_linear`. `basis` holds kernel or image columns, `solution`
/// is empty when a right-hand side admits no solution.
struct LinearResult {
  int rank = 0;
  ExactMatrix basis;
  std::optional<ExactMatrix> solution;
  bool consistent = true;
};

inline LinearResult solve_linear(const ExactMatrix& a, SolveMode mode, const ExactMatrix* rhs = nullptr) {
  LinearResult r;
  switch (mode) {
    case SolveMode::kernel:
      r.basis = a.kernel();
      r.rank = a.cols() - r.basis.cols();
      break;
    case SolveMode::image:
      r.basis = a.column_space_echelon();
      r.rank = r.basis.cols();
      break;
    case SolveMode::rank:
      r.rank = a.rank();
      break;
    case SolveMode::solve:
      if (!rhs) throw std::invalid_argument("solve_linear: solve mode needs a right-hand side");
      r.solution = a.solve(*rhs);
      r.consistent = r.solution.has_value();
      r.rank = a.rank();
      break;
  }
  return r;
}

/**
 * Incremental row reduction over sparse rows. Rows are appended one at a time
 * and kept in echelon form keyed by pivot column; redundant rows are dropped
 * on arrival. Used for large, sparse homogeneous systems (Hom spaces).
 */
class SparseEliminator {
 public:
  using Row = std::vector<std::pair<int, Cyclo>>;  // sorted by column

  SparseEliminator(const CyclotomicField* f, int ncols) : field_(f), ncols_(ncols), pivot_row_(ncols, -1) {}

  int ncols() const { return ncols_; }
  int rank() const { return static_cast<int>(rows_.size()); }

  /// Returns true if the row increased the rank.
  bool add_row(Row row) {
    normalize(row);
    while (!row.empty()) {
      int lead = row.front().first;
      int pr = pivot_row_[lead];
      if (pr < 0) break;
      Cyclo f = row.front().second;
      row = axpy(row, rows_[pr], -f);
    }
    if (row.empty()) return false;
    Cyclo inv = row.front().second.inverse();
    for (auto& [c, v] : row) v = v * inv;
    pivot_row_[row.front().first] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(row));
    return true;
  }

  /// Kernel basis vectors (dense, length ncols).
  std::vector<std::vector<Cyclo>> kernel() {
    back_substitute();
    std::vector<std::vector<Cyclo>> out;
    for (int j = 0; j < ncols_; ++j) {
      if (pivot_row_[j] >= 0) continue;
      std::vector<Cyclo> v(ncols_, Cyclo(field_));
      v[j] = Cyclo::one(field_);
      for (const auto& r : rows_) {
        auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const std::pair<int, Cyclo>& e, int c) { return e.first < c; });
        if (it != r.end() && it->first == j) v[r.front().first] = -it->second;
      }
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  void normalize(Row& row) const {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Row merged;
    for (auto& e : row) {
      if (!merged.empty() && merged.back().first == e.first) merged.back().second += e.second;
      else merged.push_back(std::move(e));
    }
    Row out;
    for (auto& e : merged)
      if (!e.second.is_zero()) out.push_back(std::move(e));
    row = std::move(out);
  }

  // a + s * b, both sorted
  static Row axpy(const Row& a, const Row& b, const Cyclo& s) {
    Row out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        out.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        out.emplace_back(b[j].first, b[j].second * s);
        ++j;
      } else {
        Cyclo v = a[i].second + b[j].second * s;
        if (!v.is_zero()) out.emplace_back(a[i].first, std::move(v));
        ++i;
        ++j;
      }
    }
    return out;
  }

  void back_substitute() {
    // Process rows in decreasing pivot order so every row ends fully reduced.
    std::vector<int> order(rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) order[k] = static_cast<int>(k);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return rows_[a].front().first > rows_[b].front().first; });
    for (int idx : order) {
      Row& r = rows_[idx];
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t t = 1; t < r.size(); ++t) {
          int c = r[t].first;
          int pr = pivot_row_[c];
          if (pr >= 0 && pr != idx) {
            Cyclo f = r[t].second;
            r = axpy(r, rows_[pr], -f);
            changed = true;
            break;
          }
        }
      }
    }
  }

  const CyclotomicField* field_;
  int ncols_;
  std::vector<int> pivot_row_;
  std::vector<Row> rows_;
};

}  // namespace tiltlab
