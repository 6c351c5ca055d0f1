/**
 * @file cyclotomic.hpp
 * @brief Exact arithmetic in the cyclotomic field Q(zeta_l).
 *
 * Elements are stored as rational coefficient vectors of length phi(l) in the
 * power basis 1, z, ..., z^(phi(l)-1), reduced modulo the l-th cyclotomic
 * polynomial. Equality is coefficient comparison.
 */
#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiltlab {

/// Raised on arithmetic misuse (mismatched fields, division by zero).
class ArithmeticError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

using IntPoly = std::vector<mpz_class>;  // little-endian coefficients

inline void trim(IntPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Exact division of integer polynomials where the divisor is monic.
inline IntPoly divide_monic(IntPoly num, const IntPoly& den) {
  trim(num);
  const std::size_t dd = den.size() - 1;
  if (num.size() < den.size()) return {0};
  IntPoly quot(num.size() - dd, 0);
  for (std::size_t k = num.size(); k-- > dd;) {
    mpz_class c = num[k];
    if (c == 0) continue;
    quot[k - dd] = c;
    for (std::size_t j = 0; j <= dd; ++j) num[k - dd + j] -= c * den[j];
  }
  trim(num);
  if (!num.empty()) throw ArithmeticError("cyclotomic polynomial division left a remainder");
  return quot;
}

inline IntPoly cyclotomic_polynomial(int n) {
  // x^n - 1 = prod_{d | n} Phi_d(x)
  IntPoly p(n + 1, 0);
  p[0] = -1;
  p[n] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d == 0) p = divide_monic(p, cyclotomic_polynomial(d));
  }
  return p;
}

}  // namespace detail

/**
 * Field data shared by all elements of Q(zeta_l): the modulus Phi_l, the
 * reductions of z^k for phi <= k < 2 phi - 1 and the powers z^k, 0 <= k < l.
 *
 * Instances are created once per l by `CyclotomicField::get` and live for the
 * whole program; elements refer to them by raw pointer.
 */
class CyclotomicField {
 public:
  static const CyclotomicField* get(int ell) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<CyclotomicField>> registry;
    if (ell < 3 || ell % 2 == 0) {
      throw std::invalid_argument("root of unity order must be odd and >= 3, got " + std::to_string(ell));
    }
    std::lock_guard<std::mutex> lock(mutex);
    auto it = registry.find(ell);
    if (it == registry.end()) {
      it = registry.emplace(ell, std::unique_ptr<CyclotomicField>(new CyclotomicField(ell))).first;
    }
    return it->second.get();
  }

  int ell() const { return ell_; }
  int degree() const { return degree_; }
  const detail::IntPoly& modulus() const { return modulus_; }
  const std::vector<mpq_class>& reduction(int k) const { return reductions_[k - degree_]; }
  const std::vector<mpq_class>& power(int k) const {
    int r = ((k % ell_) + ell_) % ell_;
    return powers_[r];
  }

 private:
  explicit CyclotomicField(int ell) : ell_(ell) {
    modulus_ = detail::cyclotomic_polynomial(ell);
    degree_ = static_cast<int>(modulus_.size()) - 1;
    // z^k mod Phi for k in [deg, 2 deg - 2]
    std::vector<mpq_class> cur(degree_, 0);
    for (int j = 0; j < degree_; ++j) cur[j] = -mpq_class(modulus_[j]);
    for (int k = degree_; k <= 2 * degree_ - 2 || k == degree_; ++k) {
      reductions_.push_back(cur);
      // multiply by z
      mpq_class top = cur[degree_ - 1];
      for (int j = degree_ - 1; j > 0; --j) cur[j] = cur[j - 1];
      cur[0] = 0;
      for (int j = 0; j < degree_; ++j) cur[j] -= top * mpq_class(modulus_[j]);
    }
    std::vector<mpq_class> p(degree_, 0);
    p[0] = 1;
    for (int k = 0; k < ell_; ++k) {
      powers_.push_back(p);
      mpq_class top = p[degree_ - 1];
      for (int j = degree_ - 1; j > 0; --j) p[j] = p[j - 1];
      p[0] = 0;
      for (int j = 0; j < degree_; ++j) p[j] -= top * mpq_class(modulus_[j]);
    }
  }

  int ell_ = 0;
  int degree_ = 0;
  detail::IntPoly modulus_;
  std::vector<std::vector<mpq_class>> reductions_;
  std::vector<std::vector<mpq_class>> powers_;
};

/// An exact element of Q(zeta_l).
class Cyclo {
 public:
  Cyclo() = default;
  explicit Cyclo(const CyclotomicField* field) : field_(field), c_(field->degree(), 0) {}
  Cyclo(const CyclotomicField* field, const mpq_class& q) : Cyclo(field) { c_[0] = q; }
  Cyclo(const CyclotomicField* field, long q) : Cyclo(field) { c_[0] = q; }
  Cyclo(const CyclotomicField* field, std::vector<mpq_class> coeffs) : field_(field), c_(std::move(coeffs)) {
    if (static_cast<int>(c_.size()) != field->degree()) {
      throw std::invalid_argument("coefficient vector length must equal phi(l)");
    }
  }

  static Cyclo zero(const CyclotomicField* f) { return Cyclo(f); }
  static Cyclo one(const CyclotomicField* f) { return Cyclo(f, 1L); }
  /// z^k for any integer k.
  static Cyclo zeta_pow(const CyclotomicField* f, long k) {
    return Cyclo(f, f->power(static_cast<int>(k % f->ell())));
  }

  const CyclotomicField* field() const { return field_; }
  int ell() const { return field_ ? field_->ell() : 0; }
  const std::vector<mpq_class>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (sgn(q) != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t j = 1; j < c_.size(); ++j)
      if (sgn(c_[j]) != 0) return false;
    return true;
  }
  bool is_one() const { return is_rational() && !c_.empty() && c_[0] == 1; }

  Cyclo& operator+=(const Cyclo& o) {
    check(o);
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (sgn(o.c_[j]) != 0) c_[j] += o.c_[j];
    return *this;
  }
  Cyclo& operator-=(const Cyclo& o) {
    check(o);
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (sgn(o.c_[j]) != 0) c_[j] -= o.c_[j];
    return *this;
  }
  Cyclo operator-() const {
    Cyclo r(*this);
    for (auto& q : r.c_) q = -q;
    return r;
  }

  Cyclo& operator*=(const Cyclo& o) {
    *this = *this * o;
    return *this;
  }

  friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
  friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }

  friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
    a.check(b);
    const int n = a.field_->degree();
    if (b.is_rational()) return a.scaled(b.c_[0]);
    if (a.is_rational()) return b.scaled(a.c_[0]);
    std::vector<mpq_class> t(2 * n - 1, 0);
    mpq_class prod;
    for (int i = 0; i < n; ++i) {
      if (sgn(a.c_[i]) == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (sgn(b.c_[j]) == 0) continue;
        mpq_mul(prod.get_mpq_t(), a.c_[i].get_mpq_t(), b.c_[j].get_mpq_t());
        t[i + j] += prod;
      }
    }
    Cyclo r(a.field_);
    for (int j = 0; j < n; ++j) r.c_[j] = t[j];
    for (int k = n; k < 2 * n - 1; ++k) {
      if (sgn(t[k]) == 0) continue;
      const auto& red = a.field_->reduction(k);
      for (int j = 0; j < n; ++j) {
        if (sgn(red[j]) == 0) continue;
        mpq_mul(prod.get_mpq_t(), t[k].get_mpq_t(), red[j].get_mpq_t());
        r.c_[j] += prod;
      }
    }
    return r;
  }

  Cyclo scaled(const mpq_class& q) const {
    Cyclo r(*this);
    if (sgn(q) == 0) {
      for (auto& x : r.c_) x = 0;
    } else if (q != 1) {
      for (auto& x : r.c_)
        if (sgn(x) != 0) x *= q;
    }
    return r;
  }

  /// Multiplicative inverse; throws ArithmeticError on zero.
  Cyclo inverse() const {
    if (is_zero()) throw ArithmeticError("inverse of zero in Q(zeta_" + std::to_string(ell()) + ")");
    if (is_rational()) return Cyclo(field_, mpq_class(1) / c_[0]);
    // Solve (multiplication-by-a matrix) x = e_0 over Q.
    const int n = field_->degree();
    std::vector<std::vector<mpq_class>> m(n, std::vector<mpq_class>(n + 1, 0));
    Cyclo basis(field_);
    for (int j = 0; j < n; ++j) {
      for (auto& x : basis.c_) x = 0;
      basis.c_[j] = 1;
      Cyclo col = *this * basis;
      for (int i = 0; i < n; ++i) m[i][j] = col.c_[i];
    }
    m[0][n] = 1;
    for (int col = 0, row = 0; col < n; ++col, ++row) {
      int piv = row;
      while (piv < n && sgn(m[piv][col]) == 0) ++piv;
      if (piv == n) throw ArithmeticError("singular multiplication matrix in cyclotomic inverse");
      std::swap(m[piv], m[row]);
      mpq_class inv = mpq_class(1) / m[row][col];
      for (int k = col; k <= n; ++k) m[row][k] *= inv;
      for (int i = 0; i < n; ++i) {
        if (i == row || sgn(m[i][col]) == 0) continue;
        mpq_class f = m[i][col];
        for (int k = col; k <= n; ++k) m[i][k] -= f * m[row][k];
      }
    }
    Cyclo r(field_);
    for (int i = 0; i < n; ++i) r.c_[i] = m[i][n];
    return r;
  }

  friend Cyclo operator/(const Cyclo& a, const Cyclo& b) { return a * b.inverse(); }

  friend bool operator==(const Cyclo& a, const Cyclo& b) {
    a.check(b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t j = 0; j < c_.size(); ++j) {
      if (sgn(c_[j]) == 0) continue;
      if (!first) os << (sgn(c_[j]) > 0 ? " + " : " - ");
      else if (sgn(c_[j]) < 0) os << "-";
      mpq_class a = abs(c_[j]);
      if (j == 0) os << a;
      else {
        if (a != 1) os << a << "*";
        os << "z";
        if (j > 1) os << "^" << j;
      }
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  void check(const Cyclo& o) const {
    if (field_ != o.field_) {
      throw ArithmeticError("mismatched cyclotomic fields: l=" + std::to_string(ell()) + " vs l=" +
                            std::to_string(o.ell()));
    }
  }

  const CyclotomicField* field_ = nullptr;
  std::vector<mpq_class> c_;
};

inline std::ostream& operator<<(std::ostream& os, const Cyclo& x) { return os << x.to_string(); }

}  // namespace tiltlab
