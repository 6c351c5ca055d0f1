/**
 * @file qnumbers.hpp
 * @brief Quantum integers and Gaussian binomials, evaluated at zeta.
 *
 * Binomials are computed in Z[v, v^-1] by exact polynomial division and only
 * then specialised at v = zeta, so vanishing quantum factorials never appear
 * as divisors.
 */
#pragma once

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tiltlab/cyclotomic.hpp"

namespace tiltlab {

/// Laurent polynomial in v with integer coefficients.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  static LaurentPoly monomial(int exp, long c = 1) {
    LaurentPoly p;
    if (c != 0) p.terms_[exp] = c;
    return p;
  }

  const std::map<int, mpz_class>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e, c);
    return a;
  }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e, -c);
    return a;
  }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.terms_ == b.terms_; }

  /// Exact division by a divisor with unit leading coefficient; throws if it does not divide.
  LaurentPoly exact_div(const LaurentPoly& d) const {
    if (d.is_zero()) throw ArithmeticError("Laurent polynomial division by zero");
    const int dtop = d.terms_.rbegin()->first;
    const int dspan = dtop - d.terms_.begin()->first;
    const mpz_class& dlead = d.terms_.rbegin()->second;
    LaurentPoly rem = *this;
    LaurentPoly quot;
    while (!rem.is_zero()) {
      const int rtop = rem.terms_.rbegin()->first;
      const mpz_class rlead = rem.terms_.rbegin()->second;
      if (rtop - rem.terms_.begin()->first < dspan || rlead % dlead != 0) {
        throw ArithmeticError("Laurent polynomial division is not exact");
      }
      LaurentPoly q;
      q.terms_[rtop - dtop] = rlead / dlead;
      quot = quot + q;
      rem = rem - q * d;
    }
    return quot;
  }

  Cyclo evaluate(const CyclotomicField* f) const {
    Cyclo r(f);
    for (const auto& [e, c] : terms_) r += Cyclo::zeta_pow(f, ((e % f->ell()) + f->ell()) % f->ell()).scaled(mpq_class(c));
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!s.empty()) s += " + ";
      s += it->second.get_str() + "*v^" + std::to_string(it->first);
    }
    return s;
  }

 private:
  void add_term(int e, const mpz_class& c) {
    auto& slot = terms_[e];
    slot += c;
    if (slot == 0) terms_.erase(e);
  }

  std::map<int, mpz_class> terms_;
};

/// [n]_v = (v^n - v^-n)/(v - v^-1) as a Laurent polynomial.
inline LaurentPoly quantum_integer_poly(int n) {
  LaurentPoly p;
  int m = n < 0 ? -n : n;
  for (int j = 0; j < m; ++j) p = p + LaurentPoly::monomial(m - 1 - 2 * j);
  if (n < 0) p = LaurentPoly() - p;
  return p;
}

/// Symmetric Gaussian binomial [n choose k]_v for 0 <= k <= n.
inline LaurentPoly gaussian_binomial_poly(int n, int k) {
  if (k < 0 || k > n) {
    throw std::invalid_argument("gaussian binomial requires 0 <= k <= n, got n=" + std::to_string(n) +
                                " k=" + std::to_string(k));
  }
  LaurentPoly r = LaurentPoly::monomial(0);
  for (int i = 1; i <= k; ++i) r = (r * quantum_integer_poly(n - k + i)).exact_div(quantum_integer_poly(i));
  return r;
}

inline Cyclo quantum_integer(int n, const CyclotomicField* f) { return quantum_integer_poly(n).evaluate(f); }

inline Cyclo quantum_binomial(int n, int k, const CyclotomicField* f) {
  return gaussian_binomial_poly(n, k).evaluate(f);
}

/// [n]! evaluated at zeta (zero once n >= l).
inline Cyclo quantum_factorial(int n, const CyclotomicField* f) {
  Cyclo r = Cyclo::one(f);
  for (int i = 2; i <= n; ++i) r = r * quantum_integer(i, f);
  return r;
}

}  // namespace tiltlab
