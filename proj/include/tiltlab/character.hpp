/**
 * @file character.hpp
 * @brief Formal characters of sl2-type modules: finitely supported maps weight -> multiplicity.
 */
#pragma once

#include <map>
#include <sstream>
#include <string>

namespace tiltlab {

class Character {
 public:
  Character() = default;
  static Character monomial(int weight, long long mult = 1) {
    Character c;
    c.add(weight, mult);
    return c;
  }
  /// Weyl character chi(n) = x^n + x^(n-2) + ... + x^(-n).
  static Character weyl(int n) {
    Character c;
    for (int m = n; m >= -n; m -= 2) c.add(m, 1);
    return c;
  }

  const std::map<int, long long>& coeffs() const { return coeffs_; }
  long long operator[](int w) const {
    auto it = coeffs_.find(w);
    return it == coeffs_.end() ? 0 : it->second;
  }
  bool is_zero() const { return coeffs_.empty(); }
  long long dimension() const {
    long long d = 0;
    for (const auto& [w, m] : coeffs_) d += m;
    return d;
  }
  int max_weight() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
  bool is_nonnegative() const {
    for (const auto& [w, m] : coeffs_)
      if (m < 0) return false;
    return true;
  }

  void add(int weight, long long mult) {
    if (mult == 0) return;
    auto& slot = coeffs_[weight];
    slot += mult;
    if (slot == 0) coeffs_.erase(weight);
  }

  Character& operator+=(const Character& o) {
    for (const auto& [w, m] : o.coeffs_) add(w, m);
    return *this;
  }
  Character& operator-=(const Character& o) {
    for (const auto& [w, m] : o.coeffs_) add(w, -m);
    return *this;
  }
  friend Character operator+(Character a, const Character& b) { return a += b; }
  friend Character operator-(Character a, const Character& b) { return a -= b; }
  friend Character operator*(const Character& a, const Character& b) {
    Character r;
    for (const auto& [wa, ma] : a.coeffs_)
      for (const auto& [wb, mb] : b.coeffs_) r.add(wa + wb, ma * mb);
    return r;
  }
  Character scaled(long long k) const {
    Character r;
    for (const auto& [w, m] : coeffs_) r.add(w, m * k);
    return r;
  }
  friend bool operator==(const Character& a, const Character& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Character& a, const Character& b) { return !(a == b); }

  /// m -> -m
  Character reflected() const {
    Character r;
    for (const auto& [w, m] : coeffs_) r.add(-w, m);
    return r;
  }

  /// Coefficients in the basis of Weyl characters chi(n), n >= 0. Requires a
  /// reflection-symmetric character.
  std::map<int, long long> weyl_coordinates() const {
    std::map<int, long long> out;
    Character rest = *this;
    while (!rest.is_zero()) {
      int top = rest.max_weight();
      long long m = rest[top];
      if (top < 0) break;
      out[top] += m;
      rest -= weyl(top).scaled(m);
    }
    return out;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      if (!first) os << " + ";
      os << it->second << "*x^" << it->first;
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  std::map<int, long long> coeffs_;
};

}  // namespace tiltlab
