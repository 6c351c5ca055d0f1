/**
 * @file alcove.hpp
 * @brief Root-system and alcove combinatorics for all simple types: separating hyperplane counts,
 *        p-regularity, Steinberg decomposition, negligibility and affine dot-orbits.
 *
 * Weights are integer vectors in the fundamental-weight basis. Coroots are stored as coefficient
 * vectors in the simple-coroot basis, so the pairing <lambda, beta^vee> is a plain dot product.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiltlab::alcove {

using Weight = std::vector<long long>;
using IntMatrix = std::vector<std::vector<long long>>;

struct RootSystemData {
  std::string type;
  int rank = 0;
  IntMatrix cartan;                  // cartan[i][j] = <alpha_j, alpha_i^vee>
  std::vector<Weight> positive_roots;    // simple-root coordinates
  std::vector<Weight> positive_coroots;  // simple-coroot coordinates
  std::vector<Weight> simple_roots_weight;  // alpha_j in the fundamental-weight basis
  Weight rho;                        // all ones
  Weight highest_coroot;             // alpha_0^vee, simple-coroot coordinates
  Weight highest_short_root;         // root whose coroot is alpha_0^vee, simple-root coordinates
  int coxeter_number = 0;
  std::vector<IntMatrix> reflections;  // s_i acting on weight coordinates
};

inline long long pairing(const Weight& lambda, const Weight& coroot) {
  long long s = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) s += lambda[i] * coroot[i];
  return s;
}

inline Weight plus_rho(const Weight& lambda) {
  Weight y = lambda;
  for (auto& x : y) x += 1;
  return y;
}

namespace detail {

inline IntMatrix cartan_matrix(char family, int n) {
  IntMatrix A(n, std::vector<long long>(n, 0));
  for (int i = 0; i < n; ++i) A[i][i] = 2;
  auto link = [&](int i, int j) { A[i][j] = A[j][i] = -1; };
  switch (family) {
    case 'A':
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
    case 'B':  // alpha_n short
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      A[n - 1][n - 2] = -2;
      break;
    case 'C':  // alpha_n long
      for (int i = 0; i + 1 < n; ++i) link(i, i + 1);
      A[n - 2][n - 1] = -2;
      break;
    case 'D':
      for (int i = 0; i + 2 < n; ++i) link(i, i + 1);
      link(n - 3, n - 1);
      break;
    case 'E':  // Bourbaki numbering: chain 1-3-4-5-..., node 2 attached to 4
      link(0, 2);
      link(1, 3);
      for (int i = 2; i + 1 < n; ++i) link(i, i + 1);
      break;
    case 'F':  // alpha_1, alpha_2 long
      link(0, 1);
      link(1, 2);
      link(2, 3);
      A[2][1] = -2;
      break;
    case 'G':  // alpha_1 short
      A[0][1] = -3;
      A[1][0] = -1;
      break;
    default:
      throw std::invalid_argument(std::string("unknown root system family ") + family);
  }
  return A;
}

/**
 * Positive roots (simple-root coordinates) paired with their coroots (simple-coroot coordinates),
 * by closure of the simple pairs under simple reflections. Sorted by coroot height.
 */
inline std::vector<std::pair<Weight, Weight>> positive_root_pairs(const IntMatrix& A) {
  const int n = static_cast<int>(A.size());
  std::set<Weight> seen;
  std::vector<std::pair<Weight, Weight>> queue;
  for (int i = 0; i < n; ++i) {
    Weight e(n, 0);
    e[i] = 1;
    seen.insert(e);
    queue.push_back({e, e});
  }
  auto positive = [](const Weight& r) {
    return std::all_of(r.begin(), r.end(), [](long long x) { return x >= 0; }) &&
           std::any_of(r.begin(), r.end(), [](long long x) { return x > 0; });
  };
  for (std::size_t q = 0; q < queue.size(); ++q) {
    auto [b, c] = queue[q];
    for (int i = 0; i < n; ++i) {
      long long bi = 0, ci = 0;  // <b, alpha_i^vee> and <alpha_i, c>
      for (int j = 0; j < n; ++j) {
        bi += A[i][j] * b[j];
        ci += A[j][i] * c[j];
      }
      Weight rb = b, rc = c;
      rb[i] -= bi;
      rc[i] -= ci;
      if (positive(rb) && seen.insert(rb).second) queue.push_back({rb, rc});
    }
  }
  std::sort(queue.begin(), queue.end(), [](const auto& x, const auto& y) {
    long long hx = std::accumulate(x.second.begin(), x.second.end(), 0LL);
    long long hy = std::accumulate(y.second.begin(), y.second.end(), 0LL);
    return hx != hy ? hx < hy : x.second < y.second;
  });
  return queue;
}

}  // namespace detail

/// Parses labels such as "A2", "B3", "G2", "E8".
inline RootSystemData build_root_system(const std::string& type) {
  if (type.size() < 2 || !std::isalpha(static_cast<unsigned char>(type[0])))
    throw std::invalid_argument("invalid root system type '" + type + "'");
  char family = static_cast<char>(std::toupper(static_cast<unsigned char>(type[0])));
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(type.substr(1), &used);
    if (used != type.size() - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid root system type '" + type + "'");
  }
  bool valid = (family == 'A' && n >= 1) || (family == 'B' && n >= 2) || (family == 'C' && n >= 2) ||
               (family == 'D' && n >= 4) || (family == 'E' && n >= 6 && n <= 8) || (family == 'F' && n == 4) ||
               (family == 'G' && n == 2);
  if (!valid) throw std::invalid_argument("invalid root system type '" + type + "'");

  RootSystemData R;
  R.type = std::string(1, family) + std::to_string(n);
  R.rank = n;
  R.cartan = detail::cartan_matrix(family, n);
  for (const auto& [root, coroot] : detail::positive_root_pairs(R.cartan)) {
    R.positive_roots.push_back(root);
    R.positive_coroots.push_back(coroot);
  }
  R.rho = Weight(n, 1);
  R.highest_coroot = R.positive_coroots.back();
  R.highest_short_root = R.positive_roots.back();
  R.coxeter_number = static_cast<int>(pairing(R.rho, R.highest_coroot)) + 1;
  for (int j = 0; j < n; ++j) {
    Weight a(n);
    for (int i = 0; i < n; ++i) a[i] = R.cartan[i][j];
    R.simple_roots_weight.push_back(a);
  }
  for (int i = 0; i < n; ++i) {
    IntMatrix S(n, std::vector<long long>(n, 0));
    for (int r = 0; r < n; ++r) S[r][r] = 1;
    // s_i(x) = x - x_i alpha_i
    for (int r = 0; r < n; ++r) S[r][i] -= R.simple_roots_weight[i][r];
    R.reflections.push_back(S);
  }
  return R;
}

/// Classical count of positive roots per type.
inline int classical_positive_root_count(char family, int n) {
  switch (family) {
    case 'A': return n * (n + 1) / 2;
    case 'B':
    case 'C': return n * n;
    case 'D': return n * (n - 1);
    case 'E': return n == 6 ? 36 : n == 7 ? 63 : 120;
    case 'F': return 24;
    case 'G': return 6;
  }
  throw std::invalid_argument("unknown family");
}

inline void require_dominant(const RootSystemData& R, const Weight& lambda) {
  if (static_cast<int>(lambda.size()) != R.rank)
    throw std::invalid_argument("weight has " + std::to_string(lambda.size()) + " coordinates, type " + R.type + " needs " +
                                std::to_string(R.rank));
  for (long long x : lambda)
    if (x < 0) throw std::invalid_argument("weight is not dominant");
}

/// d(lambda) = sum over positive coroots of #{r >= 1 : <rho, b> < r p < <lambda + rho, b>}.
inline long long separating_hyperplane_count(const RootSystemData& R, const Weight& lambda, long long p) {
  require_dominant(R, lambda);
  if (p < 1) throw std::invalid_argument("p must be positive");
  Weight y = plus_rho(lambda);
  long long total = 0;
  for (const auto& b : R.positive_coroots) {
    long long lo = pairing(R.rho, b), hi = pairing(y, b);
    // r with lo < rp < hi: r in (lo/p, hi/p)
    long long count = (hi - 1) / p - lo / p;
    if (count > 0) total += count;
  }
  return total;
}

inline bool is_p_regular(const RootSystemData& R, const Weight& lambda, long long p) {
  require_dominant(R, lambda);
  Weight y = plus_rho(lambda);
  for (const auto& b : R.positive_coroots)
    if (pairing(y, b) % p == 0) return false;
  return true;
}

struct SteinbergDecomposition {
  Weight restricted;  // lambda_0, all coordinates < p
  Weight twist;       // lambda_1
};

inline SteinbergDecomposition steinberg_decompose(const RootSystemData& R, const Weight& lambda, long long p) {
  require_dominant(R, lambda);
  SteinbergDecomposition s;
  for (long long x : lambda) {
    s.restricted.push_back(x % p);
    s.twist.push_back(x / p);
  }
  return s;
}

inline bool is_negligible_weight(const RootSystemData& R, const Weight& lambda, long long p) {
  require_dominant(R, lambda);
  return pairing(plus_rho(lambda), R.highest_coroot) >= p;
}

/**
 * Representative of the W_p-orbit of y (a weight shifted by rho) in the closed fundamental
 * alcove {<y, alpha_i^vee> >= 0, <y, alpha_0^vee> <= p}, reached by repeated reflection.
 */
inline Weight fundamental_alcove_representative(const RootSystemData& R, Weight y, long long p) {
  const int n = R.rank;
  // alpha_0 in weight coordinates
  Weight a0(n, 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a0[i] += R.highest_short_root[j] * R.simple_roots_weight[j][i];
  for (;;) {
    bool moved = false;
    for (int i = 0; i < n; ++i)
      if (y[i] < 0) {
        long long c = y[i];
        for (int r = 0; r < n; ++r) y[r] -= c * R.simple_roots_weight[i][r];
        moved = true;
      }
    long long h = pairing(y, R.highest_coroot);
    if (h > p) {
      // affine reflection in <y, alpha_0^vee> = p
      long long c = h - p;
      for (int r = 0; r < n; ++r) y[r] -= c * a0[r];
      moved = true;
    }
    if (!moved) return y;
  }
}

/// Dominant mu with <mu, alpha_0^vee> <= bound and mu + rho in W_p(lambda + rho).
inline std::vector<Weight> dot_orbit(const RootSystemData& R, const Weight& lambda, long long p, long long bound) {
  require_dominant(R, lambda);
  const int n = R.rank;
  Weight target = fundamental_alcove_representative(R, plus_rho(lambda), p);
  std::vector<Weight> out;
  Weight mu(n, 0);
  // enumerate dominant mu in the simplex <mu, alpha_0^vee> <= bound (all coroot coefficients are >= 1)
  auto rec = [&](auto&& self, int i, long long used) -> void {
    if (i == n) {
      if (fundamental_alcove_representative(R, plus_rho(mu), p) == target) out.push_back(mu);
      return;
    }
    for (long long x = 0; used + x * R.highest_coroot[i] <= bound; ++x) {
      mu[i] = x;
      self(self, i + 1, used + x * R.highest_coroot[i]);
    }
    mu[i] = 0;
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end(), [&](const Weight& a, const Weight& b) {
    long long ha = pairing(a, R.highest_coroot), hb = pairing(b, R.highest_coroot);
    return ha != hb ? ha < hb : a < b;
  });
  return out;
}

struct SteinbergTwistExample {
  Weight weight;             // (p^2 - p) rho
  bool regularity_checked = false;
  bool p_regular = false;
  bool negligible = false;
  std::string notice;
};

inline SteinbergTwistExample steinberg_twist_example(const RootSystemData& R, long long p) {
  SteinbergTwistExample ex;
  ex.weight = Weight(R.rank, p * p - p);
  ex.negligible = is_negligible_weight(R, ex.weight, p);
  if (p >= R.coxeter_number) {
    ex.regularity_checked = true;
    ex.p_regular = is_p_regular(R, ex.weight, p);
  } else {
    ex.p_regular = is_p_regular(R, ex.weight, p);
    ex.notice = "p < h = " + std::to_string(R.coxeter_number) + ": regularity is not asserted";
  }
  return ex;
}

/// Parses "3,3" into a weight.
inline Weight parse_weight(const std::string& s) {
  Weight w;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      long long v = std::stoll(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("trailing");
      w.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed weight '" + s + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return w;
}

}  // namespace tiltlab::alcove
