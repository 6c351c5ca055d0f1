#include <gtest/gtest.h>

#include <algorithm>
#include <queue>

#include "tiltlab/alcove.hpp"

using namespace tiltlab::alcove;

namespace {

// Positive coroots in simple-coroot coordinates, worked out by hand from root lengths.
// A pairing <lambda, beta^vee> is then sum_i c_i lambda_i in fundamental-weight coordinates.
struct HandTable {
  std::string type;
  std::vector<Weight> coroots;
  Weight highest_coroot;
  Weight highest_short_root_weight;  // alpha_0 in fundamental-weight coordinates
};

const std::vector<HandTable>& hand_tables() {
  static const std::vector<HandTable> t{
      {"A1", {{1}}, {1}, {2}},
      {"A2", {{1, 0}, {0, 1}, {1, 1}}, {1, 1}, {1, 1}},
      // B2, alpha_2 short: (a1+a2)^vee = 2a1^vee + a2^vee, (a1+2a2)^vee = a1^vee + a2^vee
      {"B2", {{1, 0}, {0, 1}, {2, 1}, {1, 1}}, {2, 1}, {1, 0}},
      // G2, alpha_1 short: short roots a1, a1+a2, 2a1+a2 have coroots a1^v, a1^v+3a2^v, 2a1^v+3a2^v
      {"G2", {{1, 0}, {0, 1}, {1, 3}, {2, 3}, {1, 1}, {1, 2}}, {2, 3}, {1, 0}},
  };
  return t;
}

long long dot(const Weight& a, const Weight& b) {
  long long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

long long brute_d(const HandTable& t, const Weight& lambda, long long p) {
  long long total = 0;
  for (const auto& c : t.coroots) {
    long long lo = dot(Weight(lambda.size(), 1), c), hi = lo + dot(lambda, c);
    for (long long r = 1; r * p < hi; ++r)
      if (r * p > lo) ++total;
  }
  return total;
}

bool brute_regular(const HandTable& t, const Weight& lambda, long long p) {
  for (const auto& c : t.coroots) {
    long long v = dot(lambda, c) + dot(Weight(lambda.size(), 1), c);
    if (v % p == 0) return false;
  }
  return true;
}

bool brute_negligible(const HandTable& t, const Weight& lambda, long long p) {
  return dot(lambda, t.highest_coroot) + dot(Weight(lambda.size(), 1), t.highest_coroot) >= p;
}

std::pair<Weight, Weight> brute_steinberg(const Weight& lambda, long long p) {
  // search lambda_1 in the box; exactly one choice leaves a p-restricted remainder
  Weight l0(lambda.size()), l1(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    int found = 0;
    for (long long q = 0; q * p <= lambda[i]; ++q)
      if (lambda[i] - q * p < p) {
        l1[i] = q;
        l0[i] = lambda[i] - q * p;
        ++found;
      }
    EXPECT_EQ(found, 1);
  }
  return {l0, l1};
}

template <class Fn>
void for_box(int rank, long long radius, Fn&& fn) {
  Weight w(rank, 0);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == rank) {
      fn(w);
      return;
    }
    for (long long x = 0; x <= radius; ++x) {
      w[i] = x;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
}

// Dominant dot-orbit members with <mu, alpha_0^vee> <= bound, by breadth-first search on the
// affine reflections s_1..s_n and s_(alpha_0, p) applied to lambda + rho inside a large box.
std::vector<Weight> brute_orbit(const RootSystemData& R, const HandTable& t, const Weight& lambda, long long p,
                                long long bound) {
  const int n = R.rank;
  const long long box = 6 * (bound + p + 2);
  std::set<Weight> seen;
  std::queue<Weight> q;
  Weight start = lambda;
  for (auto& x : start) x += 1;
  q.push(start);
  seen.insert(start);
  auto reflect = [&](const Weight& x, const Weight& root_w, long long pairing_value, long long shift) {
    Weight y = x;
    for (int i = 0; i < n; ++i) y[i] -= (pairing_value - shift) * root_w[i];
    return y;
  };
  while (!q.empty()) {
    Weight x = q.front();
    q.pop();
    std::vector<Weight> next;
    for (int i = 0; i < n; ++i) {
      Weight alpha(n);
      for (int k = 0; k < n; ++k) alpha[k] = R.cartan[k][i];
      next.push_back(reflect(x, alpha, x[i], 0));
    }
    next.push_back(reflect(x, t.highest_short_root_weight, dot(x, t.highest_coroot), p));
    for (auto& y : next) {
      bool inside = true;
      for (long long c : y) inside &= std::llabs(c) <= box;
      if (inside && seen.insert(y).second) q.push(y);
    }
  }
  std::vector<Weight> out;
  for (const auto& x : seen) {
    Weight mu = x;
    bool dominant = true;
    for (auto& c : mu) {
      c -= 1;
      dominant &= c >= 0;
    }
    if (dominant && dot(mu, t.highest_coroot) <= bound) out.push_back(mu);
  }
  return out;
}

std::set<Weight> as_set(const std::vector<Weight>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(RootSystems, HandTablesMatchReflectionClosure) {
  for (const auto& t : hand_tables()) {
    auto R = build_root_system(t.type);
    EXPECT_EQ(as_set(R.positive_coroots), as_set(t.coroots)) << t.type;
    EXPECT_EQ(R.highest_coroot, t.highest_coroot) << t.type;
  }
}

TEST(RootSystems, CountsAndCoxeterNumbers) {
  struct Row {
    std::string type;
    int roots, h;
  };
  std::vector<Row> rows{{"A1", 1, 2},  {"A2", 3, 3},  {"A4", 10, 5},  {"B2", 4, 4},  {"B3", 9, 6},
                        {"C3", 9, 6},  {"C4", 16, 8}, {"D4", 12, 6},  {"D5", 20, 8}, {"E6", 36, 12},
                        {"E7", 63, 18}, {"E8", 120, 30}, {"F4", 24, 12}, {"G2", 6, 6}};
  for (const auto& r : rows) {
    auto R = build_root_system(r.type);
    EXPECT_EQ(static_cast<int>(R.positive_roots.size()), r.roots) << r.type;
    EXPECT_EQ(static_cast<int>(R.positive_roots.size()), classical_positive_root_count(r.type[0], R.rank)) << r.type;
    EXPECT_EQ(R.coxeter_number, r.h) << r.type;
    for (int i = 0; i < R.rank; ++i) {
      Weight simple(R.rank, 0);
      simple[i] = 1;
      EXPECT_EQ(pairing(R.rho, simple), 1);
    }
  }
}

TEST(RootSystems, InvalidTypesThrow) {
  for (const char* bad : {"", "Z3", "A0", "B1", "D3", "E5", "F3", "G3", "A2x"})
    EXPECT_THROW(build_root_system(bad), std::invalid_argument) << bad;
}

TEST(HyperplaneCount, Examples) {
  auto A1 = build_root_system("A1"), A2 = build_root_system("A2");
  for (long long p : {2, 3, 5, 7}) EXPECT_EQ(separating_hyperplane_count(A2, {0, 0}, p), 0);
  EXPECT_EQ(separating_hyperplane_count(A1, {3}, 3), 1);
  EXPECT_EQ(separating_hyperplane_count(A1, {6}, 3), 2);
  EXPECT_EQ(separating_hyperplane_count(A1, {12}, 3), 4);
  EXPECT_EQ(separating_hyperplane_count(A2, {3, 3}, 5), 1);
}

TEST(Regularity, Examples) {
  auto A1 = build_root_system("A1"), A2 = build_root_system("A2");
  EXPECT_FALSE(is_p_regular(A1, {2}, 3));
  EXPECT_TRUE(is_p_regular(A1, {3}, 3));
  EXPECT_TRUE(is_p_regular(A2, {3, 3}, 5));
}

TEST(Steinberg, Examples) {
  auto A1 = build_root_system("A1"), A2 = build_root_system("A2");
  auto s = steinberg_decompose(A1, {7}, 3);
  EXPECT_EQ(s.restricted, Weight{1});
  EXPECT_EQ(s.twist, Weight{2});
  s = steinberg_decompose(A2, {7, 3}, 5);
  EXPECT_EQ(s.restricted, (Weight{2, 3}));
  EXPECT_EQ(s.twist, (Weight{1, 0}));
  s = steinberg_decompose(A2, {4, 1}, 5);
  EXPECT_EQ(s.restricted, (Weight{4, 1}));
  EXPECT_EQ(s.twist, (Weight{0, 0}));
}

TEST(Negligible, Examples) {
  auto A1 = build_root_system("A1"), A2 = build_root_system("A2");
  EXPECT_TRUE(is_negligible_weight(A1, {2}, 3));
  EXPECT_TRUE(is_negligible_weight(A2, {2, 2}, 5));
  EXPECT_FALSE(is_negligible_weight(A2, {1, 1}, 5));
}

TEST(BruteForce, BoxAgreementForAllRankTwoTypes) {
  for (const auto& t : hand_tables()) {
    auto R = build_root_system(t.type);
    for (long long p : {2, 3, 5, 7}) {
      for_box(R.rank, 3 * p, [&](const Weight& lambda) {
        ASSERT_EQ(separating_hyperplane_count(R, lambda, p), brute_d(t, lambda, p)) << t.type << " p=" << p;
        ASSERT_EQ(is_p_regular(R, lambda, p), brute_regular(t, lambda, p));
        ASSERT_EQ(is_negligible_weight(R, lambda, p), brute_negligible(t, lambda, p));
        auto s = steinberg_decompose(R, lambda, p);
        auto [l0, l1] = brute_steinberg(lambda, p);
        ASSERT_EQ(s.restricted, l0);
        ASSERT_EQ(s.twist, l1);
        // d vanishes exactly when no (beta, r) pair separates
        ASSERT_EQ(separating_hyperplane_count(R, lambda, p) == 0, brute_d(t, lambda, p) == 0);
      });
    }
  }
}

TEST(Orbits, Examples) {
  auto A1 = build_root_system("A1");
  EXPECT_EQ(dot_orbit(A1, {0}, 3, 14), (std::vector<Weight>{{0}, {4}, {6}, {10}, {12}}));
  EXPECT_EQ(dot_orbit(A1, {2}, 3, 14), (std::vector<Weight>{{2}, {8}, {14}}));
}

TEST(Orbits, ContainLambdaAreSymmetricAndMatchReflectionSearch) {
  for (const auto& t : hand_tables()) {
    auto R = build_root_system(t.type);
    for (long long p : {3, 5}) {
      const long long bound = 2 * p + 2;
      for_box(R.rank, p, [&](const Weight& lambda) {
        if (dot(lambda, t.highest_coroot) > bound) return;
        auto orbit = dot_orbit(R, lambda, p, bound);
        EXPECT_TRUE(std::find(orbit.begin(), orbit.end(), lambda) != orbit.end());
        EXPECT_EQ(as_set(orbit), as_set(brute_orbit(R, t, lambda, p, bound))) << t.type << " p=" << p;
        for (const auto& mu : orbit) {
          auto back = dot_orbit(R, mu, p, bound);
          EXPECT_TRUE(std::find(back.begin(), back.end(), lambda) != back.end());
        }
      });
    }
  }
}

TEST(SteinbergTwist, Examples) {
  auto A1 = build_root_system("A1"), A2 = build_root_system("A2");
  auto e = steinberg_twist_example(A1, 3);
  EXPECT_EQ(e.weight, Weight{6});
  EXPECT_TRUE(e.regularity_checked && e.p_regular && e.negligible);
  e = steinberg_twist_example(A2, 5);
  EXPECT_EQ(e.weight, (Weight{20, 20}));
  EXPECT_TRUE(e.regularity_checked && e.p_regular && e.negligible);
  e = steinberg_twist_example(A1, 2);
  EXPECT_EQ(e.weight, Weight{2});
  EXPECT_TRUE(e.regularity_checked && e.p_regular);
}

TEST(SteinbergTwist, BelowCoxeterNumberTheAssertionIsSkipped) {
  auto G2 = build_root_system("G2");
  auto e = steinberg_twist_example(G2, 5);
  EXPECT_FALSE(e.regularity_checked);
  EXPECT_FALSE(e.notice.empty());
  EXPECT_TRUE(e.negligible);
  for (long long p : {7, 11, 13}) {
    auto f = steinberg_twist_example(G2, p);
    EXPECT_TRUE(f.regularity_checked && f.p_regular && f.negligible) << p;
  }
}

TEST(Weights, ParsingAndDominance) {
  EXPECT_EQ(parse_weight("3,3"), (Weight{3, 3}));
  EXPECT_EQ(parse_weight("7"), Weight{7});
  for (const char* bad : {"", "3,", "a,b", "3;3", "1.5"}) EXPECT_THROW(parse_weight(bad), std::invalid_argument) << bad;
  auto A2 = build_root_system("A2");
  EXPECT_THROW(require_dominant(A2, {1, -1}), std::invalid_argument);
  EXPECT_THROW(require_dominant(A2, {1}), std::invalid_argument);
}
