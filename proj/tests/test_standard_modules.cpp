#include <gtest/gtest.h>

#include <random>
#include <set>

#include "tiltlab/hom.hpp"
#include "tiltlab/standard.hpp"

using namespace tiltlab;

namespace {

// Weyl-character content of T(n) for n < l^2 - 1: either Delta(n) alone (n < l or n at a wall)
// or Delta(n) plus the reflection of n in the wall below it.
std::multiset<int> tilting_weyl_content(int n, int ell) {
  if (n < ell || n % ell == ell - 1) return {n};
  int wall = (n / ell) * ell - 1;
  return {n, 2 * wall - n};
}

std::multiset<int> as_multiset(const std::vector<int>& v) { return {v.begin(), v.end()}; }

// Dimensions of all submodules generated by subsets of the standard basis. For modules whose
// weight spaces are one-dimensional this enumerates every submodule.
std::set<int> proper_nonzero_submodule_dims(const ModulePtr& M, std::set<std::vector<int>>* pivots_seen = nullptr) {
  std::set<int> out;
  const int n = M->dim();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<ExactMatrix> gens;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) {
        ExactMatrix v(M->field(), n, 1);
        v(i, 0) = Cyclo::one(M->field());
        gens.push_back(v);
      }
    auto S = submodule_generated(M, gens);
    int d = S.module->dim();
    if (d == 0 || d == n) continue;
    out.insert(d);
    if (pivots_seen) {
      std::vector<int> piv;
      S.inclusion.dense().transpose().rref(&piv);
      pivots_seen->insert(piv);
    }
  }
  return out;
}

bool nilpotent(const UMorphism& x) {
  UMorphism p = x;
  for (int i = 1; i < x.source()->dim() && !p.is_zero(); i *= 2) p = p * p;
  return p.is_zero();
}

}  // namespace

TEST(WeylModules, DimensionIsNPlusOne) {
  for (int n = 0; n <= 10; ++n) {
    EXPECT_EQ(weyl_module(3, n)->dim(), n + 1);
    EXPECT_EQ(dual_weyl_module(3, n)->dim(), n + 1);
  }
  EXPECT_THROW(weyl_module(3, -1), std::invalid_argument);
}

TEST(WeylModules, DeltaThreeHasAUniqueProperSubmodule) {
  std::set<std::vector<int>> distinct;
  auto dims = proper_nonzero_submodule_dims(weyl_module(3, 3), &distinct);
  EXPECT_EQ(dims, std::set<int>{2});
  EXPECT_EQ(distinct.size(), 1u);
}

TEST(WeylModules, DeltaTwoIsSimpleAtFive) { EXPECT_TRUE(proper_nonzero_submodule_dims(weyl_module(5, 2)).empty()); }

TEST(SimpleModules, BelowTheFirstWallSimplesAreWeylModules) {
  for (int n = 0; n <= 4; ++n) EXPECT_TRUE(are_isomorphic(simple_module(5, n), weyl_module(5, n))) << n;
}

TEST(SimpleModules, SteinbergDimensions) {
  EXPECT_EQ(simple_module(3, 3)->dim(), 2);
  EXPECT_EQ(simple_module(3, 4)->dim(), 4);
  for (int ell : {3, 5})
    for (int n = 0; n <= 14; ++n) {
      int a = n / ell, b = n % ell;
      EXPECT_EQ(simple_module(ell, n)->dim(), (a + 1) * (b + 1)) << "l=" << ell << " n=" << n;
    }
}

TEST(SimpleModules, SimplesHaveNoProperSubmodules) {
  for (int n : {2, 3, 4, 5, 7}) EXPECT_TRUE(proper_nonzero_submodule_dims(simple_module(3, n)).empty()) << n;
}

TEST(TiltingModules, BelowTheFirstWallTiltingsAreWeylModules) {
  for (int n = 0; n <= 4; ++n) EXPECT_TRUE(are_isomorphic(tilting_module(5, n), weyl_module(5, n))) << n;
}

TEST(TiltingModules, TThreeAndTFourAtThree) {
  auto T3 = tilting_module(3, 3), T4 = tilting_module(3, 4);
  EXPECT_EQ(T3->dim(), 6);
  EXPECT_EQ(T4->dim(), 6);
  EXPECT_EQ(T3->character(), Character::weyl(3) + Character::weyl(1));
  EXPECT_EQ(T4->character(), Character::weyl(4) + Character::weyl(0));
}

TEST(TiltingModules, WeylContentMatchesReflectionRule) {
  for (int ell : {3, 5})
    for (int n = 0; n < ell * ell - 1 && n <= 12; ++n) {
      auto T = tilting_module(ell, n);
      auto peel = peel_standard_filtration(T, FiltrationSide::Delta);
      ASSERT_TRUE(peel.ok) << peel.reason;
      EXPECT_EQ(as_multiset(peel.weights), tilting_weyl_content(n, ell)) << "l=" << ell << " n=" << n;
      auto npeel = peel_standard_filtration(T, FiltrationSide::Nabla);
      ASSERT_TRUE(npeel.ok) << npeel.reason;
      EXPECT_EQ(as_multiset(npeel.weights), tilting_weyl_content(n, ell));
    }
}

TEST(TiltingModules, EndomorphismRingsAreLocal) {
  std::mt19937 rng(42);
  for (int ell : {3, 5})
    for (int n = 0; n <= 12; ++n) {
      auto T = tilting_module(ell, n);
      auto E = end_algebra(T);
      ASSERT_FALSE(E.empty());
      std::vector<UMorphism> samples = E;
      for (int t = 0; t < 4; ++t) {
        UMorphism x(T, T);
        for (const auto& b : E) x += b.scaled(Cyclo(T->field(), static_cast<long>(rng() % 7) - 3));
        samples.push_back(x);
      }
      for (const auto& x : samples)
        EXPECT_TRUE(nilpotent(x) || x.is_isomorphism()) << "l=" << ell << " n=" << n;
    }
}

TEST(TiltingModules, HomDimensionsAreSymmetric) {
  for (int ell : {3, 5})
    for (int m = 0; m <= 12; ++m)
      for (int n = m + 1; n <= 12; ++n)
        EXPECT_EQ(hom_dimension(tilting_module(ell, m), tilting_module(ell, n)),
                  hom_dimension(tilting_module(ell, n), tilting_module(ell, m)))
            << "l=" << ell << " " << m << "," << n;
}

TEST(HomSpaces, Examples) {
  EXPECT_EQ(hom_dimension(weyl_module(5, 2), weyl_module(5, 2)), 1);
  EXPECT_EQ(hom_dimension(weyl_module(3, 3), dual_weyl_module(3, 3)), 1);
  EXPECT_EQ(hom_dimension(weyl_module(5, 1), weyl_module(5, 2)), 0);
  for (const auto& h : hom_space(weyl_module(3, 3), dual_weyl_module(3, 3))) EXPECT_TRUE(h.is_intertwiner());
}

TEST(HomSpaces, WeylToDualWeylIsOneDimensionalOnTheDiagonal) {
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 6; ++n)
      EXPECT_EQ(hom_dimension(weyl_module(3, m), dual_weyl_module(3, n)), m == n ? 1 : 0) << m << "," << n;
}

TEST(Decomposition, TTwoIsIndecomposable) {
  auto r = decompose_indecomposables(tilting_module(3, 2));
  EXPECT_EQ(r.tilting_multiplicities(), (std::map<int, int>{{2, 1}}));
}

TEST(Decomposition, TensorProductsAtThree) {
  auto P = tensor_module(*tilting_module(3, 1), *tilting_module(3, 1));
  EXPECT_EQ(decompose_indecomposables(P).tilting_multiplicities(), (std::map<int, int>{{0, 1}, {2, 1}}));
  auto Q = tensor_module(*tilting_module(3, 3), *tilting_module(3, 1));
  // character oracle: (chi3 + chi1) chi1 = chi4 + 2 chi2 + chi0 = ch T(4) + 2 ch T(2)
  EXPECT_EQ(Q->character(), tilting_character(4, 3) + tilting_character(2, 3).scaled(2));
  auto r = decompose_indecomposables(Q);
  EXPECT_EQ(r.tilting_multiplicities(), (std::map<int, int>{{2, 2}, {4, 1}}));
  int total = 0;
  UMorphism sum(Q, Q);
  for (const auto& p : r.parts) {
    total += p.module->dim();
    UMorphism e = p.inclusion * p.projection;
    EXPECT_TRUE(e * e == e);
    sum += e;
  }
  EXPECT_EQ(total, Q->dim());
  EXPECT_TRUE(sum == UMorphism::identity(Q));
}

TEST(Decomposition, KrullSchmidtDoubling) {
  std::mt19937 rng(9);
  for (int t = 0; t < 6; ++t) {
    int ell = (t % 2) ? 5 : 3;
    int a = static_cast<int>(rng() % 5), b = static_cast<int>(rng() % 4);
    auto M = tensor_module(*tilting_module(ell, a), *tilting_module(ell, b));
    auto once = decompose_indecomposables(M).tilting_multiplicities();
    auto twice = decompose_indecomposables(direct_sum(*M, *M)).tilting_multiplicities();
    for (auto& [k, m] : once) m *= 2;
    EXPECT_EQ(twice, once) << "l=" << ell << " T(" << a << ")xT(" << b << ")";
  }
}

TEST(Decomposition, NonTiltingModuleFallsBackToIdempotents) {
  auto M = direct_sum(*simple_module(3, 3), *weyl_module(3, 3));
  auto r = decompose_indecomposables(M);
  EXPECT_EQ(r.status, "ok");
  ASSERT_EQ(r.parts.size(), 2u);
  std::multiset<int> dims;
  for (const auto& p : r.parts) dims.insert(p.module->dim());
  EXPECT_EQ(dims, (std::multiset<int>{2, 4}));
}

TEST(Peeling, Examples) {
  auto t3 = peel_standard_filtration(tilting_module(3, 3), FiltrationSide::Delta);
  ASSERT_TRUE(t3.ok);
  EXPECT_EQ(as_multiset(t3.weights), (std::multiset<int>{1, 3}));
  for (int n = 0; n <= 7; ++n) {
    auto p = peel_standard_filtration(weyl_module(3, n), FiltrationSide::Delta);
    ASSERT_TRUE(p.ok);
    EXPECT_EQ(p.weights, std::vector<int>{n});
  }
  auto l3 = peel_standard_filtration(simple_module(3, 3), FiltrationSide::Delta);
  EXPECT_FALSE(l3.ok);
  EXPECT_FALSE(l3.reason.empty());
  // the character of L(3) is not a nonnegative sum of Weyl characters
  EXPECT_FALSE(weyl_multiplicities(simple_module(3, 3)->character()).has_value());
}

TEST(Peeling, TiltingTestSeparatesStandardObjects) {
  EXPECT_TRUE(is_tilting(tilting_module(3, 5)));
  EXPECT_FALSE(is_tilting(weyl_module(3, 3)));
  EXPECT_FALSE(is_tilting(dual_weyl_module(3, 4)));
  EXPECT_TRUE(is_tilting(weyl_module(3, 2)));
}
