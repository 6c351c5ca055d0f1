#include <gtest/gtest.h>

#include "tiltlab/ideals.hpp"

using namespace tiltlab;

namespace {

std::set<int> range(int a, int b) {
  std::set<int> s;
  for (int n = a; n <= b; ++n) s.insert(n);
  return s;
}

// Tensor labels of T(m) (x) T(n) obtained from an explicit module decomposition.
std::map<int, int> labels_by_decomposition(int ell, int m, int n) {
  auto P = tensor_module(*tilting_module(ell, m), *tilting_module(ell, n));
  return decompose_indecomposables(P).tilting_multiplicities();
}

// Every subset of [0, W] closed under tensoring, found by exhaustive search.
std::vector<std::set<int>> brute_force_ideals(int ell, int W) {
  std::vector<std::vector<std::set<int>>> table(W + 1, std::vector<std::set<int>>(W + 1));
  for (int m = 0; m <= W; ++m)
    for (int n = 0; n <= W; ++n)
      for (const auto& [k, mult] : tilting_tensor_labels(ell, m, n))
        if (k <= W) table[m][n].insert(k);
  std::vector<std::set<int>> out;
  for (unsigned mask = 0; mask < (1u << (W + 1)); ++mask) {
    bool closed = true;
    for (int m = 0; m <= W && closed; ++m) {
      if (!(mask >> m & 1)) continue;
      for (int n = 0; n <= W && closed; ++n)
        for (int k : table[m][n])
          if (!(mask >> k & 1)) {
            closed = false;
            break;
          }
    }
    if (!closed) continue;
    std::set<int> s;
    for (int k = 0; k <= W; ++k)
      if (mask >> k & 1) s.insert(k);
    out.push_back(s);
  }
  return out;
}

SampledSES explicit_ses_delta_three() {
  auto B = weyl_module(3, 3);
  ExactMatrix v(B->field(), B->dim(), 1);
  v(B->offset(1), 0) = Cyclo::one(B->field());
  auto A = submodule_generated(B, {v});
  auto C = quotient_module(B, A.inclusion);
  SampledSES s;
  s.description = "L(1) -> Delta(3) -> L(3)";
  s.A = A.module;
  s.B = B;
  s.C = C.module;
  s.inclusion = A.inclusion;
  s.projection = C.projection;
  return s;
}

}  // namespace

TEST(TensorLabels, CharacterLabelsMatchExplicitDecompositions) {
  for (int ell : {3, 5})
    for (int m = 0; m <= 5; ++m)
      for (int n = m; n <= 5; ++n)
        EXPECT_EQ(tilting_tensor_labels(ell, m, n), labels_by_decomposition(ell, m, n)) << ell << ": " << m << "x" << n;
}

TEST(Generate, UnitGeneratesEverything) {
  for (int ell : {3, 5}) EXPECT_TRUE(generate_tilt_ideal({0}, ell, 12).is_full());
}

TEST(Generate, TTwoAndTThreeGenerateTheNegligibles) {
  EXPECT_EQ(generate_tilt_ideal({2}, 3, 12).members, range(2, 12));
  EXPECT_EQ(generate_tilt_ideal({3}, 3, 12).members, range(2, 12));
  EXPECT_EQ(generate_tilt_ideal({3}, 3, 12).to_string(), "{2..12}");
}

TEST(Generate, GeneratedIdealsAreFixedPoints) {
  for (int g = 0; g <= 12; ++g) {
    auto I = generate_tilt_ideal({g}, 3, 12);
    EXPECT_EQ(generate_tilt_ideal(I.members, 3, 12), I);
    EXPECT_FALSE(I.certificate.empty());
  }
}

TEST(Generate, GeneratorsOutsideTheWindowAreRejected) {
  EXPECT_THROW(generate_tilt_ideal({13}, 3, 12), std::invalid_argument);
  EXPECT_THROW(generate_tilt_ideal({-1}, 3, 12), std::invalid_argument);
}

TEST(Enumerate, ThreeIdealsAtThreeAndFive) {
  for (int ell : {3, 5}) {
    auto ideals = enumerate_tilt_ideals(ell, 12);
    ASSERT_EQ(ideals.size(), 3u) << ell;
    EXPECT_TRUE(ideals[0].is_empty());
    EXPECT_EQ(ideals[1].members, negligible_set(ell, 12));
    EXPECT_EQ(ideals[1].members, range(ell - 1, 12));
    EXPECT_TRUE(ideals[2].is_full());
  }
}

TEST(Enumerate, AgreesWithExhaustiveSubsetSearch) {
  for (int ell : {3, 5, 7}) {
    auto brute = brute_force_ideals(ell, 12);
    auto ideals = enumerate_tilt_ideals(ell, 12);
    std::set<std::set<int>> a(brute.begin(), brute.end()), b;
    for (const auto& I : ideals) b.insert(I.members);
    EXPECT_EQ(a, b) << ell;
  }
}

TEST(Enumerate, EmptyAndFullAlwaysPresent) {
  for (int ell : {3, 5, 7, 9}) {
    auto ideals = enumerate_tilt_ideals(ell, 2 * (ell - 1));
    bool empty = false, full = false;
    for (const auto& I : ideals) {
      empty |= I.is_empty();
      full |= I.is_full();
    }
    EXPECT_TRUE(empty && full) << ell;
  }
}

TEST(Negligible, WindowPredicate) {
  EXPECT_TRUE(is_negligible_window(2, 3));
  EXPECT_FALSE(is_negligible_window(1, 3));
  EXPECT_TRUE(is_negligible_window(4, 5));
  EXPECT_EQ(enumerate_tilt_ideals(5, 12)[1].members, range(4, 12));
}

TEST(Primality, Examples) {
  auto ideals = enumerate_tilt_ideals(3, 12);
  EXPECT_TRUE(is_prime_on_window(ideals[1]));
  EXPECT_TRUE(is_prime_on_window(ideals[0]));
  EXPECT_THROW(is_prime_on_window(ideals[2]), std::invalid_argument);
}

TEST(Primality, NonPrimeSetReportsWitness) {
  // {3..12} at l = 3: T(1) (x) T(2) = T(3) although neither factor is in the set
  TiltIdeal I;
  I.ell = 3;
  I.W = 12;
  I.members = range(3, 12);
  I.extended = range(3, 24);
  std::pair<int, int> w{-1, -1};
  EXPECT_FALSE(is_prime_on_window(I, &w));
  EXPECT_EQ(w, (std::pair<int, int>{1, 2}));
  for (const auto& [k, m] : tilting_tensor_labels(3, w.first, w.second)) EXPECT_TRUE(I.contains(k));
}

TEST(Membership, Examples) {
  auto ideals = enumerate_tilt_ideals(3, 12);
  RepIdealHandle none{ideals[0]}, neg{ideals[1]};
  EXPECT_TRUE(rep_ideal_membership(neg, tilting_module(3, 2)));
  EXPECT_FALSE(rep_ideal_membership(neg, simple_module(3, 3)));
  EXPECT_TRUE(rep_ideal_membership(none, UModule::zero(CyclotomicField::get(3))));
  EXPECT_FALSE(rep_ideal_membership(none, trivial_module(CyclotomicField::get(3))));
}

TEST(Membership, LabelsBeyondTheWindowOverflow) {
  RepIdealHandle J{generate_tilt_ideal({2}, 3, 4)};
  try {
    rep_ideal_membership(J, tilting_module(3, 7));
    FAIL() << "expected WindowOverflow";
  } catch (const WindowOverflow& e) {
    EXPECT_EQ(e.label(), 7);
  }
}

TEST(Membership, MonotoneInTheIdeal) {
  auto ideals = enumerate_tilt_ideals(3, 12);
  for (const auto& p : standard_pool(3, 6)) {
    bool prev = false;
    for (const auto& I : ideals) {
      bool cur = RepIdealHandle{I}.contains(p.module);
      EXPECT_TRUE(!prev || cur) << p.name;
      prev = cur;
    }
  }
}

TEST(IntersectWithTilt, RecoversTheIdeal) {
  auto ideals = enumerate_tilt_ideals(3, 12);
  EXPECT_EQ(intersect_with_tilt(RepIdealHandle{ideals[2]}, 12), range(0, 12));
  EXPECT_EQ(intersect_with_tilt(RepIdealHandle{ideals[1]}, 12), range(2, 12));
  EXPECT_TRUE(intersect_with_tilt(RepIdealHandle{ideals[0]}, 12).empty());
}

TEST(TwoOfThree, ExplicitSequenceIsVacuouslyConsistent) {
  auto s = explicit_ses_delta_three();
  ASSERT_TRUE(s.is_exact());
  EXPECT_EQ(s.A->dim(), 2);
  EXPECT_EQ(s.C->dim(), 2);
  auto rep = verify_two_out_of_three(RepIdealHandle{enumerate_tilt_ideals(3, 12)[1]}, {s});
  ASSERT_EQ(rep.cases.size(), 1u);
  EXPECT_EQ(rep.cases[0].member, (std::array<bool, 3>{false, false, false}));
  EXPECT_EQ(rep.violations(), 0);
}

TEST(TwoOfThree, SampledSequencesWithTwoMembersHaveAThird) {
  auto sample = sample_ses(3, 60, 0x5e5);
  for (const auto& s : sample) ASSERT_TRUE(s.is_exact()) << s.description;
  auto rep = verify_two_out_of_three(RepIdealHandle{enumerate_tilt_ideals(3, 12)[1]}, sample);
  EXPECT_EQ(rep.violations(), 0);
  int all_three = 0;
  for (const auto& c : rep.cases) all_three += c.member[0] && c.member[1] && c.member[2];
  EXPECT_GT(all_three, 0);
}

TEST(TwoOfThree, FullIdealContainsEverything) {
  auto sample = sample_ses(3, 20, 11);
  auto rep = verify_two_out_of_three(RepIdealHandle{enumerate_tilt_ideals(3, 12)[2]}, sample);
  for (const auto& c : rep.cases) EXPECT_EQ(c.member, (std::array<bool, 3>{true, true, true}));
}

TEST(Bijection, StandardPoolPasses) {
  auto pool = standard_pool(3, 6);
  EXPECT_EQ(pool.size(), 28u);
  auto rep = verify_bijection(3, 12, pool);
  for (const auto& f : rep.failures) ADD_FAILURE() << f;
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.round_trip.size(), 3u);
  EXPECT_GT(rep.intersection_checks, 0);
  EXPECT_GT(rep.minimality_checks, 0);
}

TEST(Bijection, SeparationWitnesses) {
  auto rep = verify_bijection(3, 12, standard_pool(3, 2));
  std::map<std::pair<int, int>, int> w;
  for (const auto& [i, j, n] : rep.separation) w[{i, j}] = n;
  EXPECT_EQ((w[{0, 1}]), 2);  // empty vs negligible
  EXPECT_EQ((w[{1, 2}]), 0);  // negligible vs full
}

TEST(Bijection, IntersectionsAgreeWithConjunction) {
  auto ideals = enumerate_tilt_ideals(5, 12);
  auto pool = standard_pool(5, 6);
  for (const auto& I : ideals)
    for (const auto& J : ideals) {
      RepIdealHandle both{intersect(I, J)}, a{I}, b{J};
      for (const auto& p : pool)
        EXPECT_EQ(both.contains(p.module), a.contains(p.module) && b.contains(p.module)) << p.name;
    }
}
