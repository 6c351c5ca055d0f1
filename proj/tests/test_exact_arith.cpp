// Exact arithmetic: Q(zeta_l), quantum integers and binomials, dense linear algebra.
//
// Oracles: floating-point evaluation at exp(2 pi i / l) for field arithmetic, the q-Pascal
// recursion for Gaussian binomials, planted-rank products for rank.

#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "tiltlab/character.hpp"
#include "tiltlab/matrix.hpp"
#include "tiltlab/qnumbers.hpp"

using namespace tiltlab;
using cd = std::complex<double>;

namespace {

constexpr double kNumericTol = 1e-9;  // agreement of exact values with their complex embedding

cd numeric(const Cyclo& x) {
  const double pi = std::acos(-1.0);
  cd z = std::polar(1.0, 2 * pi / x.ell()), acc = 0, p = 1;
  for (const auto& q : x.coeffs()) {
    acc += q.get_d() * p;
    p *= z;
  }
  return acc;
}

Cyclo random_cyclo(std::mt19937& rng, const CyclotomicField* f) {
  std::vector<mpq_class> c;
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  for (int i = 0; i < f->degree(); ++i) {
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    c.push_back(q);
  }
  return Cyclo(f, c);
}

Cyclo zeta(const CyclotomicField* f, long k) { return Cyclo::zeta_pow(f, ((k % f->ell()) + f->ell()) % f->ell()); }

}  // namespace

TEST(Cyclotomic, ZetaTimesZetaToTheLMinusOneIsOne) {
  for (int ell : {3, 5, 7, 9}) {
    const auto* f = CyclotomicField::get(ell);
    EXPECT_TRUE((zeta(f, 1) * zeta(f, ell - 1)).is_one()) << "l=" << ell;
  }
}

TEST(Cyclotomic, PrimitiveCubeRootsSumToMinusOne) {
  const auto* f = CyclotomicField::get(3);
  EXPECT_EQ(zeta(f, 1) + zeta(f, 2), Cyclo(f, -1L));
}

TEST(Cyclotomic, InverseOfOnePlusZeta) {
  const auto* f = CyclotomicField::get(5);
  Cyclo a = Cyclo::one(f) + zeta(f, 1);
  EXPECT_TRUE((a * a.inverse()).is_one());
}

TEST(Cyclotomic, ZetaToTheLIsOneAndCyclotomicPolynomialVanishes) {
  for (int ell : {3, 5, 7, 15}) {
    const auto* f = CyclotomicField::get(ell);
    Cyclo p = Cyclo::one(f);
    for (int i = 0; i < ell; ++i) p = p * zeta(f, 1);
    EXPECT_TRUE(p.is_one());
    // Phi_l(zeta) = 0 via the stored modulus
    Cyclo s(f);
    const auto& phi = f->modulus();
    for (std::size_t k = 0; k < phi.size(); ++k) s += zeta(f, static_cast<long>(k)).scaled(mpq_class(phi[k]));
    EXPECT_TRUE(s.is_zero()) << "l=" << ell;
  }
}

TEST(Cyclotomic, DivisionByZeroAndMismatchedFieldsThrow) {
  const auto* f3 = CyclotomicField::get(3);
  const auto* f5 = CyclotomicField::get(5);
  EXPECT_THROW(Cyclo(f3).inverse(), ArithmeticError);
  EXPECT_THROW(Cyclo(f3, 1L) + Cyclo(f5, 1L), ArithmeticError);
  EXPECT_THROW(CyclotomicField::get(4), std::invalid_argument);
}

TEST(Cyclotomic, FieldAxiomsOnRandomTriplesAgreeWithComplexEmbedding) {
  std::mt19937 rng(20241017);
  for (int ell : {3, 5, 7}) {
    const auto* f = CyclotomicField::get(ell);
    for (int t = 0; t < 40; ++t) {
      Cyclo a = random_cyclo(rng, f), b = random_cyclo(rng, f), c = random_cyclo(rng, f);
      EXPECT_EQ((a * b) * c, a * (b * c));
      EXPECT_EQ(a * (b + c), a * b + a * c);
      EXPECT_EQ(a + b, b + a);
      EXPECT_EQ(a * b, b * a);
      EXPECT_NEAR(std::abs(numeric(a * b) - numeric(a) * numeric(b)), 0.0, kNumericTol);
      EXPECT_NEAR(std::abs(numeric(a - b) - (numeric(a) - numeric(b))), 0.0, kNumericTol);
      if (!a.is_zero()) {
        EXPECT_TRUE((a * a.inverse()).is_one());
        EXPECT_NEAR(std::abs(numeric(a.inverse()) * numeric(a) - 1.0), 0.0, kNumericTol);
      }
    }
  }
}

TEST(QuantumNumbers, QuantumOneIsOne) {
  for (int ell : {3, 5, 7}) EXPECT_TRUE(quantum_integer(1, CyclotomicField::get(ell)).is_one());
}

TEST(QuantumNumbers, QuantumLVanishes) {
  for (int ell : {3, 5, 7}) EXPECT_TRUE(quantum_integer(ell, CyclotomicField::get(ell)).is_zero());
}

TEST(QuantumNumbers, FourChooseOneMatchesBruteLaurentSum) {
  const auto* f = CyclotomicField::get(3);
  Cyclo brute = zeta(f, 3) + zeta(f, 1) + zeta(f, -1) + zeta(f, -3);
  EXPECT_EQ(quantum_binomial(4, 1, f), brute);
  EXPECT_EQ(quantum_integer(4, f), brute);
}

TEST(QuantumNumbers, BinomialsMatchQPascalRecursion) {
  // [n, k] = v^k [n-1, k] + v^-(n-k) [n-1, k-1], evaluated directly in the field
  for (int ell : {3, 5, 7}) {
    const auto* f = CyclotomicField::get(ell);
    const int N = 2 * ell + 3;
    std::vector<std::vector<Cyclo>> P(N + 1);
    for (int n = 0; n <= N; ++n) {
      P[n].assign(n + 1, Cyclo(f));
      P[n][0] = P[n][n] = Cyclo::one(f);
      for (int k = 1; k < n; ++k) P[n][k] = zeta(f, k) * P[n - 1][k] + zeta(f, -(n - k)) * P[n - 1][k - 1];
    }
    for (int n = 0; n <= N; ++n)
      for (int k = 0; k <= n; ++k) EXPECT_EQ(quantum_binomial(n, k, f), P[n][k]) << "l=" << ell << " n=" << n << " k=" << k;
  }
}

TEST(QuantumNumbers, BinomialsBelowLAreNonzero) {
  for (int ell : {3, 5, 7}) {
    const auto* f = CyclotomicField::get(ell);
    for (int n = 0; n < ell; ++n)
      for (int k = 0; k <= n; ++k) EXPECT_FALSE(quantum_binomial(n, k, f).is_zero()) << n << " " << k;
  }
}

TEST(QuantumNumbers, InvalidBinomialArgumentsThrow) {
  const auto* f = CyclotomicField::get(3);
  EXPECT_THROW(quantum_binomial(3, 4, f), std::invalid_argument);
  EXPECT_THROW(quantum_binomial(3, -1, f), std::invalid_argument);
}

TEST(QuantumNumbers, LaurentExactDivisionCancelsBeforeSpecialising) {
  // [l]! / ([1]! [l-1]!) = [l] even though [l]! vanishes at zeta
  const auto* f = CyclotomicField::get(5);
  EXPECT_TRUE(quantum_factorial(5, f).is_zero());
  EXPECT_EQ(quantum_binomial(5, 1, f), quantum_integer(5, f));
  EXPECT_TRUE(quantum_binomial(10, 5, f) == Cyclo(f, 2L));  // quantum Lucas: [10 choose 5] = (2 choose 1)
}

TEST(LinearAlgebra, IdentityHasEmptyKernel) {
  const auto* f = CyclotomicField::get(3);
  auto r = solve_linear(ExactMatrix::identity(f, 3), SolveMode::kernel);
  EXPECT_EQ(r.basis.cols(), 0);
  EXPECT_EQ(r.rank, 3);
}

TEST(LinearAlgebra, ZeroMatrixHasFullKernel) {
  const auto* f = CyclotomicField::get(3);
  auto r = solve_linear(ExactMatrix(f, 2, 3), SolveMode::kernel);
  EXPECT_EQ(r.basis.cols(), 3);
  EXPECT_EQ(r.basis.rank(), 3);
}

TEST(LinearAlgebra, PlantedRankFour) {
  const auto* f = CyclotomicField::get(5);
  std::mt19937 rng(5);
  // B = [I; R1] (6x4) and C = [I | R2] (4x6) have rank 4 by construction
  ExactMatrix B(f, 6, 4), C(f, 4, 6);
  for (int i = 0; i < 4; ++i) B(i, i) = C(i, i) = Cyclo::one(f);
  for (int i = 4; i < 6; ++i)
    for (int j = 0; j < 4; ++j) B(i, j) = random_cyclo(rng, f);
  for (int i = 0; i < 4; ++i)
    for (int j = 4; j < 6; ++j) C(i, j) = random_cyclo(rng, f);
  // scramble with unit lower-triangular matrices on both sides
  ExactMatrix L = ExactMatrix::identity(f, 6), R = ExactMatrix::identity(f, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < i; ++j) {
      L(i, j) = random_cyclo(rng, f);
      R(i, j) = random_cyclo(rng, f);
    }
  ExactMatrix A = L * B * C * R.transpose();
  EXPECT_EQ(solve_linear(A, SolveMode::rank).rank, 4);
  auto K = solve_linear(A, SolveMode::kernel).basis;
  EXPECT_EQ(K.cols(), 2);
  EXPECT_TRUE((A * K).is_zero());
}

TEST(LinearAlgebra, RankNullityOnRandomMatrices) {
  std::mt19937 rng(11);
  const auto* f = CyclotomicField::get(3);
  for (int t = 0; t < 20; ++t) {
    int r = 1 + static_cast<int>(rng() % 6), c = 1 + static_cast<int>(rng() % 6);
    ExactMatrix A(f, r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        if (rng() % 3) A(i, j) = random_cyclo(rng, f);
    ExactMatrix K = A.kernel();
    EXPECT_EQ(A.rank() + K.cols(), c);
    EXPECT_TRUE((A * K).is_zero());
    EXPECT_EQ(K.cols() == 0 ? 0 : K.rank(), K.cols());
  }
}

TEST(LinearAlgebra, InconsistentSolveIsReportedNotThrown) {
  const auto* f = CyclotomicField::get(3);
  ExactMatrix A(f, 2, 1), b(f, 2, 1);
  A(0, 0) = Cyclo::one(f);
  b(1, 0) = Cyclo::one(f);
  auto r = solve_linear(A, SolveMode::solve, &b);
  EXPECT_FALSE(r.consistent);
  EXPECT_FALSE(r.solution.has_value());
  b(0, 0) = Cyclo(f, 3L);
  b(1, 0) = Cyclo(f);
  r = solve_linear(A, SolveMode::solve, &b);
  ASSERT_TRUE(r.consistent);
  EXPECT_EQ(A * *r.solution, b);
}

TEST(LinearAlgebra, InverseAndDeterminant) {
  const auto* f = CyclotomicField::get(7);
  std::mt19937 rng(3);
  ExactMatrix A(f, 4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = random_cyclo(rng, f);
  auto inv = A.inverse();
  ASSERT_TRUE(inv.has_value());
  EXPECT_EQ(A * *inv, ExactMatrix::identity(f, 4));
  EXPECT_NEAR(std::abs(numeric(A.determinant() * inv->determinant()) - 1.0), 0.0, kNumericTol);
}

TEST(Characters, WeylCharactersAndProducts) {
  // chi(1) chi(1) = chi(2) + chi(0) in Weyl coordinates
  Character c = Character::weyl(1) * Character::weyl(1);
  auto coords = c.weyl_coordinates();
  EXPECT_EQ(coords.size(), 2u);
  EXPECT_EQ(coords[2], 1);
  EXPECT_EQ(coords[0], 1);
  EXPECT_EQ(Character::weyl(5).dimension(), 6);
  EXPECT_EQ(Character::weyl(3).reflected(), Character::weyl(3));
}
