#include "litcp/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using litcp::Matrix;
namespace lt = litcp::testing;

TEST(KhatriRao, SmallExample) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{5, 6}, {7, 8}, {9, 10}};
  const Matrix kr = litcp::khatri_rao(a, b);
  const Matrix expected{{5, 12}, {7, 16}, {9, 20}, {15, 24}, {21, 32}, {27, 40}};
  EXPECT_EQ(kr, expected);
}

TEST(KhatriRao, MatchesNestedLoopOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = lt::random_matrix(rng, 1 + trial % 4, 3);
    const Matrix b = lt::random_matrix(rng, 2 + trial % 3, 3);
    EXPECT_LE(lt::max_abs_diff(litcp::khatri_rao(a, b), lt::kron_columns(a, b)), 0.0);
  }
}

TEST(KhatriRao, ColumnMismatchThrows) {
  EXPECT_THROW(litcp::khatri_rao(Matrix(2, 2), Matrix(2, 3)), std::invalid_argument);
}

TEST(Gram, MatchesTransposeProduct) {
  std::mt19937_64 rng(2);
  const Matrix a = lt::random_matrix(rng, 7, 4);
  EXPECT_LE(lt::max_abs_diff(litcp::gram(a), lt::matmul(lt::transpose(a), a)), 1e-14);
}

TEST(Hadamard, ElementwiseAndEmpty) {
  const std::vector<Matrix> ms{Matrix{{1, 2}, {3, 4}}, Matrix{{2, 2}, {2, 0.5}}};
  EXPECT_EQ(litcp::hadamard_all(ms), (Matrix{{2, 4}, {6, 2}}));
  EXPECT_THROW(litcp::hadamard_all(std::span<const Matrix>{}), std::invalid_argument);
}

TEST(SolveGram, RecoversKnownSolution) {
  std::mt19937_64 rng(3);
  const Matrix b = lt::random_matrix(rng, 10, 4);
  const Matrix g = litcp::gram(b);
  const Matrix x = lt::random_matrix(rng, 6, 4);
  const Matrix rhs = lt::matmul(x, g);
  EXPECT_LE(lt::max_abs_diff(litcp::solve_gram(g, rhs), x), 1e-10);
}

TEST(SolveGram, SingularGramDoesNotAbort) {
  // Two identical columns: rank-deficient Gram.
  const Matrix a{{1, 1}, {2, 2}, {3, 3}};
  const Matrix g = litcp::gram(a);
  const Matrix rhs{{14, 14}, {28, 28}};
  const Matrix x = litcp::solve_gram(g, rhs);
  EXPECT_TRUE(x.all_finite());
  // Any least-squares solution reproduces rhs through g.
  EXPECT_LE(lt::max_abs_diff(lt::matmul(x, g), rhs), 1e-6);
}

TEST(SolveGram, ZeroGramGivesZero) {
  const Matrix x = litcp::solve_gram(Matrix(3, 3), Matrix(2, 3, 1.0));
  EXPECT_EQ(x, Matrix(2, 3));
}

TEST(SolveGram, NonFiniteInputThrows) {
  Matrix g = Matrix::identity(2);
  g(0, 1) = NAN;
  EXPECT_THROW(litcp::solve_gram(g, Matrix(1, 2)), std::invalid_argument);
}

TEST(NormalizeL1, ColumnsSumToOne) {
  const Matrix a{{1, -2, 0}, {3, -6, 0}};
  const auto n = litcp::normalize_columns_l1(a);
  EXPECT_DOUBLE_EQ(n.weights[0], 4.0);
  EXPECT_DOUBLE_EQ(n.weights[1], -8.0);
  EXPECT_DOUBLE_EQ(n.weights[2], 0.0);
  EXPECT_DOUBLE_EQ(n.matrix(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(n.matrix(1, 1), 0.75);
  EXPECT_DOUBLE_EQ(n.matrix(0, 2), 0.0);
}

TEST(NormalizeL1, CancellingColumnIsLeftAlone) {
  const Matrix a{{1.0}, {-1.0}};
  const auto n = litcp::normalize_columns_l1(a);
  EXPECT_EQ(n.weights[0], 1.0);
  EXPECT_EQ(n.matrix, a);
}

TEST(NormalizeL1, Idempotent) {
  std::mt19937_64 rng(4);
  const Matrix a = lt::random_matrix(rng, 9, 5, 0.0, 1.0);
  const auto once = litcp::normalize_columns_l1(a);
  const auto twice = litcp::normalize_columns_l1(once.matrix);
  EXPECT_EQ(twice.matrix, once.matrix);
  for (double w : twice.weights) EXPECT_EQ(w, 1.0);
}

TEST(ColumnNorms, Euclidean) {
  const auto n = litcp::column_norms(Matrix{{3, 0}, {4, 0}});
  EXPECT_DOUBLE_EQ(n[0], 5.0);
  EXPECT_DOUBLE_EQ(n[1], 0.0);
}
