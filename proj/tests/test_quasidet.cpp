#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "chiral/quasidet.hpp"

using namespace chiral;

namespace {

void expect_near(const Matrix& a, const Matrix& b, double tol) {
  EXPECT_LE(frobenius_norm(a - b), tol) << "difference " << frobenius_norm(a - b);
}

Matrix scalar(Complex z) { return Matrix{{z}}; }

}  // namespace

TEST(QdetScalar, TwoByTwoOracles) {
  const Matrix x{{1.0, 2.0}, {3.0, 4.0}};
  // 0-based (1,1) is the bottom-right entry: 4 - 3 * 1^-1 * 2.
  EXPECT_NEAR(std::abs(qdet_scalar(x, 1, 1) - Complex(-2.0)), 0.0, 1e-14);
  // (0,0): 1 - 2 * 4^-1 * 3.
  EXPECT_NEAR(std::abs(qdet_scalar(x, 0, 0) - Complex(-0.5)), 0.0, 1e-14);
}

TEST(QdetScalar, MatchesDeterminantRatio) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 3u, 4u, 5u})
    for (int s = 0; s < 20; ++s) {
      const Matrix x = random_block(rng, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const Complex a = qdet_scalar(x, i, j), b = determinant_ratio(x, i, j);
          EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(b));
        }
    }
}

TEST(QdetScalar, Errors) {
  EXPECT_THROW(qdet_scalar(Matrix::identity(1), 0, 0), DimensionError);
  EXPECT_THROW(qdet_scalar(Matrix::identity(2), 2, 0), DimensionError);
  EXPECT_THROW(qdet_scalar(Matrix{{1.0, 2.0}, {3.0, 0.0}}, 0, 0), SingularMatrixError);
}

TEST(QdetBlock, Oracles) {
  const std::size_t n = 2;
  const Matrix id = Matrix::identity(n), zero = Matrix::zeros(n);
  const Matrix c{{1.0, 2.0}, {3.0, 4.0}}, d{{5.0, 6.0}, {7.0, Complex(0.0, 8.0)}};
  expect_near(qdet_block(BlockGrid{{id, zero}, {c, d}}), d, 0.0);
  expect_near(qdet_block(BlockGrid{{2.0 * id, id}, {id, id}}), 0.5 * id, 1e-15);
}

TEST(QdetBlock, OneStepDarbouxForm) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 20; ++s) {
    const Matrix M = random_block(rng, 3);
    const Matrix L = Matrix::diagonal({Complex(0.2, 0.5), Complex(0.3, -0.1), -0.4});
    const Complex lambda(0.1, 0.7);
    const Matrix q = qdet_block(BlockGrid{{M, Matrix::identity(3)},
                                          {M * L, Matrix::identity(3) * lambda}});
    expect_near(q, Matrix::identity(3) * lambda - M * L * invert(M), 1e-10);
  }
}

TEST(QdetBlock, ScalarBlocksReduceToRatio) {
  std::mt19937_64 rng(9);
  for (int s = 0; s < 20; ++s) {
    const Matrix x = random_block(rng, 3);
    BlockGrid g(3, 3, 1);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) g.set(i, j, scalar(x(i, j)));
    g.box(0, 1);
    EXPECT_LE(std::abs(qdet_block(g)(0, 0) - determinant_ratio(x, 0, 1)),
              1e-10 * std::abs(determinant_ratio(x, 0, 1)));
  }
}

TEST(QdetBlock, BoxAnywhere) {
  std::mt19937_64 rng(2);
  const BlockGrid g = random_grid(rng, 2, 2, 2);
  BlockGrid tl = g;
  tl.box(0, 0);
  // |A B; C D|_A = A - B D^-1 C
  expect_near(qdet_block(tl),
              g.block(0, 0) - g.block(0, 1) * invert(g.block(1, 1)) * g.block(1, 0), 1e-12);
}

TEST(QdetIdentities, RandomGridsHold) {
  std::mt19937_64 rng(42);
  std::size_t resamples = 0;
  for (int s = 0; s < 100; ++s) {
    const BlockGrid g = draw_identity_grid(rng, 2, 1e4, resamples);
    EXPECT_LT(check_nc_jacobi(g), 1e-10);
    EXPECT_LT(check_homological(g), 1e-10);
  }
}

TEST(QdetIdentities, CommutingDiagonalBlocks) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  BlockGrid g(3, 3, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      g.set(i, j, Matrix::diagonal({Complex(u(rng), u(rng)), Complex(u(rng), u(rng))}));
  EXPECT_LT(check_nc_jacobi(g), 1e-12);
  EXPECT_LT(check_homological(g), 1e-12);
}

TEST(QdetIdentities, DecoupledBlocks) {
  // B = C = 0 in [E F G; H A B; J C D]: the identity reduces to a 2x2 equality.
  std::mt19937_64 rng(8);
  BlockGrid g = random_grid(rng, 3, 3, 2);
  g.set(1, 2, Matrix::zeros(2));
  g.set(2, 1, Matrix::zeros(2));
  EXPECT_LT(check_nc_jacobi(g), 1e-12);
}

TEST(QdetIdentities, HomologicalWithUnitFactor) {
  // Last column (O, O, I): the grid is its own boxed-O companion and the
  // boxed-D factor is I.
  std::mt19937_64 rng(12);
  BlockGrid g = random_grid(rng, 3, 3, 2);
  g.set(0, 2, Matrix::zeros(2));
  g.set(1, 2, Matrix::zeros(2));
  g.set(2, 2, Matrix::identity(2));
  BlockGrid d = g;
  d.box(2, 2);
  EXPECT_LT(frobenius_norm(qdet_block(d) - Matrix::identity(2)),
            1e-12 * (1.0 + frobenius_norm(qdet_block(d))));
  EXPECT_LT(check_homological(g), 1e-12);
}

TEST(QdetIdentities, RequireThreeByThree) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(check_nc_jacobi(random_grid(rng, 2, 2, 2)), DimensionError);
  EXPECT_THROW(check_homological(random_grid(rng, 2, 3, 2)), DimensionError);
}

TEST(QdetIdentities, DeterministicDraws) {
  std::mt19937_64 a(77), b(77);
  std::size_t ra = 0, rb = 0;
  const BlockGrid ga = draw_identity_grid(a, 2, 1e4, ra);
  const BlockGrid gb = draw_identity_grid(b, 2, 1e4, rb);
  EXPECT_EQ(check_nc_jacobi(ga), check_nc_jacobi(gb));
  EXPECT_EQ(ra, rb);
}
