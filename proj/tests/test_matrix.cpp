#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "chiral/matrix.hpp"
#include "chiral/quasidet.hpp"

using namespace chiral;

namespace {

const Complex I(0.0, 1.0);

void expect_near(const Matrix& a, const Matrix& b, double tol = 1e-14) {
  ASSERT_EQ(a.size(), b.size());
  EXPECT_LE(frobenius_norm(a - b), tol) << "difference " << frobenius_norm(a - b);
}

}  // namespace

TEST(Matrix, MultiplyOracles) {
  const Matrix x{{1.0, 2.0}, {I, 3.0}};
  expect_near(Matrix::identity(2) * x, x, 0.0);
  expect_near(Matrix::diagonal({2.0, 3.0}) * Matrix::diagonal({5.0, 7.0}),
              Matrix::diagonal({10.0, 21.0}), 0.0);
  const Matrix s{{0.0, I}, {I, 0.0}};
  expect_near(s * s, Matrix{{-1.0, 0.0}, {0.0, -1.0}}, 0.0);
}

TEST(Matrix, MultiplyRejectsMismatch) {
  EXPECT_THROW(Matrix::identity(2) * Matrix::identity(3), DimensionError);
  EXPECT_THROW(Matrix::identity(2) + Matrix::identity(3), DimensionError);
}

TEST(Matrix, InvertOracles) {
  expect_near(invert(Matrix::identity(3)), Matrix::identity(3));
  expect_near(invert(Matrix::diagonal({2.0, I})), Matrix::diagonal({0.5, -I}));
  expect_near(invert(Matrix{{1.0, 1.0}, {0.0, 1.0}}), Matrix{{1.0, -1.0}, {0.0, 1.0}});
}

TEST(Matrix, InvertSingularThrows) {
  EXPECT_THROW(invert(Matrix{{1.0, 2.0}, {2.0, 4.0}}), SingularMatrixError);
  EXPECT_THROW(invert(Matrix::zeros(2)), SingularMatrixError);
  // The gate is relative to the row scale, so a uniformly tiny matrix inverts.
  EXPECT_NO_THROW(invert(Matrix::identity(2) * 1e-20));
  EXPECT_THROW(invert(Matrix{{1.0, 0.0}, {0.0, 1e-13}}), SingularMatrixError);
}

TEST(Matrix, InvertRoundTripProperty) {
  std::mt19937_64 rng(7);
  for (int s = 0; s < 50; ++s) {
    const Matrix a = random_block(rng, 1 + s % 6) + Matrix::identity(1 + s % 6);
    if (condition_number(a) > 1e8) continue;
    expect_near(a * invert(a), Matrix::identity(a.size()), 1e-10);
    expect_near(invert(a) * a, Matrix::identity(a.size()), 1e-10);
  }
}

TEST(Matrix, AdjointOracles) {
  const Matrix sym{{1.0, 2.0}, {2.0, 5.0}};
  expect_near(adjoint(sym), sym, 0.0);
  expect_near(adjoint(Matrix{{0.0, I}, {I, 0.0}}), Matrix{{0.0, -I}, {-I, 0.0}}, 0.0);
  std::mt19937_64 rng(1);
  const Matrix x = random_block(rng, 4);
  expect_near(adjoint(adjoint(x)), x, 0.0);
}

TEST(Matrix, NormAndDet) {
  EXPECT_EQ(frobenius_norm(Matrix::zeros(3)), 0.0);
  EXPECT_NEAR(frobenius_norm(Matrix::identity(2)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(frobenius_norm(Matrix{{0.0, I}, {-I, 0.0}}), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(det(Matrix::identity(4)) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(det(Matrix{{1.0, 2.0}, {3.0, 4.0}}) + 2.0), 0.0, 1e-14);
  const Complex mu = std::polar(1.0, 0.7);
  EXPECT_NEAR(std::abs(det(Matrix::diagonal({mu, std::conj(mu)})) - 1.0), 0.0, 1e-15);
}

TEST(Matrix, DetMultiplicativeProperty) {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 20; ++s) {
    const Matrix a = random_block(rng, 3), b = random_block(rng, 3);
    const Complex lhs = det(a * b), rhs = det(a) * det(b);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Matrix, ColumnsAndOuter) {
  const Vector a{1.0, I};
  const Matrix m = Matrix::from_columns(std::vector<Vector>{a, Vector{2.0, 3.0}});
  EXPECT_EQ(m.column(0)[1], I);
  EXPECT_EQ(m(0, 1), Complex(2.0));
  // |a><a| / <a|a> is a hermitian projector.
  const Matrix p = outer(a, a) * (1.0 / std::real(inner(a, a)));
  expect_near(p * p, p);
  expect_near(adjoint(p), p);
  EXPECT_NEAR(span_identity_deviation(Matrix::identity(3) * Complex(2.0, 1.0)), 0.0, 1e-15);
  EXPECT_GT(span_identity_deviation(Matrix::diagonal({1.0, 2.0})), 0.5);
}

TEST(Matrix, LiteralMustBeSquare) {
  EXPECT_THROW((Matrix{{1.0, 2.0}, {3.0}}), DimensionError);
}
