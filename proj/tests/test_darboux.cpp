#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "chiral/darboux.hpp"
#include "chiral/su2.hpp"

using namespace chiral;

namespace {

const Complex I(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

double diff(const Matrix& a, const Matrix& b) { return frobenius_norm(a - b); }

Grid small_grid(double h = 1e-4) {
  Grid g;
  g.nt = g.nx = 9;
  g.h = h;
  return g;
}

SpectralData su2_data(double theta) { return su2::su2_spectral(theta); }

}  // namespace

TEST(BuildM, ParticularSolution) {
  const SeedSolution seed = make_seed_su2(1.0, 1.0);
  const double theta = 0.9;
  const Complex mu = std::polar(1.0, theta);
  const SpacetimePoint x{0.7, -0.4};
  auto w = [&](Complex l) { return std::exp(I * (x.xplus / (1.0 - l) + x.xminus / (1.0 + l))); };
  const Matrix expected{{w(mu), w(std::conj(mu))}, {-1.0 / w(mu), 1.0 / w(std::conj(mu))}};
  EXPECT_LT(diff(build_M(seed, su2_data(theta), x), expected), 1e-14);
  // V(lambda, 0) = I, so the columns are the kets.
  EXPECT_LT(diff(build_M(seed, su2_data(theta), {0.0, 0.0}), Matrix{{1.0, 1.0}, {-1.0, 1.0}}), 1e-15);
}

TEST(SpectralData, Validation) {
  SpectralData d = su2_data(1.0);
  EXPECT_NO_THROW(d.validate(2));
  EXPECT_THROW(d.validate(3), DimensionError);
  d.lambdas[0] = 1.0;
  EXPECT_THROW(d.validate(2), DomainError);
  d = su2_data(1.0);
  d.kets[1] = Vector{0.0, 0.0};
  EXPECT_THROW(d.validate(2), DomainError);
}

TEST(BuildS, Oracles) {
  const Matrix L = Matrix::diagonal({Complex(0.3, 0.2), -0.5});
  EXPECT_LT(diff(build_S(Matrix::identity(2), L), L), 1e-15);
  std::mt19937_64 rng(3);
  const Matrix M = random_block(rng, 2) + Matrix::identity(2);
  const Matrix S = build_S(M, L);
  EXPECT_LT(std::abs(trace(S) - trace(L)), 1e-13);
  EXPECT_LT(std::abs(det(S) - det(L)), 1e-13);
  EXPECT_THROW(build_S(Matrix{{1.0, 1.0}, {1.0, 1.0}}, L), SingularMatrixError);
  const Complex mu = std::polar(1.0, 0.4);
  const Matrix S2 = build_S(build_M(make_seed_su2(1.0, 1.0), su2_data(0.4), {0.2, 0.3}),
                            Matrix::diagonal({mu, std::conj(mu)}));
  EXPECT_NEAR(trace(S2).real(), 2.0 * std::cos(0.4), 1e-14);
}

TEST(DarbouxMatrix, Oracles) {
  const Matrix S{{1.0, 2.0}, {3.0, 4.0}};
  EXPECT_EQ(diff(darboux_matrix(Matrix::zeros(2), 0.7), Matrix::identity(2) * 0.7), 0.0);
  EXPECT_EQ(diff(darboux_matrix(S, 0.0), -S), 0.0);
}

TEST(Transform, OneStepAtOrigin) {
  // theta = pi/2 at x = 0: g~ = -S g = [[0, i], [i, 0]].
  const DarbouxChain chain = su2::su2_chain(1.0, 1.0, {kPi / 2});
  const ChainState st = iterate_product(chain, 0.0, {0.0, 0.0});
  EXPECT_LT(diff(st.g, Matrix{{0.0, I}, {I, 0.0}}), 1e-15);
  EXPECT_LT(diff(st.jplus, Matrix{{0.0, 1.0}, {-1.0, 0.0}}), 1e-15);
}

TEST(Transform, TwoCurrentRoutesAgree) {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 10; ++s) {
    const Matrix M = random_block(rng, 2) + Matrix::identity(2);
    const Matrix L = Matrix::diagonal({Complex(0.2, 0.6), Complex(-0.3, 0.1)});
    const Matrix j = random_block(rng, 2);
    for (LightCone d : {LightCone::plus, LightCone::minus})
      EXPECT_LT(relative_difference(transform_current(M, L, j, d),
                                    transform_current_via_S(build_S(M, L), j, d)),
                1e-12);
  }
}

TEST(Transform, SConditionsAndCovariance) {
  const Solution seed = seed_solution(make_seed_su2(1.0, 1.0));
  const DarbouxStep step = make_step(seed, su2_data(kPi / 3));
  const SConditionResidual r = s_conditions_residual(seed, step, small_grid());
  EXPECT_LT(r.plus.value, 1e-6);
  EXPECT_LT(r.minus.value, 1e-6);
  EXPECT_LT(r.trace_plus.value, 1e-10);
  EXPECT_LT(r.trace_minus.value, 1e-10);
  const LaxResidual route = current_route_residual(seed, step, small_grid());
  EXPECT_LT(route.max(), 1e-6);
  const Solution next = transform_state(seed, step);
  EXPECT_LT(lax_residual(next, 0.5, small_grid()).max(), 1e-5);
  EXPECT_LT(eom_residual(next, small_grid()).max(), 1e-5);
}

TEST(Transform, SConditionsSecondOrder) {
  const Solution seed = seed_solution(make_seed_su2(1.0, 1.0));
  const DarbouxStep step = make_step(seed, su2_data(kPi / 3));
  const double a = s_conditions_residual(seed, step, small_grid(4e-4)).plus.value;
  const double b = s_conditions_residual(seed, step, small_grid(2e-4)).plus.value;
  EXPECT_NEAR(std::log2(a / b), 2.0, 0.1);
}

TEST(Transform, CommutingConstantS) {
  // M = I makes S = Lambda constant; with diagonal j the S-conditions hold exactly.
  const Solution seed = seed_solution(make_seed_su2(1.0, 1.0));
  DarbouxStep step{su2_data(0.5), Matrix::diagonal({Complex(0.2, 0.1), 0.4}),
                   [](SpacetimePoint) { return Matrix::identity(2); }};
  const SConditionResidual r = s_conditions_residual(seed, step, small_grid());
  EXPECT_LT(r.plus.value, 1e-12);
  EXPECT_LT(r.minus.value, 1e-12);
}

TEST(Unitarity, UnimodularSpectrum) {
  const Solution seed = seed_solution(make_seed_su2(1.0, 1.0));
  const DarbouxStep step = make_step(seed, su2_data(2.0));
  const UnitarityResidual u = unitarity_checks(seed, step, small_grid(), {0.0, 0.5, Complex(0.3, 0.4)});
  EXPECT_LT(u.sum.value, 1e-10);
  EXPECT_LT(u.product.value, 1e-10);
  EXPECT_LT(u.reality.value, 1e-10);
  EXPECT_LT(u.similarity_trace.value, 1e-10);
  EXPECT_LT(u.similarity_det.value, 1e-10);
}

TEST(Unitarity, RequiresConjugatePair) {
  const Solution seed = seed_solution(make_seed_su2(1.0, 1.0));
  SpectralData d = su2_data(1.0);
  d.lambdas[1] = Complex(0.1, 0.2);
  const DarbouxStep step = make_step(seed, d);
  EXPECT_THROW(unitarity_checks(seed, step, small_grid(), {}), DomainError);
}

TEST(Projector, MatchesSimilarityForm) {
  const SeedSolution seed = make_seed_su2(1.3, -0.7);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double theta : {0.4, kPi / 2, 2.5, 4.0}) {
    const SpectralData d = su2_data(theta);
    for (int s = 0; s < 10; ++s) {
      const SpacetimePoint x{u(rng), u(rng)};
      const Matrix M = build_M(seed, d, x);
      const ProjectorForm pf = projector_path(M, d);
      EXPECT_LT(diff(pf.P * pf.P, pf.P), 1e-12);
      EXPECT_LT(diff(adjoint(pf.P), pf.P), 1e-12);
      const Matrix S = build_S(M, d.Lambda());
      EXPECT_LT(diff(pf.S, S), 1e-10);
      // D(0) = -S, i.e. g~ g^-1 = -conj(mu) (P_perp + (mu / conj mu) P).
      const Matrix id = Matrix::identity(2);
      const Matrix alt = -pf.mu_bar() * ((id - pf.P) + (pf.mu / pf.mu_bar()) * pf.P);
      EXPECT_LT(diff(pf.darboux(0.0), alt), 1e-12);
      EXPECT_LT(diff(pf.darboux(0.0), -S), 1e-10);
    }
  }
}

class ChainEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ChainEquivalence, QdetAndProjectorMatchProduct) {
  const std::size_t K = GetParam();
  const DarbouxChain full = su2::su2_chain(1.0, 1.0, {kPi / 3, kPi / 2, 2 * kPi / 3, 1.1});
  const DarbouxChain chain = full.prefix(K);
  std::mt19937_64 rng(100 + K);
  std::uniform_real_distribution<double> u(-4.0, 4.0), ul(-0.9, 0.9);
  for (int s = 0; s < 20; ++s) {
    const SpacetimePoint x{u(rng), u(rng)};
    const Complex l(ul(rng), ul(rng));
    const ChainState a = iterate_product(chain, l, x);
    const QdetState b = iterate_qdet(chain, l, x);
    const ChainState c = iterate_projector(chain, l, x);
    EXPECT_LT(relative_difference(a.V, b.V), 1e-9);
    EXPECT_LT(relative_difference(a.g, b.g), 1e-9);
    EXPECT_LT(relative_difference(a.Fplus, b.Fplus), 1e-9);
    EXPECT_LT(relative_difference(a.Fminus, b.Fminus), 1e-9);
    EXPECT_LT(relative_difference(a.jplus, b.jplus), 1e-9);
    EXPECT_LT(relative_difference(a.jminus, b.jminus), 1e-9);
    EXPECT_LT(relative_difference(a.V, c.V), 1e-9);
    EXPECT_LT(relative_difference(a.g, c.g), 1e-9);
    EXPECT_LT(relative_difference(a.jplus, c.jplus), 1e-9);
    EXPECT_LT(relative_difference(a.jminus, c.jminus), 1e-9);
    EXPECT_LT(std::abs(trace(a.jplus)), 1e-10);
    EXPECT_LT(diff(adjoint(a.g) * a.g, Matrix::identity(2)), 1e-10);
    EXPECT_LT(std::abs(det(a.g) - 1.0), 1e-10);
    EXPECT_LT(b.condition, 1e6);
  }
}

INSTANTIATE_TEST_SUITE_P(K, ChainEquivalence, ::testing::Values(1u, 2u, 3u, 4u));

TEST(Chain, SequentialTransformMatchesFrame) {
  // Dressing by explicit make_step on the transformed state reproduces the
  // chain's internal dressing.
  const DarbouxChain chain = su2::su2_chain(1.0, 1.0, {kPi / 3, kPi / 2});
  const Solution s0 = seed_solution(chain.base());
  const Solution s1 = transform_state(s0, make_step(s0, chain.spectral(0)));
  const Solution s2 = transform_state(s1, make_step(s1, chain.spectral(1)));
  const SpacetimePoint x{0.6, -1.1};
  const ChainState st = iterate_product(chain, Complex(0.2, 0.3), x);
  EXPECT_LT(relative_difference(s2.V(Complex(0.2, 0.3), x), st.V), 1e-12);
  EXPECT_LT(relative_difference(s2.jplus(x), st.jplus), 1e-12);
  EXPECT_LT(relative_difference(s2.jminus(x), st.jminus), 1e-12);
}

TEST(Chain, CovarianceAfterThreeSteps) {
  const auto chain = std::make_shared<const DarbouxChain>(
      su2::su2_chain(1.0, 1.0, {kPi / 3, kPi / 2, 2 * kPi / 3}));
  const Solution s = chain_solution(chain);
  EXPECT_LT(lax_residual(s, Complex(0.3, 0.4), small_grid()).max(), 1e-5);
  EXPECT_LT(eom_residual(s, small_grid()).max(), 1e-5);
}

TEST(Chain, DuplicateEigenvaluesAreDegenerate) {
  const DarbouxChain chain = su2::su2_chain(1.0, 1.0, {kPi / 2, kPi / 2});
  EXPECT_FALSE(qdet_condition(chain, {0.3, 0.2}) < 1e6);
  EXPECT_THROW(iterate_product(chain, 0.0, {0.3, 0.2}), SingularMatrixError);
}

TEST(Chain, GeneralU3Seed) {
  // Non-unimodular spectrum on a U(3) seed: only the generic routes apply.
  const SeedSolution seed({1.0, 0.5, -1.5}, {0.3, -0.2, -0.1});
  SpectralData d{{Complex(0.2, 0.5), Complex(-0.3, 0.2), Complex(0.1, -0.6)},
                 {Vector{1.0, 0.5, 0.2}, Vector{0.1, 1.0, -0.3}, Vector{0.4, -0.2, 1.0}}};
  SpectralData e{{Complex(0.5, 0.1), Complex(-0.1, -0.4), Complex(0.3, 0.3)},
                 {Vector{1.0, 0.0, 0.3}, Vector{0.2, 1.0, 0.0}, Vector{0.0, 0.4, 1.0}}};
  const DarbouxChain chain(seed, {d, e});
  const SpacetimePoint x{0.4, 0.9};
  const ChainState a = iterate_product(chain, Complex(0.1, 0.2), x);
  const QdetState b = iterate_qdet(chain, Complex(0.1, 0.2), x);
  EXPECT_LT(relative_difference(a.V, b.V), 1e-9);
  EXPECT_LT(relative_difference(a.jminus, b.jminus), 1e-9);
  EXPECT_THROW(iterate_projector(chain, 0.0, x), DomainError);
  EXPECT_LT(lax_residual(chain_solution(chain), 0.0, small_grid()).max(), 1e-5);
}
