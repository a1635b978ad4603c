#pragma once

// Closed-form SU(2) solitons obtained by dressing the vacuum
// g = diag(e^{i(p x+ + q x-)}, e^{-i(p x+ + q x-)}) with mu = e^{i theta}.
// These are analytic oracles for the generic engine in darboux.hpp.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "chiral/darboux.hpp"
#include "chiral/matrix.hpp"
#include "chiral/model.hpp"

namespace chiral::su2 {

/// theta closer than this to a multiple of pi is rejected (mu = +-1 are the
/// Lax-pair poles).
inline constexpr double kThetaGuard = 1e-8;

inline void require_theta(double theta) {
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  const double folded = std::remainder(theta, std::numbers::pi);
  if (std::abs(folded) < kThetaGuard)
    throw DomainError("theta must avoid multiples of pi (mu = e^{i theta} would be +-1)");
}

struct SolitonParams {
  double p = 1.0;
  double q = 1.0;
  double theta = std::numbers::pi / 2;

  Complex mu() const { return std::polar(1.0, theta); }
  void validate() const {
    if (p == 0.0 || q == 0.0) throw DomainError("p and q must be non-zero");
    require_theta(theta);
  }
};

struct TwoSolitonParams {
  double p = 1.0;
  double q = 1.0;
  double theta1 = std::numbers::pi / 3;
  double theta2 = std::numbers::pi / 2;

  SolitonParams first() const { return {p, q, theta1}; }
  SolitonParams second() const { return {p, q, theta2}; }
  void validate() const {
    first().validate();
    second().validate();
    if (std::abs(std::remainder(theta1 - theta2, 2.0 * std::numbers::pi)) < kThetaGuard)
      throw DomainError("two-soliton needs theta1 != theta2");
  }
};

struct RSProfile {
  double r = 0.0;
  double s = 0.0;
  double imag_residue = 0.0;  // max |Im| of the complex-form r, s
};

/// Coefficients of r = c_plus x+ + c_minus x-.
struct RCoefficients {
  double c_plus;
  double c_minus;
};

inline RCoefficients r_coefficients(const SolitonParams& prm) {
  const Complex mu = prm.mu();
  const double st = std::sin(prm.theta);
  return {-2.0 * st * prm.p / std::norm(1.0 - mu), 2.0 * st * prm.q / std::norm(1.0 + mu)};
}

/// r = i(1/(1-mu) - 1/(1-mu~)) p x+ + i(1/(1+mu) - 1/(1+mu~)) q x-,
/// s = (1/(1-mu) + 1/(1-mu~)) p x+ + (1/(1+mu) + 1/(1+mu~)) q x-,
/// evaluated in real form; the complex form only feeds imag_residue.
inline RSProfile rs_profile(const SolitonParams& prm, SpacetimePoint x) {
  prm.validate();
  const Complex mu = prm.mu();
  const Complex mb = std::conj(mu);
  const Complex I(0.0, 1.0);
  const Complex rc = I * (1.0 / (1.0 - mu) - 1.0 / (1.0 - mb)) * prm.p * x.xplus +
                     I * (1.0 / (1.0 + mu) - 1.0 / (1.0 + mb)) * prm.q * x.xminus;
  const Complex sc = (1.0 / (1.0 - mu) + 1.0 / (1.0 - mb)) * prm.p * x.xplus +
                     (1.0 / (1.0 + mu) + 1.0 / (1.0 + mb)) * prm.q * x.xminus;
  const double ct = std::cos(prm.theta);
  const RCoefficients rcoef = r_coefficients(prm);
  RSProfile out;
  out.r = rcoef.c_plus * x.xplus + rcoef.c_minus * x.xminus;
  out.s = (2.0 - 2.0 * ct) * prm.p * x.xplus / std::norm(1.0 - mu) +
          (2.0 + 2.0 * ct) * prm.q * x.xminus / std::norm(1.0 + mu);
  out.imag_residue = std::max(std::abs(rc.imag()), std::abs(sc.imag()));
  return out;
}

/// (X Y; -conj Y, conj X)
inline Matrix su2_matrix(Complex X, Complex Y) {
  return Matrix{{X, Y}, {-std::conj(Y), std::conj(X)}};
}

struct OneSoliton {
  RSProfile rs;
  Matrix S;
  Complex X, Y;   // g~ g^-1 = (X Y; -conj Y, conj X)
  Matrix g;       // g~
  Matrix jplus;   // (a b; -conj b, conj a)
  Matrix jminus;  // (c d; -conj d, conj c)
};

inline OneSoliton one_soliton(const SolitonParams& prm, SpacetimePoint x) {
  const RSProfile rs = rs_profile(prm, x);
  const double ct = std::cos(prm.theta), st = std::sin(prm.theta);
  const double th = std::tanh(rs.r), sech = 1.0 / std::cosh(rs.r);
  const Complex I(0.0, 1.0);
  const Complex phase = std::exp(I * rs.s);

  OneSoliton out;
  out.rs = rs;
  out.S = Matrix{{ct + I * st * th, -I * st * sech * phase},
                 {-I * st * sech * std::conj(phase), ct - I * st * th}};
  out.X = -(ct + I * st * th);
  out.Y = I * st * sech * phase;
  out.g = su2_matrix(out.X, out.Y) * make_seed_su2(prm.p, prm.q).g(x);

  const Complex a = I * prm.p * (1.0 - (1.0 + ct) * sech * sech);
  const Complex b = -I * prm.p * ((1.0 + ct) * th + I * st) * sech * phase;
  const Complex c = I * prm.q * (1.0 - (1.0 - ct) * sech * sech);
  // The overall sign of d is fixed by j~- = (I + S) j- (I + S)^-1.
  const Complex d = -I * prm.q * ((1.0 - ct) * th - I * st) * sech * phase;
  out.jplus = su2_matrix(a, b);
  out.jminus = su2_matrix(c, d);
  return out;
}

/// j~- with d = +iq[(1 - cos theta) tanh r - i sin theta] sech r e^{is}, the
/// sign as originally printed; kept to report the discrepancy.
inline Matrix printed_jminus(const SolitonParams& prm, SpacetimePoint x) {
  const RSProfile rs = rs_profile(prm, x);
  const double ct = std::cos(prm.theta), st = std::sin(prm.theta);
  const double th = std::tanh(rs.r), sech = 1.0 / std::cosh(rs.r);
  const Complex I(0.0, 1.0);
  const Complex c = I * prm.q * (1.0 - (1.0 - ct) * sech * sech);
  const Complex d = I * prm.q * ((1.0 - ct) * th - I * st) * sech * std::exp(I * rs.s);
  return su2_matrix(c, d);
}

struct TwoSoliton {
  Complex X, Y;
  Matrix g;
  double denominator = 0.0;
};

/// Printed closed form of the two-fold dressed field, with r_k, s_k the
/// one-soliton profiles at theta_k. This is a regression oracle only: the
/// generic engine is authoritative.
inline TwoSoliton two_soliton(const TwoSolitonParams& prm, SpacetimePoint x) {
  prm.validate();
  const RSProfile p1 = rs_profile(prm.first(), x);
  const RSProfile p2 = rs_profile(prm.second(), x);
  const double r1 = p1.r, r2 = p2.r, s1 = p1.s, s2 = p2.s;
  const double c1 = std::cos(prm.theta1), c2 = std::cos(prm.theta2);
  const double n1 = std::sin(prm.theta1), n2 = std::sin(prm.theta2);
  const double ch1 = std::cosh(r1), ch2 = std::cosh(r2);
  const double sh1 = std::sinh(r1), sh2 = std::sinh(r2);
  const double t1 = std::tanh(r1), t2 = std::tanh(r2);
  const double sech1 = 1.0 / ch1, sech2 = 1.0 / ch2;
  const Complex I(0.0, 1.0);
  const Complex e12 = std::exp(I * (s1 - s2));

  const double den = n2 * n1 * (sh2 * sh1 - std::cos(s2 - s1)) - (1.0 - c2 * c1) * ch1 * ch2;
  if (!(std::abs(den) > 0.0)) throw DomainError("two_soliton: vanishing denominator");

  const Complex A = c2 * ch2 * ch1 + I * sh2 * sh1 * (n2 - n1) - I * n2 * n1 * n1 * sh1 * sech1 -
                    c2 * (c1 * ch1 - I * n1 * sh1) * (c2 * ch2 + I * n2 * sh2);
  const Complex B =
      n2 * n1 * ((c1 - I * n1 * t1) * e12 + (-2.0 * c2 + c1 + I * n1 * t1) * std::conj(e12));
  const Complex C =
      -I * n2 * ch1 * (1.0 - (c1 + I * n1 * t1) * (2.0 * c2 - c1 - I * n1 * t1)) *
          std::exp(I * s1) +
      I * n1 * ch2 * (1.0 + (c2 + I * n2 * t2) * (2.0 * c1 - c2 - I * n2 * t2)) *
          std::exp(I * s2) +
      I * n1 * n2 * std::exp(I * s1) * (n2 * sech2 - n1 * sech1 * e12);

  TwoSoliton out;
  out.denominator = den;
  out.X = (A + B) / den;
  out.Y = C / (2.0 * den);
  out.g = su2_matrix(out.X, out.Y) * make_seed_su2(prm.p, prm.q).g(x);
  return out;
}

/// lambda = (mu, conj mu) with kets (1, -1) and (1, 1), so that
/// M = (omega(mu), omega(conj mu); -omega^-1(mu), omega^-1(conj mu)).
inline SpectralData su2_spectral(double theta) {
  require_theta(theta);
  const Complex mu = std::polar(1.0, theta);
  return SpectralData{{mu, std::conj(mu)}, {Vector{1.0, -1.0}, Vector{1.0, 1.0}}};
}

inline DarbouxChain su2_chain(double p, double q, const std::vector<double>& thetas) {
  std::vector<SpectralData> steps;
  for (double th : thetas) steps.push_back(su2_spectral(th));
  return DarbouxChain(make_seed_su2(p, q), std::move(steps));
}

/// Point with the given r at fixed x-.
inline SpacetimePoint point_at_r(const SolitonParams& prm, double r, double xminus = 0.0) {
  prm.validate();
  const RCoefficients c = r_coefficients(prm);
  return SpacetimePoint{(r - c.c_minus * xminus) / c.c_plus, xminus};
}

/// Point on the ray (x+, x-) = a (-1, 1) where every r_k has the sign of
/// `sign` and min |r_k| = r_min. Throws if the r_k grow with opposite signs
/// along the ray.
inline SpacetimePoint asymptotic_point(double p, double q, const std::vector<double>& thetas,
                                       double r_min, int sign) {
  double slowest = std::numeric_limits<double>::infinity();
  int orientation = 0;
  for (double th : thetas) {
    const RCoefficients c = r_coefficients({p, q, th});
    const double rate = c.c_minus - c.c_plus;  // dr/da along (-1, 1)
    const int o = rate > 0 ? 1 : -1;
    if (orientation != 0 && o != orientation)
      throw DomainError("asymptotic_point: r_k diverge with opposite signs on the ray");
    orientation = o;
    slowest = std::min(slowest, std::abs(rate));
  }
  const double a = sign * orientation * r_min / slowest;
  return SpacetimePoint{-a, a};
}

/// diag(-e^{+-i theta}, -e^{-+i theta}), the r -> +-infinity limit of g~ g^-1.
inline Matrix single_soliton_limit(double theta, int sign) {
  const Complex e = std::polar(1.0, sign * theta);
  return Matrix::diagonal({-e, -std::conj(e)});
}

struct AsymptoticLimit {
  Matrix limit;       // diag((-1)^K e^{+-i sum theta}, (-1)^K e^{-+i sum theta})
  Matrix factorized;  // product of the K single-soliton limits
};

inline AsymptoticLimit asymptotic_g(const std::vector<double>& thetas, int sign) {
  if (thetas.empty()) throw DomainError("asymptotic_g: need at least one theta");
  if (sign != 1 && sign != -1) throw DomainError("asymptotic_g: sign must be +1 or -1");
  double total = 0.0;
  Matrix product = Matrix::identity(2);
  for (double th : thetas) {
    require_theta(th);
    total += th;
    product = single_soliton_limit(th, sign) * product;
  }
  const double parity = (thetas.size() % 2 == 0) ? 1.0 : -1.0;
  const Complex e = parity * std::polar(1.0, sign * total);
  return AsymptoticLimit{Matrix::diagonal({e, std::conj(e)}), std::move(product)};
}

}  // namespace chiral::su2
