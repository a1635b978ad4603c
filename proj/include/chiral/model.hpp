#pragma once

// Seed solutions of the principal chiral model, its Lax pair
//   d+ V = j+ V / (1 - lambda),   d- V = j- V / (1 + lambda),
// light-cone finite differences and grid residuals for the Lax pair and the
// field equations (conservation and zero curvature).

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chiral/matrix.hpp"

namespace chiral {

/// Light-cone point: x+ = (t + x)/2, x- = (t - x)/2.
struct SpacetimePoint {
  double xplus = 0.0;
  double xminus = 0.0;

  static SpacetimePoint from_tx(double t, double x) { return {0.5 * (t + x), 0.5 * (t - x)}; }
  double t() const { return xplus + xminus; }
  double x() const { return xplus - xminus; }
};

enum class LightCone { plus, minus };

inline const char* to_string(LightCone d) { return d == LightCone::plus ? "plus" : "minus"; }

/// Distance from the Lax-pair poles lambda = +-1 below which a spectral
/// parameter is rejected.
inline constexpr double kPoleGuard = 1e-8;

inline void require_regular_lambda(Complex lambda, const char* who) {
  if (std::abs(lambda - 1.0) < kPoleGuard || std::abs(lambda + 1.0) < kPoleGuard)
    throw DomainError(std::string(who) + ": spectral parameter at a Lax-pair pole (lambda = +-1)");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw DomainError(std::string(who) + ": spectral parameter is not finite");
}

/// Diagonal exponential vacuum: constant commuting currents
///   j+ = diag(i p_k), j- = diag(i q_k),
///   V(lambda) = diag(exp i(p_k x+/(1-lambda) + q_k x-/(1+lambda))),
/// so that V(0) = g. The SU(2) seed uses p = (p, -p), q = (q, -q).
class SeedSolution {
public:
  SeedSolution(std::vector<double> p, std::vector<double> q) : p_(std::move(p)), q_(std::move(q)) {
    if (p_.empty() || p_.size() != q_.size())
      throw DimensionError("SeedSolution: p and q must be non-empty and of equal length");
    for (std::size_t k = 0; k < p_.size(); ++k)
      if (!std::isfinite(p_[k]) || !std::isfinite(q_[k]))
        throw DomainError("SeedSolution: non-finite current component");
  }

  std::size_t n() const { return p_.size(); }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& q() const { return q_; }

  Matrix jplus() const { return diag_i(p_); }
  Matrix jminus() const { return diag_i(q_); }

  /// Phase of the k-th diagonal entry of V(lambda, x) divided by i.
  Complex exponent(std::size_t k, Complex lambda, SpacetimePoint x) const {
    return p_[k] * x.xplus / (1.0 - lambda) + q_[k] * x.xminus / (1.0 + lambda);
  }

  Matrix V(Complex lambda, SpacetimePoint x) const {
    require_regular_lambda(lambda, "SeedSolution::V");
    Matrix v(n());
    for (std::size_t k = 0; k < n(); ++k)
      v(k, k) = std::exp(Complex(0.0, 1.0) * exponent(k, lambda, x));
    return v;
  }

  Matrix g(SpacetimePoint x) const { return V(0.0, x); }

  // Same as g(x)^-1 without an inversion.
  Matrix g_inverse(SpacetimePoint x) const {
    Matrix v(n());
    for (std::size_t k = 0; k < n(); ++k)
      v(k, k) = std::exp(Complex(0.0, -1.0) * exponent(k, 0.0, x));
    return v;
  }

private:
  static Matrix diag_i(const std::vector<double>& c) {
    Matrix m(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) m(k, k) = Complex(0.0, c[k]);
    return m;
  }

  std::vector<double> p_, q_;
};

/// SU(2) vacuum g = diag(e^{i(p x+ + q x-)}, e^{-i(p x+ + q x-)}).
inline SeedSolution make_seed_su2(double p, double q) {
  if (p == 0.0 || q == 0.0) throw DomainError("make_seed_su2: p and q must be non-zero");
  return SeedSolution({p, -p}, {q, -q});
}

/// Any (V, j+, j-) triple solving the Lax pair; g is V at lambda = 0.
struct Solution {
  std::size_t n = 0;
  std::function<Matrix(Complex, SpacetimePoint)> V;
  std::function<Matrix(SpacetimePoint)> jplus;
  std::function<Matrix(SpacetimePoint)> jminus;

  Matrix g(SpacetimePoint x) const { return V(0.0, x); }
};

inline Solution seed_solution(const SeedSolution& seed) {
  const Matrix jp = seed.jplus();
  const Matrix jm = seed.jminus();
  return Solution{seed.n(),
                  [seed](Complex lambda, SpacetimePoint x) { return seed.V(lambda, x); },
                  [jp](SpacetimePoint) { return jp; }, [jm](SpacetimePoint) { return jm; }};
}

/// Central difference (f(x + h e) - f(x - h e)) / 2h, where e shifts only x+
/// (plus) or only x- (minus).
template <class F>
auto deriv_lightcone(F&& f, SpacetimePoint x, LightCone dir, double h) {
  if (!(h > 0.0)) throw DomainError("deriv_lightcone: step must be positive");
  SpacetimePoint fwd = x, bwd = x;
  if (dir == LightCone::plus) {
    fwd.xplus += h;
    bwd.xplus -= h;
  } else {
    fwd.xminus += h;
    bwd.xminus -= h;
  }
  auto out = f(fwd);
  out -= f(bwd);
  out *= Complex(1.0 / (2.0 * h));
  return out;
}

/// Uniform t, x grid (endpoints included) plus the finite-difference step.
struct Grid {
  double t_min = -5.0, t_max = 5.0;
  double x_min = -5.0, x_max = 5.0;
  std::size_t nt = 41, nx = 41;
  double h = 1e-4;

  void validate() const {
    if (nt < 2 || nx < 2) throw DomainError("Grid: nt and nx must be at least 2");
    if (!(t_max > t_min) || !(x_max > x_min)) throw DomainError("Grid: empty extent");
    if (!(h > 0.0)) throw DomainError("Grid: finite-difference step must be positive");
    if (!std::isfinite(t_min) || !std::isfinite(t_max) || !std::isfinite(x_min) ||
        !std::isfinite(x_max))
      throw DomainError("Grid: non-finite bounds");
  }

  std::size_t size() const { return nt * nx; }
  double t(std::size_t i) const { return t_min + (t_max - t_min) * double(i) / double(nt - 1); }
  double x(std::size_t j) const { return x_min + (x_max - x_min) * double(j) / double(nx - 1); }
  SpacetimePoint point(std::size_t i, std::size_t j) const {
    return SpacetimePoint::from_tx(t(i), x(j));
  }

  Grid with_step(double step) const {
    Grid g = *this;
    g.h = step;
    return g;
  }

  // Row-major sweep: t outer, x inner.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nx; ++j) fn(point(i, j));
  }
};

/// Running maximum of a residual over a grid, remembering where it occurred.
/// A non-finite sample dominates every finite one.
struct GridMax {
  double value = 0.0;
  SpacetimePoint at{};
  bool seen = false;

  void update(double v, SpacetimePoint x) {
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (!seen || v > value) {
      value = v;
      at = x;
      seen = true;
    }
  }
  void merge(const GridMax& o) {
    if (o.seen && (!seen || o.value > value)) *this = o;
  }
};

struct LaxResidual {
  GridMax plus;   // |d+V - j+ V/(1-lambda)|_F
  GridMax minus;  // |d-V - j- V/(1+lambda)|_F
  double max() const { return std::max(plus.value, minus.value); }
};

inline LaxResidual lax_residual(const Solution& s, Complex lambda, const Grid& grid) {
  require_regular_lambda(lambda, "lax_residual");
  grid.validate();
  const Complex cp = 1.0 / (1.0 - lambda);
  const Complex cm = 1.0 / (1.0 + lambda);
  auto V = [&](SpacetimePoint y) { return s.V(lambda, y); };
  LaxResidual out;
  grid.for_each([&](SpacetimePoint x) {
    const Matrix v = V(x);
    const Matrix dp = deriv_lightcone(V, x, LightCone::plus, grid.h);
    const Matrix dm = deriv_lightcone(V, x, LightCone::minus, grid.h);
    out.plus.update(frobenius_norm(dp - cp * (s.jplus(x) * v)), x);
    out.minus.update(frobenius_norm(dm - cm * (s.jminus(x) * v)), x);
  });
  return out;
}

struct EomResidual {
  GridMax conservation;  // |d+ j- + d- j+|_F
  GridMax curvature;     // |d- j+ - d+ j- + [j+, j-]|_F
  double max() const { return std::max(conservation.value, curvature.value); }
};

inline EomResidual eom_residual(const std::function<Matrix(SpacetimePoint)>& jplus,
                                const std::function<Matrix(SpacetimePoint)>& jminus,
                                const Grid& grid) {
  grid.validate();
  EomResidual out;
  grid.for_each([&](SpacetimePoint x) {
    const Matrix dp_jm = deriv_lightcone(jminus, x, LightCone::plus, grid.h);
    const Matrix dm_jp = deriv_lightcone(jplus, x, LightCone::minus, grid.h);
    out.conservation.update(frobenius_norm(dp_jm + dm_jp), x);
    out.curvature.update(frobenius_norm(dm_jp - dp_jm + commutator(jplus(x), jminus(x))), x);
  });
  return out;
}

inline EomResidual eom_residual(const Solution& s, const Grid& grid) {
  return eom_residual(s.jplus, s.jminus, grid);
}

/// x -> V(lambda_i, x) |ket>, a column solution of the Lax pair at lambda_i.
inline std::function<Vector(SpacetimePoint)> column_solution(const SeedSolution& seed,
                                                             Complex lambda_i, Vector ket) {
  require_regular_lambda(lambda_i, "column_solution");
  if (ket.size() != seed.n()) throw DimensionError("column_solution: ket size mismatch");
  if (norm(ket) == 0.0) throw DomainError("column_solution: ket must be non-zero");
  return [seed, lambda_i, ket = std::move(ket)](SpacetimePoint x) {
    return seed.V(lambda_i, x) * ket;
  };
}

/// Max over the grid of |d+ m - j+ m/(1-lambda)| and |d- m - j- m/(1+lambda)|.
inline LaxResidual column_lax_residual(const std::function<Vector(SpacetimePoint)>& column,
                                       const SeedSolution& seed, Complex lambda_i,
                                       const Grid& grid) {
  require_regular_lambda(lambda_i, "column_lax_residual");
  grid.validate();
  const Matrix jp = seed.jplus() * (1.0 / (1.0 - lambda_i));
  const Matrix jm = seed.jminus() * (1.0 / (1.0 + lambda_i));
  LaxResidual out;
  grid.for_each([&](SpacetimePoint x) {
    const Vector m = column(x);
    out.plus.update(norm(deriv_lightcone(column, x, LightCone::plus, grid.h) - jp * m), x);
    out.minus.update(norm(deriv_lightcone(column, x, LightCone::minus, grid.h) - jm * m), x);
  });
  return out;
}

}  // namespace chiral
