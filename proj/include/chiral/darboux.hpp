#pragma once

// Darboux transformations of the chiral-model Lax pair.
//
// One step with particular solution M (columns V(lambda_i)|i>) and
// Lambda = diag(lambda_i):
//   S = M Lambda M^-1,  D(lambda) = lambda I - S,
//   V~ = D(lambda) V,   g~ = -S g,
//   j~(+/-) = M(I -/+ Lambda)M^-1 j(+/-) (M(I -/+ Lambda)M^-1)^-1 = (I -/+ S) j (I -/+ S)^-1.
//
// K steps are evaluated three ways: the sequential product of the single-step
// factors (with dressed particular solutions), a (K+1)x(K+1) block
// quasideterminant built from the undressed M_k, and, for spectra of the form
// {mu, conj(mu)}, the hermitian-projector form of each factor.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "chiral/matrix.hpp"
#include "chiral/model.hpp"
#include "chiral/quasidet.hpp"

namespace chiral {

/// Eigenvalues lambda_1..lambda_N and the constant kets |1>..|N>.
struct SpectralData {
  std::vector<Complex> lambdas;
  std::vector<Vector> kets;

  std::size_t size() const { return lambdas.size(); }

  Matrix Lambda() const { return Matrix::diagonal(std::span<const Complex>(lambdas)); }

  void validate(std::size_t n) const {
    if (lambdas.size() != n || kets.size() != n)
      throw DimensionError("SpectralData: need exactly n eigenvalues and n kets (n = " +
                           std::to_string(n) + ")");
    for (Complex l : lambdas) require_regular_lambda(l, "SpectralData");
    for (const Vector& k : kets) {
      if (k.size() != n) throw DimensionError("SpectralData: ket has wrong length");
      if (norm(k) == 0.0) throw DomainError("SpectralData: zero ket");
    }
  }
};

/// M(x) = (V(lambda_1, x)|1>, ..., V(lambda_N, x)|N>) for any Lax solution.
inline Matrix build_M(const Solution& state, const SpectralData& spectral, SpacetimePoint x) {
  std::vector<Vector> cols;
  cols.reserve(spectral.size());
  for (std::size_t i = 0; i < spectral.size(); ++i)
    cols.push_back(state.V(spectral.lambdas[i], x) * spectral.kets[i]);
  return Matrix::from_columns(cols);
}

inline Matrix build_M(const SeedSolution& seed, const SpectralData& spectral, SpacetimePoint x) {
  std::vector<Vector> cols;
  cols.reserve(spectral.size());
  for (std::size_t i = 0; i < spectral.size(); ++i)
    cols.push_back(seed.V(spectral.lambdas[i], x) * spectral.kets[i]);
  return Matrix::from_columns(cols);
}

inline std::function<Matrix(SpacetimePoint)> M_evaluator(SeedSolution seed, SpectralData spectral) {
  spectral.validate(seed.n());
  return [seed = std::move(seed), spectral = std::move(spectral)](SpacetimePoint x) {
    return build_M(seed, spectral, x);
  };
}

/// S = M Lambda M^-1.
inline Matrix build_S(const Matrix& M, const Matrix& Lambda) { return M * Lambda * invert(M); }

/// D(lambda) = lambda I - S.
inline Matrix darboux_matrix(const Matrix& S, Complex lambda) {
  return Matrix::identity(S.size()) * lambda - S;
}

inline double sign_of(LightCone d) { return d == LightCone::plus ? 1.0 : -1.0; }

/// M (I -/+ Lambda) M^-1, the one-step current factor (equal to I -/+ S).
inline Matrix current_factor(const Matrix& M, const Matrix& Lambda, LightCone d) {
  const Matrix shifted = Matrix::identity(M.size()) - sign_of(d) * Lambda;
  return M * shifted * invert(M);
}

/// j~ = M(I -/+ Lambda)M^-1 j M(I -/+ Lambda)^-1 M^-1.
inline Matrix transform_current(const Matrix& M, const Matrix& Lambda, const Matrix& j,
                                LightCone d) {
  const Matrix shifted = Matrix::identity(M.size()) - sign_of(d) * Lambda;
  const Matrix m_inv = invert(M);
  return M * shifted * m_inv * j * M * invert(shifted) * m_inv;
}

/// j~ = (I -/+ S) j (I -/+ S)^-1.
inline Matrix transform_current_via_S(const Matrix& S, const Matrix& j, LightCone d) {
  const Matrix f = Matrix::identity(S.size()) - sign_of(d) * S;
  return f * j * invert(f);
}

/// One Darboux step attached to the state it dresses: M is built from that
/// state's V, so applied to an already transformed state it yields the
/// dressed particular solution.
struct DarbouxStep {
  SpectralData spectral;
  Matrix Lambda;
  std::function<Matrix(SpacetimePoint)> M;

  Matrix S(SpacetimePoint x) const { return build_S(M(x), Lambda); }
};

inline DarbouxStep make_step(const Solution& state, SpectralData spectral) {
  spectral.validate(state.n);
  Matrix lam = spectral.Lambda();
  auto m = [state, spectral](SpacetimePoint x) { return build_M(state, spectral, x); };
  return DarbouxStep{std::move(spectral), std::move(lam), std::move(m)};
}

/// (V, j+, j-) -> (D V, (I - S) j+ (I - S)^-1, (I + S) j- (I + S)^-1), with the
/// currents taken through the M(I -/+ Lambda)M^-1 conjugation.
inline Solution transform_state(const Solution& state, const DarbouxStep& step) {
  Solution out;
  out.n = state.n;
  out.V = [state, step](Complex lambda, SpacetimePoint x) {
    return darboux_matrix(step.S(x), lambda) * state.V(lambda, x);
  };
  out.jplus = [state, step](SpacetimePoint x) {
    return transform_current(step.M(x), step.Lambda, state.jplus(x), LightCone::plus);
  };
  out.jminus = [state, step](SpacetimePoint x) {
    return transform_current(step.M(x), step.Lambda, state.jminus(x), LightCone::minus);
  };
  return out;
}

struct SConditionResidual {
  GridMax plus;        // |d+S (I - S) - [j+, S]|_F
  GridMax minus;       // |d-S (I + S) - [j-, S]|_F
  GridMax trace_plus;  // |Tr d+S|
  GridMax trace_minus; // |Tr d-S|
};

/// Conditions on S for covariance, with j the current of the state being
/// transformed.
inline SConditionResidual s_conditions_residual(const Solution& state, const DarbouxStep& step,
                                                const Grid& grid) {
  grid.validate();
  const std::size_t n = state.n;
  const Matrix id = Matrix::identity(n);
  auto S = [&](SpacetimePoint y) { return step.S(y); };
  SConditionResidual out;
  grid.for_each([&](SpacetimePoint x) {
    const Matrix s = S(x);
    const Matrix dp = deriv_lightcone(S, x, LightCone::plus, grid.h);
    const Matrix dm = deriv_lightcone(S, x, LightCone::minus, grid.h);
    out.plus.update(frobenius_norm(dp * (id - s) - commutator(state.jplus(x), s)), x);
    out.minus.update(frobenius_norm(dm * (id + s) - commutator(state.jminus(x), s)), x);
    out.trace_plus.update(std::abs(trace(dp)), x);
    out.trace_minus.update(std::abs(trace(dm)), x);
  });
  return out;
}

/// Largest |j~ - (j +/- d S)| over the grid: the transformed currents against
/// j~+ = j+ + d+S and j~- = j- - d-S with finite-difference dS.
inline LaxResidual current_route_residual(const Solution& state, const DarbouxStep& step,
                                          const Grid& grid) {
  grid.validate();
  const Solution next = transform_state(state, step);
  auto S = [&](SpacetimePoint y) { return step.S(y); };
  LaxResidual out;
  grid.for_each([&](SpacetimePoint x) {
    const Matrix dp = deriv_lightcone(S, x, LightCone::plus, grid.h);
    const Matrix dm = deriv_lightcone(S, x, LightCone::minus, grid.h);
    out.plus.update(frobenius_norm(next.jplus(x) - (state.jplus(x) + dp)), x);
    out.minus.update(frobenius_norm(next.jminus(x) - (state.jminus(x) - dm)), x);
  });
  return out;
}

/// Splits a spectrum of the form {mu, ..., mu, conj(mu), ...} by membership;
/// mu is the first eigenvalue. Throws DomainError for any other spectrum.
inline std::vector<bool> mu_group(const SpectralData& spectral, double tol = 1e-12) {
  const Complex mu = spectral.lambdas.at(0);
  std::vector<bool> in_mu(spectral.size());
  for (std::size_t i = 0; i < spectral.size(); ++i) {
    const Complex l = spectral.lambdas[i];
    if (std::abs(l - mu) <= tol * std::max(1.0, std::abs(mu)))
      in_mu[i] = true;
    else if (std::abs(l - std::conj(mu)) <= tol * std::max(1.0, std::abs(mu)))
      in_mu[i] = false;
    else
      throw DomainError("spectrum is not of the form {mu, conj(mu)}");
  }
  return in_mu;
}

struct UnitarityResidual {
  GridMax sum;              // |S^dag + S - (mu + conj mu) I|_F
  GridMax product;          // |S^dag S - |mu|^2 I|_F
  GridMax reality;          // distance of V~^dag(conj lambda) V~(lambda) from Span{I}
  GridMax similarity_trace; // |Tr S - Tr Lambda|
  GridMax similarity_det;   // |det S - det Lambda|
};

/// Unitarity side conditions for a {mu, conj(mu)} step; the reality
/// condition is sampled at the given spectral parameters.
inline UnitarityResidual unitarity_checks(const Solution& state, const DarbouxStep& step,
                                          const Grid& grid,
                                          const std::vector<Complex>& reality_lambdas) {
  grid.validate();
  mu_group(step.spectral);
  const Complex mu = step.spectral.lambdas.front();
  const std::size_t n = state.n;
  const Matrix id = Matrix::identity(n);
  const Complex tr_lambda = trace(step.Lambda);
  const Complex det_lambda = det(step.Lambda);
  const Solution next = transform_state(state, step);
  UnitarityResidual out;
  grid.for_each([&](SpacetimePoint x) {
    const Matrix s = step.S(x);
    const Matrix sd = adjoint(s);
    out.sum.update(frobenius_norm(sd + s - id * (mu + std::conj(mu))), x);
    out.product.update(frobenius_norm(sd * s - id * std::norm(mu)), x);
    out.similarity_trace.update(std::abs(trace(s) - tr_lambda), x);
    out.similarity_det.update(std::abs(det(s) - det_lambda), x);
    for (Complex l : reality_lambdas) {
      const Matrix a = adjoint(next.V(std::conj(l), x)) * next.V(l, x);
      out.reality.update(span_identity_deviation(a), x);
    }
  });
  return out;
}

/// Hermitian-projector form of a {mu, conj(mu)} step: P projects onto the
/// span of the mu-group columns of M, S = (mu - conj mu) P + conj(mu) I.
struct ProjectorForm {
  Matrix P;
  Matrix S;
  Complex mu;

  Complex mu_bar() const { return std::conj(mu); }

  /// D(lambda) = (lambda - conj mu)(I - (mu - conj mu)/(lambda - conj mu) P),
  /// expanded so that lambda = conj(mu) is also defined.
  Matrix darboux(Complex lambda) const {
    const std::size_t n = P.size();
    return Matrix::identity(n) * (lambda - mu_bar()) - (mu - mu_bar()) * P;
  }
};

/// Orthogonal projector onto the span of the mu-group columns of M, by
/// modified Gram-Schmidt. For a single column this is |m><m| / <m|m>.
inline ProjectorForm projector_path(const Matrix& M, const SpectralData& spectral) {
  const std::size_t n = M.size();
  if (spectral.size() != n) throw DimensionError("projector_path: spectrum size mismatch");
  const std::vector<bool> in_mu = mu_group(spectral);
  const Complex mu = spectral.lambdas.front();
  std::vector<Vector> basis;
  Matrix P = Matrix::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_mu[i]) continue;
    Vector v = M.column(i);
    const double original = norm(v);
    if (original == 0.0) throw DomainError("projector_path: zero-norm column");
    for (const Vector& e : basis) v -= e * inner(e, v);
    const double len = norm(v);
    if (len <= 1e-12 * original)
      throw DomainError("projector_path: mu-group columns are linearly dependent");
    v *= Complex(1.0 / len);
    P += outer(v, v);
    basis.push_back(std::move(v));
  }
  Matrix S = (mu - std::conj(mu)) * P + Matrix::identity(n) * std::conj(mu);
  return ProjectorForm{std::move(P), std::move(S), mu};
}

/// S[k], the dressed particular solutions M[k] and the undressed M_k of a
/// chain, all evaluated at one point.
struct ChainFrame {
  std::vector<Matrix> M;          // undressed M_k
  std::vector<Matrix> dressed_M;  // M[k]
  std::vector<Matrix> S;          // S[k] = M[k] Lambda_k M[k]^-1
};

struct ChainState {
  Matrix V;       // V[K+1](lambda)
  Matrix g;       // g[K+1] = V[K+1](0)
  Matrix jplus;   // j+[K+1]
  Matrix jminus;  // j-[K+1]
  Matrix Fplus;   // (I - S[K]) ... (I - S[1])
  Matrix Fminus;  // (I + S[K]) ... (I + S[1])
};

/// K Darboux steps over one base seed. Every M_k is a particular solution of
/// the base seed's Lax pair at Lambda_k; dressing by earlier steps is internal.
class DarbouxChain {
public:
  DarbouxChain(SeedSolution base, std::vector<SpectralData> steps)
      : base_(std::move(base)), steps_(std::move(steps)) {
    if (steps_.empty()) throw DomainError("DarbouxChain: need at least one step");
    lambdas_.reserve(steps_.size());
    for (const SpectralData& s : steps_) {
      s.validate(base_.n());
      lambdas_.push_back(s.Lambda());
    }
  }

  std::size_t K() const { return steps_.size(); }
  std::size_t n() const { return base_.n(); }
  const SeedSolution& base() const { return base_; }
  const SpectralData& spectral(std::size_t k) const { return steps_.at(k); }
  const Matrix& Lambda(std::size_t k) const { return lambdas_.at(k); }

  /// Chain with only the first k steps.
  DarbouxChain prefix(std::size_t k) const {
    return DarbouxChain(base_, std::vector<SpectralData>(steps_.begin(), steps_.begin() + k));
  }

  Matrix M(std::size_t k, SpacetimePoint x) const { return build_M(base_, steps_.at(k), x); }

  /// Column i of M[k] is (lambda_i^(k) - S[k-1]) ... (lambda_i^(k) - S[1]) M_k|_i.
  ChainFrame frame(SpacetimePoint x) const {
    ChainFrame f;
    const std::size_t n = this->n();
    for (std::size_t k = 0; k < K(); ++k) {
      Matrix mk = M(k, x);
      Matrix dressed = mk;
      for (std::size_t i = 0; i < n; ++i) {
        Vector col = mk.column(i);
        const Complex li = steps_[k].lambdas[i];
        double bound = norm(col);
        for (std::size_t l = 0; l < k; ++l) {
          const Matrix d = darboux_matrix(f.S[l], li);
          bound *= frobenius_norm(d);
          col = d * col;
        }
        // An eigenvalue repeated from an earlier step annihilates the column,
        // leaving only rounding noise that the relative pivot gate cannot see.
        if (k > 0 && norm(col) <= kPivotGate * bound)
          throw SingularMatrixError("DarbouxChain: dressed particular solution vanishes (step " +
                                    std::to_string(k + 1) + " repeats an earlier eigenvalue)");
        dressed.set_column(i, col);
      }
      f.S.push_back(build_S(dressed, lambdas_[k]));
      f.M.push_back(std::move(mk));
      f.dressed_M.push_back(std::move(dressed));
    }
    return f;
  }

private:
  SeedSolution base_;
  std::vector<SpectralData> steps_;
  std::vector<Matrix> lambdas_;
};

/// Sequential product form of K steps at (lambda, x).
inline ChainState iterate_product(const DarbouxChain& chain, Complex lambda, SpacetimePoint x) {
  const ChainFrame f = chain.frame(x);
  const std::size_t n = chain.n();
  const Matrix id = Matrix::identity(n);
  ChainState st;
  st.V = chain.base().V(lambda, x);
  st.g = chain.base().g(x);
  st.Fplus = id;
  st.Fminus = id;
  for (const Matrix& s : f.S) {
    st.V = darboux_matrix(s, lambda) * st.V;
    st.g = -s * st.g;
    st.Fplus = (id - s) * st.Fplus;
    st.Fminus = (id + s) * st.Fminus;
  }
  st.jplus = st.Fplus * chain.base().jplus() * invert(st.Fplus);
  st.jminus = st.Fminus * chain.base().jminus() * invert(st.Fminus);
  return st;
}

/// Block grid with rows (M_1 X_1^j, ..., M_K X_K^j, last_j), j = 0..K, boxed
/// at the bottom-right.
inline BlockGrid vandermonde_grid(const std::vector<Matrix>& M, const std::vector<Matrix>& X,
                                  const std::vector<Matrix>& last_column) {
  const std::size_t K = M.size();
  const std::size_t n = M.front().size();
  BlockGrid g(K + 1, K + 1, n);
  for (std::size_t k = 0; k < K; ++k) {
    Matrix row = M[k];
    for (std::size_t j = 0; j <= K; ++j) {
      g.set(j, k, row);
      row = row * X[k];
    }
  }
  for (std::size_t j = 0; j <= K; ++j) g.set(j, K, last_column.at(j));
  return g;
}

struct QdetState {
  Matrix V;       // |M_k Lambda_k^j ; lambda^j I| V
  Matrix g;       // |M_k Lambda_k^j ; (I, O, ..., O)| g
  Matrix Fplus;   // (-1)^K |M_k (I - Lambda_k)^j ; (I, O, ..., O)|
  Matrix Fminus;  // (-1)^K |M_k (I + Lambda_k)^j ; (I, O, ..., O)|
  Matrix jplus;   // F+ j+ F+^-1
  Matrix jminus;
  double condition = 0.0;  // kappa_1 of the deleted submatrix
};

/// Quasideterminant form of K steps at (lambda, x). The F factors carry the
/// (-1)^K that makes them equal to the product (I -/+ S[K]) ... (I -/+ S[1]).
inline QdetState iterate_qdet(const DarbouxChain& chain, Complex lambda, SpacetimePoint x) {
  require_regular_lambda(lambda, "iterate_qdet");
  const std::size_t K = chain.K();
  const std::size_t n = chain.n();
  const Matrix id = Matrix::identity(n);
  const Matrix zero = Matrix::zeros(n);

  std::vector<Matrix> M, Lam, Lplus, Lminus;
  for (std::size_t k = 0; k < K; ++k) {
    M.push_back(chain.M(k, x));
    Lam.push_back(chain.Lambda(k));
    Lplus.push_back(id - chain.Lambda(k));
    Lminus.push_back(id + chain.Lambda(k));
  }
  std::vector<Matrix> powers, unit(K + 1, zero);
  Complex lp = 1.0;
  for (std::size_t j = 0; j <= K; ++j, lp *= lambda) powers.push_back(id * lp);
  unit[0] = id;

  QdetState st;
  const BlockGrid vgrid = vandermonde_grid(M, Lam, powers);
  st.condition = condition_number(qdet_deleted_block(vgrid));
  st.V = qdet_block(vgrid) * chain.base().V(lambda, x);
  st.g = qdet_block(vandermonde_grid(M, Lam, unit)) * chain.base().g(x);
  const double sign = (K % 2 == 0) ? 1.0 : -1.0;
  st.Fplus = sign * qdet_block(vandermonde_grid(M, Lplus, unit));
  st.Fminus = sign * qdet_block(vandermonde_grid(M, Lminus, unit));
  st.jplus = st.Fplus * chain.base().jplus() * invert(st.Fplus);
  st.jminus = st.Fminus * chain.base().jminus() * invert(st.Fminus);
  return st;
}

/// Condition number of the block that iterate_qdet inverts.
inline double qdet_condition(const DarbouxChain& chain, SpacetimePoint x) {
  const std::size_t K = chain.K();
  const std::size_t n = chain.n();
  std::vector<Matrix> M, Lam, last(K + 1, Matrix::zeros(n));
  for (std::size_t k = 0; k < K; ++k) {
    M.push_back(chain.M(k, x));
    Lam.push_back(chain.Lambda(k));
  }
  return condition_number(qdet_deleted_block(vandermonde_grid(M, Lam, last)));
}

/// Product of the undressed one-step quasideterminants
///   |M_K I; M_K Lambda_K [O]| ... |M_1 I; M_1 Lambda_1 [O]|,
/// which the K-step g[K+1] g^-1 approaches where every soliton is far from
/// its core.
inline Matrix undressed_factor_product(const DarbouxChain& chain, SpacetimePoint x) {
  const std::size_t n = chain.n();
  Matrix out = Matrix::identity(n);
  for (std::size_t k = 0; k < chain.K(); ++k) {
    const Matrix mk = chain.M(k, x);
    const BlockGrid g{{mk, Matrix::identity(n)}, {mk * chain.Lambda(k), Matrix::zeros(n)}};
    out = qdet_block(g) * out;
  }
  return out;
}

/// Projector form of every step (each spectrum must be {mu_k, conj(mu_k)}):
///   V[K+1] = prod (lambda - conj mu_k)(I - (mu_k - conj mu_k)/(lambda - conj mu_k) P[k]) V
///   g[K+1] = prod (-conj mu_k)(I + (mu_k - conj mu_k)/conj(mu_k) P[k]) g
///   j[K+1] = prod (I -/+ (mu - conj mu)/(1 -/+ conj mu) P[k]) j
///            prod_l (I -/+ (conj mu - mu)/(1 -/+ mu) P[l])
inline ChainState iterate_projector(const DarbouxChain& chain, Complex lambda, SpacetimePoint x) {
  const ChainFrame f = chain.frame(x);
  const std::size_t n = chain.n();
  const Matrix id = Matrix::identity(n);
  ChainState st;
  st.V = chain.base().V(lambda, x);
  st.g = chain.base().g(x);
  Matrix left_p = id, left_m = id, right_p = id, right_m = id;
  for (std::size_t k = 0; k < chain.K(); ++k) {
    const ProjectorForm pf = projector_path(f.dressed_M[k], chain.spectral(k));
    const Complex mu = pf.mu, mb = pf.mu_bar();
    const Matrix& P = pf.P;
    st.V = pf.darboux(lambda) * st.V;
    st.g = (-mb) * (id + ((mu - mb) / mb) * P) * st.g;
    left_p = (id - ((mu - mb) / (1.0 - mb)) * P) * left_p;
    left_m = (id + ((mu - mb) / (1.0 + mb)) * P) * left_m;
    right_p = right_p * (id - ((mb - mu) / (1.0 - mu)) * P);
    right_m = right_m * (id + ((mb - mu) / (1.0 + mu)) * P);
  }
  st.Fplus = left_p;
  st.Fminus = left_m;
  st.jplus = left_p * chain.base().jplus() * right_p;
  st.jminus = left_m * chain.base().jminus() * right_m;
  return st;
}

/// The K-times transformed state as a Lax solution, evaluated through the
/// product form.
inline Solution chain_solution(std::shared_ptr<const DarbouxChain> chain) {
  Solution s;
  s.n = chain->n();
  s.V = [chain](Complex lambda, SpacetimePoint x) { return iterate_product(*chain, lambda, x).V; };
  s.jplus = [chain](SpacetimePoint x) { return iterate_product(*chain, 0.0, x).jplus; };
  s.jminus = [chain](SpacetimePoint x) { return iterate_product(*chain, 0.0, x).jminus; };
  return s;
}

inline Solution chain_solution(const DarbouxChain& chain) {
  return chain_solution(std::make_shared<const DarbouxChain>(chain));
}

}  // namespace chiral
