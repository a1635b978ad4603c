#pragma once

// Dense complex matrices and vectors for the small problem sizes of the
// chiral-model pipeline (N up to ~16, block assemblies up to (K+1)*N).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace chiral {

using Complex = std::complex<double>;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an LU pivot falls below the relative singularity gate.
class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Column vector of complex scalars.
class Vector {
public:
  Vector() = default;
  explicit Vector(std::size_t n) : data_(n, Complex{}) {}
  Vector(std::initializer_list<Complex> values) : data_(values) {}

  std::size_t size() const { return data_.size(); }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }
  std::span<const Complex> values() const { return data_; }

  Vector& operator+=(const Vector& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vector& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

private:
  void check_same(const Vector& o) const {
    if (o.size() != size()) throw DimensionError("vector size mismatch");
  }
  std::vector<Complex> data_;
};

inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator-(Vector a, const Vector& b) { return a -= b; }
inline Vector operator*(Vector a, Complex s) { return a *= s; }
inline Vector operator*(Complex s, Vector a) { return a *= s; }

/// <a|b> = sum conj(a_i) b_i
inline Complex inner(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("inner: size mismatch");
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

inline double norm(const Vector& v) { return std::sqrt(std::real(inner(v, v))); }

/// Square complex matrix, row-major.
class Matrix {
public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n, Complex{}) {}

  // Row-by-row literal; every row must have n entries.
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows)
      : n_(rows.size()), data_() {
    data_.reserve(n_ * n_);
    for (const auto& r : rows) {
      if (r.size() != n_) throw DimensionError("matrix literal is not square");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix zeros(std::size_t n) { return Matrix(n); }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const Complex> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix diagonal(std::initializer_list<Complex> d) {
    return diagonal(std::span<const Complex>(d.begin(), d.size()));
  }

  // Matrix whose columns are the given vectors.
  static Matrix from_columns(std::span<const Vector> cols) {
    Matrix m(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != cols.size())
        throw DimensionError("from_columns: column length differs from count");
      for (std::size_t i = 0; i < cols.size(); ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t size() const { return n_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  std::span<const Complex> values() const { return data_; }

  Vector column(std::size_t j) const {
    Vector v(n_);
    for (std::size_t i = 0; i < n_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_column(std::size_t j, const Vector& v) {
    if (v.size() != n_) throw DimensionError("set_column: size mismatch");
    for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = v[i];
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o, "-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  bool operator==(const Matrix&) const = default;

private:
  void check_same(const Matrix& o, const char* op) const {
    if (o.n_ != n_) throw DimensionError(std::string("matrix ") + op + ": dimension mismatch");
  }

  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator-(Matrix a) { return a *= -1.0; }
inline Matrix operator*(Matrix a, Complex s) { return a *= s; }
inline Matrix operator*(Complex s, Matrix a) { return a *= s; }

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionError("multiply: dimension mismatch");
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) { return multiply(a, b); }

inline Vector operator*(const Matrix& a, const Vector& v) {
  const std::size_t n = a.size();
  if (v.size() != n) throw DimensionError("matrix-vector: dimension mismatch");
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc{};
    for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline Matrix adjoint(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = std::conj(a(j, i));
  return r;
}

inline double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (const Complex& v : a.values()) acc += std::norm(v);
  return std::sqrt(acc);
}

inline Complex trace(const Matrix& a) {
  Complex t{};
  for (std::size_t i = 0; i < a.size(); ++i) t += a(i, i);
  return t;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

// |a| |b|^dagger
inline Matrix outer(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("outer: size mismatch");
  Matrix m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

inline bool all_finite(const Matrix& a) {
  return std::all_of(a.values().begin(), a.values().end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

/// Induced 1-norm (max column sum of moduli).
inline double norm1(const Matrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

/// Induced infinity-norm (max row sum of moduli).
inline double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

/// Default relative pivot gate: a pivot smaller than this times the largest
/// row norm marks the matrix singular.
inline constexpr double kPivotGate = 1e-12;

/// Eigen view of a Matrix (row-major storage).
using EigenMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline EigenMatrix to_eigen(const Matrix& a) {
  const std::size_t n = a.size();
  EigenMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
  return m;
}

inline Matrix from_eigen(const EigenMatrix& m) {
  Matrix a(static_cast<std::size_t>(m.rows()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) a(i, j) = m(i, j);
  return a;
}

/// LU with partial pivoting (P A = L U) plus the pivot statistics behind
/// the singularity gate.
struct LuFactors {
  Eigen::PartialPivLU<EigenMatrix> lu;
  double min_pivot = std::numeric_limits<double>::infinity();
  double scale = 0.0;  // max row norm of the input

  bool singular(double gate = kPivotGate) const {
    return lu.rows() > 0 && (scale == 0.0 || !(min_pivot >= gate * scale));
  }
};

inline LuFactors lu_factor(const Matrix& a) {
  LuFactors f;
  f.scale = norm_inf(a);
  if (a.size() == 0) return f;
  f.lu.compute(to_eigen(a));
  const auto& packed = f.lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i)
    f.min_pivot = std::min(f.min_pivot, std::abs(packed(i, i)));
  return f;
}

inline Complex det(const Matrix& a) {
  if (a.size() == 0) return 1.0;
  return lu_factor(a).lu.determinant();
}

/// Inverse by LU with partial pivoting. Throws SingularMatrixError when a
/// pivot drops below `gate` times the largest row norm.
inline Matrix invert(const Matrix& a, double gate = kPivotGate) {
  if (a.size() == 0) return a;
  const LuFactors f = lu_factor(a);
  if (f.singular(gate))
    throw SingularMatrixError("invert: matrix is singular to tolerance (min pivot " +
                              std::to_string(f.min_pivot) + ", scale " +
                              std::to_string(f.scale) + ")");
  return from_eigen(f.lu.inverse());
}

/// kappa_1(a) = |a|_1 |a^-1|_1, or +inf when `a` fails the pivot gate.
inline double condition_number(const Matrix& a) {
  try {
    return norm1(a) * norm1(invert(a));
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Scale-free distance: |a - b|_F / max(|a|_F, |b|_F, floor).
inline double relative_difference(const Matrix& a, const Matrix& b, double floor = 1e-30) {
  const double scale = std::max({frobenius_norm(a), frobenius_norm(b), floor});
  return frobenius_norm(a - b) / scale;
}

/// Distance of `a` from Span{I}: |a - (tr a / n) I|_F.
inline double span_identity_deviation(const Matrix& a) {
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  return frobenius_norm(a - Matrix::identity(n) * (trace(a) / static_cast<double>(n)));
}

}  // namespace chiral
