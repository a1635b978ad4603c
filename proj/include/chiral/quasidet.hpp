#pragma once

// Quasideterminants over scalar entries and over the noncommutative ring of
// n x n complex matrices, plus residual checks for the noncommutative Jacobi
// identity and the homological relation.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "chiral/matrix.hpp"

namespace chiral {

/// A rows x cols grid of n x n blocks with one boxed (expansion) block.
class BlockGrid {
public:
  BlockGrid(std::size_t rows, std::size_t cols, std::size_t n)
      : rows_(rows), cols_(cols), n_(n), blocks_(rows * cols, Matrix::zeros(n)),
        boxed_row_(rows - 1), boxed_col_(cols - 1) {
    if (rows == 0 || cols == 0 || n == 0) throw DimensionError("BlockGrid: empty grid");
  }

  // Row-by-row literal, boxed at the bottom-right unless moved with box().
  BlockGrid(std::initializer_list<std::initializer_list<Matrix>> rows)
      : BlockGrid(rows.size(), rows.begin()->size(), rows.begin()->begin()->size()) {
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("BlockGrid: ragged literal");
      std::size_t j = 0;
      for (const Matrix& m : r) set(i, j++, m);
      ++i;
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t block_size() const { return n_; }
  std::size_t boxed_row() const { return boxed_row_; }
  std::size_t boxed_col() const { return boxed_col_; }

  const Matrix& block(std::size_t i, std::size_t j) const { return blocks_.at(i * cols_ + j); }

  void set(std::size_t i, std::size_t j, Matrix m) {
    if (i >= rows_ || j >= cols_) throw DimensionError("BlockGrid::set: index out of range");
    if (m.size() != n_) throw DimensionError("BlockGrid::set: block size differs from grid");
    blocks_[i * cols_ + j] = std::move(m);
  }

  BlockGrid& box(std::size_t i, std::size_t j) {
    if (i >= rows_ || j >= cols_) throw DimensionError("BlockGrid::box: index out of range");
    boxed_row_ = i;
    boxed_col_ = j;
    return *this;
  }

private:
  std::size_t rows_, cols_, n_;
  std::vector<Matrix> blocks_;
  std::size_t boxed_row_, boxed_col_;
};

namespace detail {

inline std::vector<std::size_t> all_but(std::size_t count, std::size_t skip) {
  std::vector<std::size_t> idx;
  idx.reserve(count - 1);
  for (std::size_t k = 0; k < count; ++k)
    if (k != skip) idx.push_back(k);
  return idx;
}

// Dense (rows.size()*n) x (cols.size()*n) flattening of a block subset, stored
// in a square Matrix (callers only ask for square subsets).
inline Matrix flatten(const BlockGrid& g, std::span<const std::size_t> rows,
                      std::span<const std::size_t> cols) {
  const std::size_t n = g.block_size();
  if (rows.size() != cols.size()) throw DimensionError("flatten: non-square block subset");
  Matrix out(rows.size() * n);
  for (std::size_t bi = 0; bi < rows.size(); ++bi)
    for (std::size_t bj = 0; bj < cols.size(); ++bj) {
      const Matrix& b = g.block(rows[bi], cols[bj]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(bi * n + i, bj * n + j) = b(i, j);
    }
  return out;
}

}  // namespace detail

/// Deleted submatrix of the grid (boxed block row and column removed),
/// flattened. Its invertibility is the precondition of qdet_block.
inline Matrix qdet_deleted_block(const BlockGrid& g) {
  const auto rows = detail::all_but(g.rows(), g.boxed_row());
  const auto cols = detail::all_but(g.cols(), g.boxed_col());
  return detail::flatten(g, rows, cols);
}

/// Quasideterminant expanded about the boxed block: D - C A^-1 B, where A is
/// the deleted submatrix, B the boxed column without the boxed block and C the
/// boxed row without it. Other rows/cols keep their relative order, which is
/// the relabelling that moves the boxed block to the bottom-right.
inline Matrix qdet_block(const BlockGrid& g, double gate = kPivotGate) {
  if (g.rows() != g.cols()) throw DimensionError("qdet_block: grid must be square");
  const std::size_t n = g.block_size();
  const Matrix& d = g.block(g.boxed_row(), g.boxed_col());
  if (g.rows() == 1) return d;

  const auto rows = detail::all_but(g.rows(), g.boxed_row());
  const auto cols = detail::all_but(g.cols(), g.boxed_col());
  const Matrix a_inv = invert(detail::flatten(g, rows, cols), gate);
  const std::size_t m = rows.size() * n;

  // C A^-1 is n x m, B is m x n; assemble both as raw arrays.
  std::vector<Complex> c_ainv(n * m, Complex{});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t bj = 0; bj < cols.size(); ++bj) {
      const Matrix& c = g.block(g.boxed_row(), cols[bj]);
      for (std::size_t jj = 0; jj < n; ++jj) {
        const Complex cij = c(i, jj);
        if (cij == Complex{}) continue;
        const std::size_t col = bj * n + jj;
        for (std::size_t k = 0; k < m; ++k) c_ainv[i * m + k] += cij * a_inv(col, k);
      }
    }

  Matrix out = d;
  for (std::size_t bi = 0; bi < rows.size(); ++bi) {
    const Matrix& b = g.block(rows[bi], g.boxed_col());
    for (std::size_t ii = 0; ii < n; ++ii) {
      const std::size_t k = bi * n + ii;
      for (std::size_t i = 0; i < n; ++i) {
        const Complex ck = c_ainv[i * m + k];
        if (ck == Complex{}) continue;
        for (std::size_t j = 0; j < n; ++j) out(i, j) -= ck * b(ii, j);
      }
    }
  }
  return out;
}

/// Scalar quasideterminant |X|_ij = x_ij - r_i^j (X^ij)^-1 c_j^i (0-based i, j).
inline Complex qdet_scalar(const Matrix& x, std::size_t i, std::size_t j,
                           double gate = kPivotGate) {
  const std::size_t n = x.size();
  if (n < 2) throw DimensionError("qdet_scalar: need at least a 2x2 matrix");
  if (i >= n || j >= n) throw DimensionError("qdet_scalar: index out of range");
  const auto rows = detail::all_but(n, i);
  const auto cols = detail::all_but(n, j);
  Matrix minor(n - 1);
  for (std::size_t a = 0; a < n - 1; ++a)
    for (std::size_t b = 0; b < n - 1; ++b) minor(a, b) = x(rows[a], cols[b]);
  const Matrix minor_inv = invert(minor, gate);
  Complex acc{};
  for (std::size_t a = 0; a < n - 1; ++a)
    for (std::size_t b = 0; b < n - 1; ++b)
      acc += x(i, cols[a]) * minor_inv(a, b) * x(rows[b], j);
  return x(i, j) - acc;
}

/// (-1)^(i+j) det X / det X^ij, the commutative value of |X|_ij.
inline Complex determinant_ratio(const Matrix& x, std::size_t i, std::size_t j) {
  const std::size_t n = x.size();
  if (n < 2 || i >= n || j >= n) throw DimensionError("determinant_ratio: bad shape");
  const auto rows = detail::all_but(n, i);
  const auto cols = detail::all_but(n, j);
  Matrix minor(n - 1);
  for (std::size_t a = 0; a < n - 1; ++a)
    for (std::size_t b = 0; b < n - 1; ++b) minor(a, b) = x(rows[a], cols[b]);
  const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  return sign * det(x) / det(minor);
}

namespace detail {

inline void require_grid3(const BlockGrid& g, const char* who) {
  if (g.rows() != 3 || g.cols() != 3)
    throw DimensionError(std::string(who) + ": expected a 3x3 block grid");
}

inline BlockGrid sub2(const BlockGrid& g, std::size_t r0, std::size_t r1, std::size_t c0,
                      std::size_t c1) {
  return BlockGrid{{g.block(r0, c0), g.block(r0, c1)}, {g.block(r1, c0), g.block(r1, c1)}};
}

}  // namespace detail

/// Relative residual of the noncommutative Jacobi identity for the grid
///   [E F G; H A B; J C D]  expanded about D:
///   |3x3|_D = |E G; J D| - |E F; J C| |E F; H A|^-1 |E G; H B|.
/// The grid's own boxed coordinates are ignored.
inline double check_nc_jacobi(const BlockGrid& g, double gate = kPivotGate) {
  detail::require_grid3(g, "check_nc_jacobi");
  BlockGrid full = g;
  full.box(2, 2);
  const Matrix lhs = qdet_block(full, gate);
  const Matrix egjd = qdet_block(detail::sub2(g, 0, 2, 0, 2), gate);
  const Matrix efjc = qdet_block(detail::sub2(g, 0, 2, 0, 1), gate);
  const Matrix efha = qdet_block(detail::sub2(g, 0, 1, 0, 1), gate);
  const Matrix eghb = qdet_block(detail::sub2(g, 0, 1, 0, 2), gate);
  const Matrix rhs = egjd - efjc * invert(efha, gate) * eghb;
  return relative_difference(lhs, rhs);
}

/// Relative residual of the homological relation
///   |E F G; H A [B]; J C D| = |E F O; H A [O]; J C I| |E F G; H A B; J C [D]|.
inline double check_homological(const BlockGrid& g, double gate = kPivotGate) {
  detail::require_grid3(g, "check_homological");
  const std::size_t n = g.block_size();
  BlockGrid boxed_b = g;
  boxed_b.box(1, 2);
  BlockGrid boxed_o = g;
  boxed_o.set(0, 2, Matrix::zeros(n));
  boxed_o.set(1, 2, Matrix::zeros(n));
  boxed_o.set(2, 2, Matrix::identity(n));
  boxed_o.box(1, 2);
  BlockGrid boxed_d = g;
  boxed_d.box(2, 2);
  const Matrix lhs = qdet_block(boxed_b, gate);
  const Matrix rhs = qdet_block(boxed_o, gate) * qdet_block(boxed_d, gate);
  return relative_difference(lhs, rhs);
}

/// Largest condition number among the inverses that check_nc_jacobi and
/// check_homological need.
inline double identity_condition(const BlockGrid& g) {
  detail::require_grid3(g, "identity_condition");
  const std::vector<std::size_t> r01{0, 1}, r02{0, 2}, c01{0, 1};
  double worst = condition_number(g.block(0, 0));
  worst = std::max(worst, condition_number(detail::flatten(g, r01, c01)));
  worst = std::max(worst, condition_number(detail::flatten(g, r02, c01)));
  try {
    worst = std::max(worst, condition_number(qdet_block(detail::sub2(g, 0, 1, 0, 1))));
  } catch (const SingularMatrixError&) {
    return std::numeric_limits<double>::infinity();
  }
  return worst;
}

/// Block with entries uniform in the complex unit square [0,1) x [0,1).
template <class Rng>
Matrix random_block(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = u(rng);
      const double im = u(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

template <class Rng>
BlockGrid random_grid(Rng& rng, std::size_t rows, std::size_t cols, std::size_t n) {
  BlockGrid g(rows, cols, n);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) g.set(i, j, random_block(rng, n));
  return g;
}

/// Random 3x3 grid of n x n blocks whose required inverses all have
/// condition number <= cond_limit. `resamples` counts rejected draws.
template <class Rng>
BlockGrid draw_identity_grid(Rng& rng, std::size_t n, double cond_limit,
                             std::size_t& resamples) {
  for (;;) {
    BlockGrid g = random_grid(rng, 3, 3, n);
    if (identity_condition(g) <= cond_limit) return g;
    ++resamples;
  }
}

}  // namespace chiral
