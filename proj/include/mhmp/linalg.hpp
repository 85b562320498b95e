#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "mhmp/errors.hpp"

namespace mhmp {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// Dense complex matrix, row-major, value semantics.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static CMatrix diagonal(std::span<const double> d);
  static CMatrix diagonal(std::span<const cplx> d);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  [[nodiscard]] std::span<const cplx> entries() const noexcept { return data_; }

  [[nodiscard]] CMatrix adjoint() const;
  [[nodiscard]] CMatrix transpose() const;
  [[nodiscard]] CMatrix conj() const;
  [[nodiscard]] CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr,
                              std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);
  [[nodiscard]] CMatrix col(std::size_t j) const { return block(0, j, rows_, 1); }
  [[nodiscard]] CMatrix row(std::size_t i) const { return block(i, 0, 1, cols_); }

  /// Largest entry modulus; 0 for an empty matrix.
  [[nodiscard]] double max_abs() const noexcept;
  [[nodiscard]] cplx trace() const;

  CMatrix& operator+=(const CMatrix& b);
  CMatrix& operator-=(const CMatrix& b);
  CMatrix& operator*=(cplx s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

[[nodiscard]] double max_abs_diff(const CMatrix& a, const CMatrix& b);
[[nodiscard]] CMatrix hermitian_part(const CMatrix& a);
[[nodiscard]] CMatrix hstack(const CMatrix& a, const CMatrix& b);
[[nodiscard]] CMatrix vstack(const CMatrix& a, const CMatrix& b);
[[nodiscard]] CMatrix block_diag(const CMatrix& a, const CMatrix& b);

/// max |A[i][j] - conj(A[j][i])| <= 1e-12 (1 + maxabs(A)).
[[nodiscard]] bool is_hermitian(const CMatrix& a);

struct EigDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // unitary, column k pairs with values[k]
};

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr int kJacobiSweepBudget = 100;
inline constexpr std::size_t kMaxEigDimension = 512;

/// Cyclic complex Jacobi. Eigenvalue ties keep original index order.
[[nodiscard]] EigDecomposition herm_eig(const CMatrix& a);

struct KernelData {
  std::size_t rank = 0;
  CMatrix kernel_basis;  // orthonormal columns
  CMatrix projector;     // orthogonal projection onto the kernel
};

/// rank counts |lambda| > tol * max(1, |lambda|_max).
[[nodiscard]] KernelData rank_kernel(const CMatrix& a, double tol = kDefaultRankTol);

[[nodiscard]] bool is_psd(const CMatrix& a, double tol = kDefaultRankTol);
[[nodiscard]] double min_eigenvalue(const CMatrix& a);

/// Rows are the eigenvectors (conjugated) of the eigenvalues above the rank
/// threshold, so Q K Q* = diag(nonzero eigenvalues).
[[nodiscard]] CMatrix range_compression(const CMatrix& k, double tol = kDefaultRankTol);

/// K^[-1] = Q* (Q K Q*)^{-1} Q. Requires Q K Q* > 0 and rank Q K Q* = rank K.
[[nodiscard]] CMatrix pseudo_inverse(const CMatrix& k, const CMatrix& q,
                                     double tol = kDefaultRankTol);

/// Gaussian elimination with partial pivoting. Throws SingularMatrix when the
/// reciprocal 1-norm condition estimate falls below rcond_tol.
[[nodiscard]] CMatrix solve(const CMatrix& a, const CMatrix& b, double rcond_tol = 1e-14);
[[nodiscard]] CMatrix inverse(const CMatrix& a, double rcond_tol = 1e-14);
[[nodiscard]] std::optional<CMatrix> try_inverse(const CMatrix& a, double rcond_tol = 1e-14);

/// Orthonormal basis (columns) of the column space of x.
[[nodiscard]] CMatrix orthonormal_range(const CMatrix& x, double tol = kDefaultRankTol);
/// Orthonormal basis (columns) of the orthogonal complement of the column space.
[[nodiscard]] CMatrix orthonormal_complement(const CMatrix& x, double tol = kDefaultRankTol);

[[nodiscard]] double spectral_norm(const CMatrix& a);

}  // namespace mhmp
