#pragma once

#include <cstddef>
#include <vector>

#include "mhmp/linalg.hpp"

namespace mhmp {

/// Scalar polynomial, coefficient k multiplies z^k.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {}
  static Poly constant(cplx c) { return Poly({c}); }
  /// z - root
  static Poly linear_factor(cplx root) { return Poly({-root, 1.0}); }

  [[nodiscard]] const std::vector<cplx>& coeffs() const noexcept { return c_; }
  [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
  [[nodiscard]] cplx coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : cplx{}; }
  /// Index of the highest nonzero coefficient; -1 for the zero polynomial.
  [[nodiscard]] int degree() const noexcept;
  [[nodiscard]] bool is_zero() const noexcept { return degree() < 0; }

  [[nodiscard]] cplx operator()(cplx z) const noexcept;
  [[nodiscard]] Poly derivative() const;
  /// Coefficients of p(center + h) in powers of h.
  [[nodiscard]] std::vector<cplx> taylor(cplx center) const;
  [[nodiscard]] double max_abs_coeff() const noexcept;
  /// Upper bound of |p(z)| over |z| <= radius.
  [[nodiscard]] double magnitude_bound(double radius) const noexcept;

  Poly& operator+=(const Poly& b);
  Poly& operator-=(const Poly& b);
  Poly& operator*=(cplx s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, cplx s) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b);

 private:
  std::vector<cplx> c_;
};

/// Drops leading coefficients with |c| <= rel_tol * max|c|.
[[nodiscard]] Poly trimmed(const Poly& p, double rel_tol);

/// Roots via eigenvalues of the balanced companion matrix (Parlett-Reinsch
/// scaling). Exactly-zero leading coefficients are stripped first.
[[nodiscard]] std::vector<cplx> poly_roots(const Poly& p);

/// m x m grid of scalar polynomials.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  Poly& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const Poly& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  [[nodiscard]] CMatrix operator()(cplx z) const;
  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Poly> e_;
};

/// Laplace expansion; intended for the small block sizes of moment problems.
[[nodiscard]] Poly determinant(const PolyMatrix& a);
/// adj(A) with A * adj(A) = det(A) I.
[[nodiscard]] PolyMatrix adjugate(const PolyMatrix& a);

/// Matrix polynomial sum_k coeffs[k] z^k with equally shaped coefficients.
class MatrixPolynomial {
 public:
  MatrixPolynomial() = default;
  explicit MatrixPolynomial(std::vector<CMatrix> coeffs);

  [[nodiscard]] const std::vector<CMatrix>& coeffs() const noexcept { return c_; }
  [[nodiscard]] std::size_t rows() const noexcept { return c_.empty() ? 0 : c_.front().rows(); }
  [[nodiscard]] std::size_t cols() const noexcept { return c_.empty() ? 0 : c_.front().cols(); }
  /// Number of stored coefficients minus one.
  [[nodiscard]] std::size_t degree() const noexcept { return c_.empty() ? 0 : c_.size() - 1; }

  [[nodiscard]] CMatrix operator()(cplx z) const;
  [[nodiscard]] MatrixPolynomial derivative() const;
  [[nodiscard]] MatrixPolynomial block(std::size_t r0, std::size_t c0, std::size_t nr,
                                       std::size_t nc) const;
  [[nodiscard]] PolyMatrix entries() const;
  /// Right multiplication by a constant matrix.
  friend MatrixPolynomial operator*(const MatrixPolynomial& p, const CMatrix& c);

 private:
  std::vector<CMatrix> c_;
};

/// Finite eigenvalues (zeros of det P) of a square matrix polynomial, from a
/// shifted, reversed block companion linearization. Eigenvalues whose modulus
/// exceeds `finite_radius` are treated as infinite and dropped.
[[nodiscard]] std::vector<cplx> matrix_polynomial_eigenvalues(const MatrixPolynomial& p,
                                                              double finite_radius);

}  // namespace mhmp
