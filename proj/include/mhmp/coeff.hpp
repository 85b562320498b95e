#pragma once

#include <cstddef>

#include "mhmp/hankel.hpp"
#include "mhmp/linalg.hpp"
#include "mhmp/polynomial.hpp"
#include "mhmp/reduce.hpp"

namespace mhmp {

/// Theta(z) = I + z [M*; -U*] (I - zF*)^{-1} K^[-1] (U, M), degree <= n+1.
[[nodiscard]] MatrixPolynomial theta_build(const BlockSystem& sys, const Compression& c);

struct JResiduals {
  double r_unitary = 0.0;  // at x = Re z
  double r_326 = 0.0;
  double r_327 = 0.0;
};

/// Gaps of the J-form identities at z; r_unitary is evaluated on the real
/// axis at Re z. Throws SingularTheta when Theta(z) cannot be inverted.
[[nodiscard]] JResiduals j_residuals(const MatrixPolynomial& theta, const BlockSystem& sys,
                                     const Compression& c, cplx z);

/// max |Theta(x) J Theta(x)* - J| for real x.
[[nodiscard]] double j_unitary_residual(const MatrixPolynomial& theta, const CMatrix& j,
                                        double x);

/// Smallest eigenvalue of Theta(z) J Theta(z)* - J.
[[nodiscard]] double j_expansive_margin(const MatrixPolynomial& theta, const CMatrix& j, cplx z);

struct Corrector {
  CMatrix Psi;  // J-unitary
  CMatrix T;    // invertible, T P (U, M) Psi = [[I_nu, 0], [0, 0]]
  std::size_t nu = 0;
};

/// rank (U* + iM*) P_Ker
[[nodiscard]] std::size_t neutral_rank(const BlockSystem& sys, const KernelData& kernel,
                                       double tol = kDefaultRankTol);
/// rank P_Ker (U + iM)
[[nodiscard]] std::size_t neutral_rank_alt(const BlockSystem& sys, const KernelData& kernel,
                                           double tol = kDefaultRankTol);

[[nodiscard]] Corrector build_corrector(const BlockSystem& sys, const KernelData& kernel,
                                        double tol = kDefaultRankTol);

/// A(z) = Theta(z) Psi
[[nodiscard]] MatrixPolynomial coefficient_matrix(const MatrixPolynomial& theta,
                                                  const Corrector& corr);

}  // namespace mhmp
