#include "mhmp/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mhmp {

namespace {

/// (I - z A)^{-1} for nilpotent A of index <= order+1.
CMatrix nilpotent_resolvent(const CMatrix& a, cplx z, std::size_t order) {
  CMatrix acc = CMatrix::identity(a.rows());
  CMatrix term = CMatrix::identity(a.rows());
  for (std::size_t j = 1; j <= order; ++j) {
    term = (term * a) * z;
    acc += term;
  }
  return acc;
}

CMatrix input_block(const BlockSystem& sys) { return hstack(sys.U, sys.M); }

CMatrix output_block(const BlockSystem& sys) { return vstack(sys.M.adjoint(), -sys.U.adjoint()); }

std::size_t gram_rank(const CMatrix& x, double tol) {
  if (x.empty()) return 0;
  const CMatrix gram = x.rows() <= x.cols() ? x * x.adjoint() : x.adjoint() * x;
  return rank_kernel(hermitian_part(gram), tol).rank;
}

}  // namespace

MatrixPolynomial theta_build(const BlockSystem& sys, const Compression& c) {
  const std::size_t two_m = 2 * sys.m;
  std::vector<CMatrix> coeffs;
  coeffs.reserve(sys.n + 2);
  coeffs.push_back(CMatrix::identity(two_m));
  const CMatrix b = input_block(sys);
  const CMatrix fstar = sys.F.adjoint();
  CMatrix left = output_block(sys);  // C F*^j
  const CMatrix kb = c.Kinv * b;
  for (std::size_t j = 0; j <= sys.n; ++j) {
    coeffs.push_back(left * kb);
    left = left * fstar;
  }
  return MatrixPolynomial(std::move(coeffs));
}

double j_unitary_residual(const MatrixPolynomial& theta, const CMatrix& j, double x) {
  const CMatrix t = theta(cplx{x, 0.0});
  return max_abs_diff(t * j * t.adjoint(), j);
}

double j_expansive_margin(const MatrixPolynomial& theta, const CMatrix& j, cplx z) {
  const CMatrix t = theta(z);
  return min_eigenvalue(hermitian_part(t * j * t.adjoint() - j));
}

JResiduals j_residuals(const MatrixPolynomial& theta, const BlockSystem& sys,
                       const Compression& c, cplx z) {
  JResiduals out;
  out.r_unitary = j_unitary_residual(theta, sys.J, z.real());

  const CMatrix t = theta(z);
  const CMatrix b = input_block(sys);
  const CMatrix bstar = b.adjoint();
  const CMatrix& f = sys.F;
  const CMatrix fstar = f.adjoint();
  const cplx factor = kI * (std::conj(z) - z);

  const CMatrix lhs26 = t.adjoint() * sys.J * t - sys.J;
  const CMatrix rhs26 = factor * (bstar * c.Kinv * nilpotent_resolvent(f, std::conj(z), sys.n) *
                                  sys.K * nilpotent_resolvent(fstar, z, sys.n) * c.Kinv * b);
  out.r_326 = max_abs_diff(lhs26, rhs26);

  const auto tinv = try_inverse(t);
  if (!tinv) throw Error(ErrorKind::SingularTheta, "Theta(z) is not invertible");
  const CMatrix lhs27 = sys.J - tinv->adjoint() * sys.J * *tinv;
  const CMatrix rhs27 = factor * (bstar * nilpotent_resolvent(fstar, std::conj(z), sys.n) *
                                  c.Kinv * nilpotent_resolvent(f, z, sys.n) * b);
  out.r_327 = max_abs_diff(lhs27, rhs27);
  return out;
}

std::size_t neutral_rank(const BlockSystem& sys, const KernelData& kernel, double tol) {
  const CMatrix row = (sys.U + kI * sys.M).adjoint() * kernel.projector;
  return gram_rank(row, tol);
}

std::size_t neutral_rank_alt(const BlockSystem& sys, const KernelData& kernel, double tol) {
  return gram_rank(kernel.projector * (sys.U + kI * sys.M), tol);
}

Corrector build_corrector(const BlockSystem& sys, const KernelData& kernel, double tol) {
  const std::size_t m = sys.m;
  const std::size_t dim = sys.K.rows();
  const CMatrix r = kernel.projector * input_block(sys);
  const CMatrix& j = sys.J;
  const double neutrality = (r * j * r.adjoint()).max_abs();
  const double rnorm = r.max_abs();
  if (neutrality > 1e-9 * (1.0 + rnorm * rnorm)) {
    throw Error(ErrorKind::NotNeutral, "P_Ker (U, M) is not J-neutral");
  }

  Corrector out;
  out.nu = neutral_rank(sys, kernel, tol);
  if (neutral_rank_alt(sys, kernel, tol) != out.nu) {
    throw Error(ErrorKind::RankMismatch, "neutral rank estimates disagree");
  }
  const std::size_t nu = out.nu;
  if (nu == 0) {
    out.Psi = CMatrix::identity(2 * m);
    out.T = CMatrix::identity(dim);
    return out;
  }

  // T from R R* = W diag(w) W*: the top nu directions scaled to produce
  // orthonormal rows, the rest annihilate R.
  const auto eig = herm_eig(hermitian_part(r * r.adjoint()));
  out.T = CMatrix(dim, dim);
  CMatrix rhat(nu, 2 * m);
  for (std::size_t k = 0; k < nu; ++k) {
    const std::size_t col = dim - 1 - k;
    const double scale = 1.0 / std::sqrt(eig.values[col]);
    for (std::size_t i = 0; i < dim; ++i) out.T(k, i) = std::conj(eig.vectors(i, col)) * scale;
  }
  for (std::size_t k = nu; k < dim; ++k) {
    const std::size_t col = dim - 1 - k;
    for (std::size_t i = 0; i < dim; ++i) out.T(k, i) = std::conj(eig.vectors(i, col));
  }
  rhat = out.T.block(0, 0, nu, dim) * r;

  // Rows of Phi = Psi^{-1}: neutral frame r^, n; J-duals h, d.
  const CMatrix h = (-kI) * (rhat * j);
  const CMatrix span = vstack(rhat, rhat * j);
  const CMatrix e_cols = orthonormal_complement(span.adjoint(), tol);  // 2m x (2m - 2nu)
  const CMatrix e = e_cols.adjoint();
  const std::size_t rest = m - nu;
  CMatrix nrows(rest, 2 * m);
  CMatrix drows(rest, 2 * m);
  if (rest > 0) {
    if (e.rows() != 2 * rest) {
      throw Error(ErrorKind::NotNeutral, "J-orthogonal complement has the wrong dimension");
    }
    const auto g = herm_eig(hermitian_part(e * j * e.adjoint()));
    // values ascending: first `rest` are -1, last `rest` are +1
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t k = 0; k < rest; ++k) {
      const CMatrix y_minus = g.vectors.col(k);
      const CMatrix y_plus = g.vectors.col(2 * rest - 1 - k);
      const CMatrix q = y_minus.adjoint() * e;
      const CMatrix p = y_plus.adjoint() * e;
      nrows.set_block(k, 0, (p + q) * s);
      drows.set_block(k, 0, (p - q) * (-kI * s));
    }
  }
  const CMatrix phi = vstack(vstack(rhat, nrows), vstack(h, drows));
  out.Psi = j * phi.adjoint() * j;
  return out;
}

MatrixPolynomial coefficient_matrix(const MatrixPolynomial& theta, const Corrector& corr) {
  return theta * corr.Psi;
}

}  // namespace mhmp
