#include "mhmp/hankel.hpp"

#include <algorithm>
#include <string>

namespace mhmp {

void MomentProblem::validate() const {
  if (s.size() != 2 * n + 1) {
    throw Error(ErrorKind::ShapeError, "expected " + std::to_string(2 * n + 1) + " blocks, got " +
                                           std::to_string(s.size()));
  }
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k].rows() != m || s[k].cols() != m) {
      throw Error(ErrorKind::ShapeError, "block s_" + std::to_string(k) + " is not m x m");
    }
    if (!is_hermitian(s[k])) {
      throw Error(ErrorKind::NotHermitian, "block s_" + std::to_string(k));
    }
  }
}

CMatrix hankel_matrix(const std::vector<CMatrix>& s, std::size_t order) {
  if (s.size() < 2 * order + 1) throw Error(ErrorKind::ShapeError, "too few blocks");
  const std::size_t m = s.front().rows();
  CMatrix k(m * (order + 1), m * (order + 1));
  for (std::size_t i = 0; i <= order; ++i)
    for (std::size_t j = 0; j <= order; ++j) k.set_block(i * m, j * m, s[i + j]);
  return k;
}

CMatrix shift_matrix(std::size_t m, std::size_t n) {
  CMatrix f(m * (n + 1), m * (n + 1));
  for (std::size_t i = m; i < m * (n + 1); ++i) f(i, i - m) = 1.0;
  return f;
}

CMatrix signature_matrix(std::size_t m) {
  CMatrix j(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    j(i, m + i) = kI;
    j(m + i, i) = -kI;
  }
  return j;
}

BlockSystem assemble(const MomentProblem& p) {
  p.validate();
  BlockSystem sys;
  sys.m = p.m;
  sys.n = p.n;
  sys.K = hankel_matrix(p.s, p.n);
  sys.F = shift_matrix(p.m, p.n);
  sys.U = CMatrix(p.m * (p.n + 1), p.m);
  sys.U.set_block(0, 0, CMatrix::identity(p.m));
  sys.M = CMatrix(p.m * (p.n + 1), p.m);
  for (std::size_t k = 0; k < p.n; ++k) sys.M.set_block((k + 1) * p.m, 0, p.s[k]);
  sys.J = signature_matrix(p.m);
  return sys;
}

double lyapunov_residual(const BlockSystem& sys) {
  const CMatrix lhs = sys.F * sys.K - sys.K * sys.F.adjoint();
  const CMatrix rhs = sys.M * sys.U.adjoint() - sys.U * sys.M.adjoint();
  return max_abs_diff(lhs, rhs);
}

namespace {

std::size_t grid_order(const CMatrix& t, std::size_t r, std::size_t l) {
  if (r == 0 || l == 0 || t.rows() % r != 0 || t.cols() % l != 0 || t.rows() / r != t.cols() / l) {
    throw Error(ErrorKind::ShapeError, "matrix does not fit a square block grid");
  }
  return t.rows() / r;
}

}  // namespace

bool hankel_characterization(const CMatrix& t, std::size_t r, std::size_t l) {
  const std::size_t blocks = grid_order(t, r, l);
  const CMatrix fr = shift_matrix(r, blocks - 1);
  const CMatrix fl = shift_matrix(l, blocks - 1);
  const CMatrix probe = fr.adjoint() * (fr * t - t * fl.adjoint()) * fl;
  return probe.max_abs() <= 1e-11 * (1.0 + t.max_abs());
}

bool is_block_hankel(const CMatrix& t, std::size_t r, std::size_t l) {
  const std::size_t blocks = grid_order(t, r, l);
  const double bound = 1e-11 * (1.0 + t.max_abs());
  for (std::size_t i = 0; i + 1 < blocks; ++i)
    for (std::size_t j = 0; j + 1 < blocks; ++j) {
      const CMatrix a = t.block(i * r, (j + 1) * l, r, l);
      const CMatrix b = t.block((i + 1) * r, j * l, r, l);
      if (max_abs_diff(a, b) > bound) return false;
    }
  return true;
}

namespace {

/// (s_n, ..., s_{2n-1})
CMatrix tail_row(const MomentProblem& p) {
  CMatrix y(p.m, p.m * p.n);
  for (std::size_t k = 0; k < p.n; ++k) y.set_block(0, k * p.m, p.s[p.n + k]);
  return y;
}

/// col(s_{n+1}, ..., s_{2n})
CMatrix tail_column(const MomentProblem& p) {
  CMatrix c(p.m * p.n, p.m);
  for (std::size_t k = 0; k < p.n; ++k) c.set_block(k * p.m, 0, p.s[p.n + 1 + k]);
  return c;
}

CMatrix residue_with(const MomentProblem& p, const CMatrix& head, const CMatrix& q, double tol) {
  const CMatrix y = tail_row(p);
  const CMatrix kinv = pseudo_inverse(head, q, tol);
  return hermitian_part(p.s[2 * p.n] - y * kinv * y.adjoint());
}

}  // namespace

CMatrix tail_residue(const MomentProblem& p, const CMatrix& q, double tol) {
  p.validate();
  if (p.n == 0) return p.s[0];
  return residue_with(p, hankel_matrix(p.s, p.n - 1), q, tol);
}

ClassReport classify(const MomentProblem& p, double tol) {
  p.validate();
  ClassReport rep;
  const CMatrix k = hankel_matrix(p.s, p.n);
  const auto full = rank_kernel(k, tol);
  rep.rank_K = full.rank;
  rep.psd = is_psd(k, tol);
  if (p.n == 0) {
    rep.in_Htilde = rep.psd;
    rep.L_basis = CMatrix(p.m, 0);
    rep.R = p.s[0];
    return rep;
  }
  const CMatrix head = hankel_matrix(p.s, p.n - 1);
  const auto ker = rank_kernel(head, tol);
  const CMatrix col = tail_column(p);
  rep.kernel_proj_residual = (ker.projector * col).max_abs();
  rep.in_Htilde = rep.psd && rep.kernel_proj_residual <= tol * (1.0 + col.max_abs());

  const std::size_t dim = ker.kernel_basis.cols();
  if (dim == 0) {
    rep.L_basis = CMatrix(p.m, 0);
  } else {
    const CMatrix last = ker.kernel_basis.block(p.m * (p.n - 1), 0, p.m, dim);
    rep.L_basis = orthonormal_range(last, tol);
  }
  rep.R = residue_with(p, head, range_compression(head, tol), tol);
  return rep;
}

MomentProblem normalize_tail(const MomentProblem& p, double tol) {
  const ClassReport rep = classify(p, tol);
  if (!rep.psd) throw Error(ErrorKind::NotPSD, "tail normalization needs a PSD Hankel matrix");
  if (p.n == 0 || rep.in_Htilde) return p;

  // Shorted operator of R to the orthogonal complement of L: the largest
  // 0 <= R_0 <= R vanishing on L.
  const CMatrix& lb = rep.L_basis;
  const CMatrix bperp = orthonormal_complement(lb, tol);
  const CMatrix& r = rep.R;
  CMatrix r0(p.m, p.m);
  if (bperp.cols() > 0) {
    const CMatrix r_bb = bperp.adjoint() * r * bperp;
    CMatrix reduced = r_bb;
    if (lb.cols() > 0) {
      const CMatrix r_ll = hermitian_part(lb.adjoint() * r * lb);
      const CMatrix r_lb = lb.adjoint() * r * bperp;
      const CMatrix r_ll_pinv = pseudo_inverse(r_ll, range_compression(r_ll, tol), tol);
      reduced -= r_lb.adjoint() * r_ll_pinv * r_lb;
    }
    r0 = hermitian_part(bperp * reduced * bperp.adjoint());
  }

  MomentProblem out = p;
  out.s[2 * p.n] = hermitian_part(p.s[2 * p.n] - r + r0);
  return out;
}

}  // namespace mhmp
