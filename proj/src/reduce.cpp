#include "mhmp/reduce.hpp"

#include <algorithm>
#include <string>

namespace mhmp {

namespace {

// Blocks produced by the recursion carry roundoff from the Schur step, so the
// vanishing test on Ker s_0 is looser than the rank tolerance.
constexpr double kHeadResidualTol = 1e-8;

CompressedHead compress_blocks(const std::vector<CMatrix>& s, double tol, std::size_t max_rank) {
  const CMatrix& s0 = s.front();
  const std::size_t m = s0.rows();
  const auto eig = herm_eig(s0);
  double lmax = 0.0;
  for (double x : eig.values) lmax = std::max(lmax, std::abs(x));
  const double thr = tol * std::max(1.0, lmax);

  // Nonzero eigenvalues first in descending order, the kernel after; ties
  // keep index order.
  std::vector<std::size_t> nonzero, zero;
  for (std::size_t k = m; k-- > 0;)
    if (std::abs(eig.values[k]) > thr) nonzero.push_back(k);
  for (std::size_t k = 0; k < m; ++k)
    if (std::abs(eig.values[k]) <= thr) zero.push_back(k);
  std::stable_sort(nonzero.begin(), nonzero.end(), [&](std::size_t a, std::size_t b) {
    return eig.values[a] > eig.values[b];
  });

  if (nonzero.size() > max_rank) {
    zero.insert(zero.end(), nonzero.begin() + static_cast<std::ptrdiff_t>(max_rank), nonzero.end());
    nonzero.resize(max_rank);
  }

  CompressedHead head;
  head.l = nonzero.size();
  head.v = CMatrix(m, m);
  std::vector<std::size_t> order = nonzero;
  order.insert(order.end(), zero.begin(), zero.end());
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i < m; ++i) head.v(r, i) = std::conj(eig.vectors(i, order[r]));
  head.g = head.v.block(0, 0, head.l, m);

  double scale = 0.0;
  for (const auto& b : s) scale = std::max(scale, b.max_abs());
  const double bound = kHeadResidualTol * (1.0 + scale);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const CMatrix rotated = head.v * s[i] * head.v.adjoint();
    const CMatrix tail = rotated.block(head.l, 0, m - head.l, m);
    if (tail.max_abs() > bound) {
      throw Error(ErrorKind::CompressionResidual,
                  "s_" + std::to_string(i) + " does not vanish on Ker s_0");
    }
    if (head.l > 0) head.t.push_back(hermitian_part(rotated.block(0, 0, head.l, head.l)));
  }
  return head;
}

CMatrix block_diag_repeat(const CMatrix& g, std::size_t count) {
  CMatrix out(g.rows() * count, g.cols() * count);
  for (std::size_t k = 0; k < count; ++k) out.set_block(k * g.rows(), k * g.cols(), g);
  return out;
}

// `rank` is the rank of the full Hankel matrix of s, known from the top level;
// it caps the rank decisions made on noisy reduced blocks.
Compression compress_recursive(const std::vector<CMatrix>& s, double tol, std::size_t rank) {
  const std::size_t m = s.front().rows();
  const std::size_t n = (s.size() - 1) / 2;
  Compression c;
  if (rank == 0) {
    c.Q = CMatrix(0, m * (n + 1));
    c.N = CMatrix(0, 0);
    return c;
  }
  const CompressedHead head = compress_blocks(s, tol, rank);
  const std::size_t l = head.l;
  if (l == 0) {
    c.Q = CMatrix(0, m * (n + 1));
    c.N = CMatrix(0, 0);
    return c;
  }
  if (n == 0) {
    c.Q = head.g;
    c.N = CMatrix(l, l);
    c.r = l;
    return c;
  }

  const SchurPieces sp = schur_pieces(head.t);
  std::vector<CMatrix> reduced(2 * n - 1);
  for (std::size_t k = 0; k + 1 < 2 * n; ++k) {
    // average the anti-diagonal so the reduced blocks are exactly Hankel
    CMatrix acc(l, l);
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (k < i || k - i >= n) continue;
      acc += sp.T_hat.block(i * l, (k - i) * l, l, l);
      ++cnt;
    }
    reduced[k] = hermitian_part(acc * (1.0 / static_cast<double>(cnt)));
  }
  const Compression sub = compress_recursive(reduced, tol, rank - l);

  const CMatrix t0_inv = inverse(head.t[0]);
  // Phi = [[I, 0], [-D^{-1} T t_0^{-1}, D^{-1}]] blockdiag(g, ..., g)
  CMatrix lower(l + l * n, l + l * n);
  lower.set_block(0, 0, CMatrix::identity(l));
  lower.set_block(l, 0, -(sp.D_inv * sp.T_col * t0_inv));
  lower.set_block(l, l, sp.D_inv);
  const CMatrix phi = lower * block_diag_repeat(head.g, n + 1);

  c.r = l + sub.r;
  c.Q = block_diag(CMatrix::identity(l), sub.Q) * phi;
  c.N = CMatrix(c.r, c.r);
  if (sub.r > 0) {
    CMatrix u_tilde(l * n, l);
    u_tilde.set_block(0, 0, CMatrix::identity(l));
    c.N.set_block(l, 0, sub.Q * u_tilde * t0_inv);
    c.N.set_block(l, l, sub.N);
  }
  return c;
}

}  // namespace

CompressedHead compress_head(const MomentProblem& p, double tol) {
  if (!classify(p, tol).in_Htilde) {
    throw Error(ErrorKind::NotInClass, "head compression needs the kernel projection class");
  }
  return compress_blocks(p.s, tol, p.m);
}

SchurPieces schur_pieces(const std::vector<CMatrix>& t) {
  if (t.size() < 3 || t.size() % 2 == 0) throw Error(ErrorKind::ShapeError, "need 2n+1 >= 3 blocks");
  const std::size_t n = (t.size() - 1) / 2;
  const std::size_t l = t.front().rows();
  if (l == 0 || min_eigenvalue(t.front()) <= 0.0) {
    throw Error(ErrorKind::SingularHead, "t_0 is not positive definite");
  }
  const auto t0_inv_opt = try_inverse(t.front());
  if (!t0_inv_opt) throw Error(ErrorKind::SingularHead, "t_0 is numerically singular");
  const CMatrix& t0_inv = *t0_inv_opt;

  SchurPieces sp;
  // D^{-1} is block lower-triangular Toeplitz with e_0 = t_0^{-1},
  // e_k = -t_0^{-1} sum_{j=1..k} t_j e_{k-j}.
  std::vector<CMatrix> e(n);
  e[0] = t0_inv;
  for (std::size_t k = 1; k < n; ++k) {
    CMatrix acc(l, l);
    for (std::size_t j = 1; j <= k; ++j) acc += t[j] * e[k - j];
    e[k] = -(t0_inv * acc);
  }
  sp.D = CMatrix(l * n, l * n);
  sp.D_inv = CMatrix(l * n, l * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      sp.D.set_block(i * l, j * l, t[i - j]);
      sp.D_inv.set_block(i * l, j * l, e[i - j]);
    }
  sp.S = CMatrix(l * n, l * n);
  sp.T_col = CMatrix(l * n, l);
  for (std::size_t i = 0; i < n; ++i) {
    sp.T_col.set_block(i * l, 0, t[i + 1]);
    for (std::size_t j = 0; j < n; ++j) sp.S.set_block(i * l, j * l, t[i + j + 2]);
  }
  const CMatrix inner = sp.S - sp.T_col * t0_inv * sp.T_col.adjoint();
  sp.T_hat = hermitian_part(sp.D_inv * inner * sp.D_inv.adjoint());
  return sp;
}

std::vector<CMatrix> hankel_schur_reduce(const std::vector<CMatrix>& t) {
  const SchurPieces sp = schur_pieces(t);
  const std::size_t n = (t.size() - 1) / 2;
  const std::size_t l = t.front().rows();
  std::vector<CMatrix> out(2 * n - 1);
  for (std::size_t k = 0; k + 1 < 2 * n; ++k) {
    const std::size_t i = k < n ? 0 : k - (n - 1);
    out[k] = sp.T_hat.block(i * l, (k - i) * l, l, l);
  }
  return out;
}

Compression build_QN(const MomentProblem& p, double tol) {
  if (!classify(p, tol).in_Htilde) {
    throw Error(ErrorKind::NotInClass, "compression needs the kernel projection class");
  }
  const CMatrix k = hankel_matrix(p.s, p.n);
  Compression c = compress_recursive(p.s, tol, rank_kernel(k, tol).rank);
  c.Kinv = pseudo_inverse(k, c.Q, tol);
  return c;
}

double coinvariance_residual(const Compression& c, const CMatrix& f) {
  if (c.r == 0) return 0.0;
  return max_abs_diff(c.Q * f, c.N * c.Q);
}

}  // namespace mhmp
