#pragma once

#include <cstddef>
#include <vector>

#include "mhmp/hankel.hpp"
#include "mhmp/linalg.hpp"

namespace mhmp {

struct CompressedHead {
  CMatrix v;  // unitary m x m
  CMatrix g;  // first l rows of v
  std::size_t l = 0;
  std::vector<CMatrix> t;  // g s_i g*, empty when l = 0
};

/// Simultaneous compression of all blocks onto the range of s_0.
[[nodiscard]] CompressedHead compress_head(const MomentProblem& p, double tol = kDefaultRankTol);

/// Pieces of the Hankel-preserving Schur reduction of T_n = (t_{i+j}).
struct SchurPieces {
  CMatrix D;      // block lower-triangular Toeplitz from t_0..t_{n-1}
  CMatrix D_inv;
  CMatrix S;      // (t_{i+j}), i, j = 1..n
  CMatrix T_col;  // col(t_1, ..., t_n)
  CMatrix T_hat;  // D^{-1} (S - T_col t_0^{-1} T_col*) D^{-*}
};

/// Requires t_0 positive definite and t.size() = 2n + 1 with n >= 1.
[[nodiscard]] SchurPieces schur_pieces(const std::vector<CMatrix>& t);

/// Hankel blocks t^_0..t^_{2n-2} of the reduced matrix.
[[nodiscard]] std::vector<CMatrix> hankel_schur_reduce(const std::vector<CMatrix>& t);

struct Compression {
  CMatrix Q;     // r x m(n+1)
  CMatrix N;     // r x r, Q F = N Q
  CMatrix Kinv;  // Q* (Q K Q*)^{-1} Q
  std::size_t r = 0;
};

/// Recursive shift-coinvariant compression of K_n. Requires the kernel
/// projection class.
[[nodiscard]] Compression build_QN(const MomentProblem& p, double tol = kDefaultRankTol);

/// max |Q F - N Q|
[[nodiscard]] double coinvariance_residual(const Compression& c, const CMatrix& f);

}  // namespace mhmp
