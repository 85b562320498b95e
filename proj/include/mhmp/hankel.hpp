#pragma once

#include <cstddef>
#include <vector>

#include "mhmp/linalg.hpp"

namespace mhmp {

/// Moment data s_0..s_2n, each a Hermitian m x m block.
struct MomentProblem {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<CMatrix> s;

  /// Throws ShapeError or NotHermitian when the invariants fail.
  void validate() const;
};

struct BlockSystem {
  std::size_t m = 0;
  std::size_t n = 0;
  CMatrix K;  // (s_{i+j}), i, j = 0..n
  CMatrix F;  // identities on the block subdiagonal
  CMatrix U;  // (I, 0, ..., 0)^T
  CMatrix M;  // F K U = (0, s_0, ..., s_{n-1})^T
  CMatrix J;  // [[0, iI], [-iI, 0]]
};

/// Block Hankel matrix (s_{i+j}) for i, j = 0..order.
[[nodiscard]] CMatrix hankel_matrix(const std::vector<CMatrix>& s, std::size_t order);
/// Block shift of order n with m x m blocks.
[[nodiscard]] CMatrix shift_matrix(std::size_t m, std::size_t n);
[[nodiscard]] CMatrix signature_matrix(std::size_t m);

[[nodiscard]] BlockSystem assemble(const MomentProblem& p);

/// max |F K - K F* - (M U* - U M*)|
[[nodiscard]] double lyapunov_residual(const BlockSystem& sys);

/// Shift test for the Hankel property of a square block grid with r x l
/// blocks.
[[nodiscard]] bool hankel_characterization(const CMatrix& t, std::size_t r, std::size_t l);
/// Entrywise test t_{i,j} == t_{i+j} with the same tolerance.
[[nodiscard]] bool is_block_hankel(const CMatrix& t, std::size_t r, std::size_t l);

struct ClassReport {
  bool psd = false;
  bool in_Htilde = false;
  std::size_t rank_K = 0;
  CMatrix L_basis;  // m x dim L, orthonormal columns
  CMatrix R;        // tail residue, m x m
  double kernel_proj_residual = 0.0;
};

[[nodiscard]] ClassReport classify(const MomentProblem& p, double tol = kDefaultRankTol);

/// The Schur residue s_2n - Y K_{n-1}^[-1] Y* with K_{n-1}^[-1] built from q.
/// For n = 0 this is s_0.
[[nodiscard]] CMatrix tail_residue(const MomentProblem& p, const CMatrix& q,
                                   double tol = kDefaultRankTol);

/// Replaces s_2n by the largest tail that keeps the solution set and lands in
/// the kernel-projection class. Inputs already in the class come back
/// unchanged.
[[nodiscard]] MomentProblem normalize_tail(const MomentProblem& p, double tol = kDefaultRankTol);

}  // namespace mhmp
