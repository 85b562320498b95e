#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mhmp/coeff.hpp"
#include "mhmp/hankel.hpp"
#include "mhmp/linalg.hpp"
#include "mhmp/polynomial.hpp"
#include "mhmp/reduce.hpp"

namespace mhmp {

struct ConstantPair {
  CMatrix p;
  CMatrix q;

  /// Throws NotInClass if [p; q] is rank deficient or q*p is not Hermitian.
  void validate(double tol = kDefaultRankTol) const;
};

struct StructuredPair {
  std::size_t nu = 0;
  CMatrix ptilde;  // (m - nu) square
  CMatrix qtilde;

  /// The canonical pair {0, I}.
  static StructuredPair canonical(std::size_t m, std::size_t nu);
  /// p = diag(0_nu, ptilde), q = diag(I_nu, qtilde)
  [[nodiscard]] ConstantPair expand() const;
};

struct AtomicMeasure {
  struct Atom {
    double lambda = 0.0;
    CMatrix weight;
  };
  std::size_t m = 0;
  std::vector<Atom> atoms;

  /// sum_j lambda_j^k weight_j
  [[nodiscard]] CMatrix moment(std::size_t k) const;
  /// sum_j weight_j / (lambda_j - z)
  [[nodiscard]] CMatrix transform(cplx z) const;
};

/// w(z) = numerators(z) / denominator(z)
struct RationalPick {
  PolyMatrix numerators;
  Poly denominator;

  [[nodiscard]] CMatrix operator()(cplx z) const;
  /// Exact rational form of a finite atomic measure.
  static RationalPick from_measure(const AtomicMeasure& mu);
};

/// Everything the canonical solution is computed from.
struct Pipeline {
  BlockSystem sys;
  Compression comp;
  KernelData kernel;
  MatrixPolynomial theta;
  Corrector corr;
  MatrixPolynomial A;  // Theta Psi
};

/// Requires the kernel projection class.
[[nodiscard]] Pipeline build_pipeline(const MomentProblem& p, double tol = kDefaultRankTol);

/// (a11 p + a12 q)(a21 p + a22 q)^{-1}
[[nodiscard]] CMatrix lft(const MatrixPolynomial& a, const StructuredPair& pair, cplx z);

/// w = a12 a22^{-1} with cancelled common roots, in exact partial-fraction
/// form. Requires the kernel projection class.
[[nodiscard]] RationalPick canonical_solution(const MomentProblem& p, double tol = kDefaultRankTol);
[[nodiscard]] RationalPick canonical_solution(const Pipeline& pl);

using PickEvaluator = std::function<CMatrix(cplx)>;

/// Smallest eigenvalue of the fundamental block matrix at z divided by its
/// max-norm.
[[nodiscard]] double fmi_margin(const BlockSystem& sys, const PickEvaluator& w, cplx z);

/// True iff the fundamental block matrix is PSD to -1e-8 scale at every z.
/// Throws RealPoint for z on the real axis.
[[nodiscard]] bool fmi_check(const MomentProblem& p, const PickEvaluator& w,
                             const std::vector<cplx>& zs);

/// Atoms at the real denominator roots with weights -N(lambda)/d'(lambda).
[[nodiscard]] AtomicMeasure extract_measure(const RationalPick& w);

struct MomentReport {
  bool pass = false;
  std::vector<double> residuals;  // relative, k = 0..2n-1
  double tail_slack = 0.0;        // relative min eigenvalue of s_2n - m_2n
  std::vector<CMatrix> moments;   // m_0..m_2n
};

[[nodiscard]] MomentReport verify_moments(const AtomicMeasure& mu, const MomentProblem& p,
                                          double tol = 1e-8);

struct Extension {
  CMatrix s_next;   // s_{2n+1}
  CMatrix s_next2;  // s_{2n+2}
  CMatrix K_ext;    // K_{n+1}
  bool tail_normalized = false;  // s_2n was replaced before extending
  AtomicMeasure measure;
};

/// PSD Hankel extension from the canonical measure. When the input is not in
/// the kernel projection class its tail is normalized first and K_{n+1} is
/// built on the normalized s_2n.
[[nodiscard]] Extension extend(const MomentProblem& p, double tol = kDefaultRankTol);

/// (p - iq)(p + iq)^{-1}
[[nodiscard]] CMatrix cayley(const ConstantPair& pair);

}  // namespace mhmp
