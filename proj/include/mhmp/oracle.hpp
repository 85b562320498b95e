#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mhmp/hankel.hpp"
#include "mhmp/linalg.hpp"

namespace mhmp {

/// SplitMix64. split() derives an independent stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;
  /// uniform in [0, 1) from the top 53 bits
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// uniform integer in [lo, hi]
  std::size_t index(std::size_t lo, std::size_t hi) noexcept;
  SplitMix64 split() noexcept { return SplitMix64(next()); }

 private:
  std::uint64_t state_;
};

struct GeneratorSpec {
  struct Atom {
    double lambda = 0.0;
    CMatrix weight;
  };
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<Atom> atoms;
  std::uint64_t seed = 0;
};

/// s_k = sum_j lambda_j^k weight_j, k = 0..2n
[[nodiscard]] MomentProblem gen_from_measure(const GeneratorSpec& spec);

/// Seeded random measure with m <= 3, n <= 4, atom_count <= n + 1. Atoms lie
/// in [-2, 2], pairwise at least 0.1 apart; weights have eigenvalues in
/// [0.1, 1] on a random rank 1..m.
[[nodiscard]] std::pair<GeneratorSpec, MomentProblem> random_instance(std::size_t m, std::size_t n,
                                                                      std::size_t atom_count,
                                                                      std::uint64_t seed);

/// Random m x m PSD matrix of the stated rank with eigenvalues in [lo, hi].
[[nodiscard]] CMatrix random_psd(SplitMix64& rng, std::size_t m, std::size_t rank, double lo,
                                 double hi);

/// A forward-generated problem with a random PSD matrix added to s_2n. It is
/// PSD; it usually leaves the kernel projection class when K_{n-1} is
/// singular.
[[nodiscard]] MomentProblem random_psd_problem(std::size_t m, std::size_t n, std::size_t atom_count,
                                               std::uint64_t seed);

struct BruteReport {
  bool psd = false;
  bool in_Htilde = false;
  std::size_t rank_K = 0;
  double kernel_proj_residual = 0.0;
  CMatrix R;
};

/// Independent recomputation of the class test with a dense solver.
[[nodiscard]] BruteReport brute_classify(const MomentProblem& p, double tol = kDefaultRankTol);

}  // namespace mhmp
