#pragma once

#include <cstdint>
#include <vector>

#include "mhmp/hankel.hpp"
#include "mhmp/linalg.hpp"
#include "mhmp/oracle.hpp"

namespace mhmp::testing {

inline MomentProblem fix_a() {
  MomentProblem p;
  p.m = 1;
  p.n = 1;
  p.s = {CMatrix{{1.0}}, CMatrix{{0.0}}, CMatrix{{0.0}}};
  return p;
}

inline MomentProblem fix_b() {
  MomentProblem p;
  p.m = 2;
  p.n = 1;
  const CMatrix e11{{1.0, 0.0}, {0.0, 0.0}};
  p.s = {e11, e11, CMatrix::identity(2)};
  return p;
}

inline MomentProblem fix_c() {
  MomentProblem p;
  p.m = 1;
  p.n = 0;
  p.s = {CMatrix{{1.0}}};
  return p;
}

inline MomentProblem scalar_powers(double a, std::size_t n) {
  MomentProblem p;
  p.m = 1;
  p.n = n;
  double x = 1.0;
  for (std::size_t k = 0; k <= 2 * n; ++k) {
    p.s.push_back(CMatrix{{x}});
    x *= a;
  }
  return p;
}

struct Sample {
  std::size_t m, n, atoms;
  GeneratorSpec spec;
  MomentProblem p;
};

/// Shape and data of the seeded instance family: m <= 3, n <= 4, at most n + 1
/// atoms.
inline Sample sample(std::uint64_t seed) {
  SplitMix64 r(seed * 7919 + 1);
  const std::size_t m = r.index(1, 3);
  const std::size_t n = r.index(1, 4);
  const std::size_t a = r.index(1, n + 1);
  auto [spec, p] = random_instance(m, n, a, seed);
  return {m, n, a, std::move(spec), std::move(p)};
}

inline CMatrix random_hermitian(SplitMix64& rng, std::size_t n) {
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = rng.uniform(-1.0, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

inline CMatrix random_matrix(SplitMix64& rng, std::size_t r, std::size_t c) {
  CMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return a;
}

/// Points in the open upper half plane.
inline std::vector<cplx> upper_points(SplitMix64& rng, std::size_t count) {
  std::vector<cplx> out;
  for (std::size_t k = 0; k < count; ++k) out.emplace_back(rng.uniform(-3.0, 3.0), rng.uniform(0.1, 3.0));
  return out;
}

}  // namespace mhmp::testing
