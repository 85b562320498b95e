#include <gtest/gtest.h>

#include "mhmp/hankel.hpp"
#include "mhmp/solve.hpp"
#include "support.hpp"

namespace mhmp {
namespace {

using testing::fix_a;
using testing::fix_b;
using testing::fix_c;
using testing::random_matrix;
using testing::sample;
using testing::scalar_powers;

TEST(Assemble, FixtureA) {
  const BlockSystem sys = assemble(fix_a());
  EXPECT_EQ(sys.K, (CMatrix{{1.0, 0.0}, {0.0, 0.0}}));
  EXPECT_EQ(sys.F, (CMatrix{{0.0, 0.0}, {1.0, 0.0}}));
  EXPECT_EQ(sys.U, (CMatrix{{1.0}, {0.0}}));
  EXPECT_EQ(sys.M, (CMatrix{{0.0}, {1.0}}));
}

TEST(Assemble, FixtureC) {
  const BlockSystem sys = assemble(fix_c());
  EXPECT_EQ(sys.K, (CMatrix{{1.0}}));
  EXPECT_EQ(sys.F, (CMatrix{{0.0}}));
  EXPECT_EQ(sys.U, (CMatrix{{1.0}}));
  EXPECT_EQ(sys.M, (CMatrix{{0.0}}));
}

TEST(Assemble, FixtureB) {
  const BlockSystem sys = assemble(fix_b());
  const CMatrix expected{{1.0, 0.0, 1.0, 0.0},
                         {0.0, 0.0, 0.0, 0.0},
                         {1.0, 0.0, 1.0, 0.0},
                         {0.0, 0.0, 0.0, 1.0}};
  EXPECT_EQ(sys.K, expected);
}

TEST(Assemble, SignatureMatrix) {
  const CMatrix j = signature_matrix(2);
  EXPECT_EQ(j, j.adjoint());
  EXPECT_EQ(j * j, CMatrix::identity(4));
  EXPECT_EQ(j(0, 2), kI);
  EXPECT_EQ(j(2, 0), -kI);
}

TEST(Assemble, RejectsBadShapes) {
  MomentProblem p = fix_a();
  p.s.pop_back();
  EXPECT_THROW((void)assemble(p), Error);
  MomentProblem q = fix_a();
  q.s[1] = CMatrix{{0.0, 1.0}};
  EXPECT_THROW((void)assemble(q), Error);
  MomentProblem h = fix_b();
  h.s[1](0, 1) = 1.0;
  EXPECT_THROW(h.validate(), Error);
}

TEST(Assemble, LyapunovIdentityAndMIdentity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto smp = sample(seed);
    const BlockSystem sys = assemble(smp.p);
    EXPECT_LE(lyapunov_residual(sys), 1e-12 * (1.0 + sys.K.max_abs()));
    EXPECT_EQ(sys.M, sys.F * sys.K * sys.U);
  }
}

TEST(HankelCharacterization, Examples) {
  const CMatrix k = assemble(fix_a()).K;
  EXPECT_TRUE(hankel_characterization(k, 1, 1));
  // with 1 x 1 blocks every symmetric 2 x 2 grid is Hankel
  CMatrix sym = k;
  sym(0, 1) = 0.5;
  sym(1, 0) = 0.5;
  EXPECT_TRUE(is_block_hankel(sym, 1, 1));
  EXPECT_TRUE(hankel_characterization(sym, 1, 1));
  const CMatrix h3 = hankel_matrix(scalar_powers(2.0, 2).s, 2);
  EXPECT_TRUE(hankel_characterization(h3, 1, 1));
  CMatrix bad = h3;
  bad(0, 2) += 0.5;
  EXPECT_FALSE(hankel_characterization(bad, 1, 1));
  EXPECT_FALSE(is_block_hankel(bad, 1, 1));
}

TEST(HankelCharacterization, AgreesWithBlockComparison) {
  SplitMix64 rng(31);
  for (std::size_t trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + trial % 3;
    const std::size_t l = 1 + (trial / 3) % 2;
    const std::size_t n = 1 + trial % 4;
    std::vector<CMatrix> blocks;
    for (std::size_t k = 0; k <= 2 * n; ++k) blocks.push_back(random_matrix(rng, r, l));
    CMatrix t((n + 1) * r, (n + 1) * l);
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j <= n; ++j) t.set_block(i * r, j * l, blocks[i + j]);
    if (trial % 2 == 1) {
      const std::size_t i = rng.index(0, t.rows() - 1);
      const std::size_t j = rng.index(0, t.cols() - 1);
      t(i, j) += 0.25;
    }
    const bool brute = is_block_hankel(t, r, l);
    EXPECT_EQ(hankel_characterization(t, r, l), brute);
    // a single perturbed entry in a corner block still leaves a Hankel grid
    if (trial % 2 == 0) EXPECT_TRUE(brute);
  }
}

TEST(Classify, FixtureB) {
  const ClassReport rep = classify(fix_b());
  EXPECT_TRUE(rep.psd);
  EXPECT_FALSE(rep.in_Htilde);
  EXPECT_EQ(rep.rank_K, 2u);
  ASSERT_EQ(rep.L_basis.cols(), 1u);
  EXPECT_NEAR(std::abs(rep.L_basis(1, 0)), 1.0, 1e-12);
  EXPECT_LE(max_abs_diff(rep.R, CMatrix{{0.0, 0.0}, {0.0, 1.0}}), 1e-12);
}

TEST(Classify, FixtureA) {
  const ClassReport rep = classify(fix_a());
  EXPECT_TRUE(rep.psd);
  EXPECT_TRUE(rep.in_Htilde);
  EXPECT_LE(rep.R.max_abs(), 1e-15);
}

TEST(Classify, FixtureC) {
  const ClassReport rep = classify(fix_c());
  EXPECT_TRUE(rep.psd);
  EXPECT_TRUE(rep.in_Htilde);
  EXPECT_EQ(rep.R, (CMatrix{{1.0}}));
}

TEST(Classify, NotPsd) {
  MomentProblem p = fix_a();
  p.s[2] = CMatrix{{-1.0}};
  EXPECT_FALSE(classify(p).psd);
}

TEST(Classify, GeneratedInstancesAreInClass) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ClassReport rep = classify(sample(seed).p);
    EXPECT_TRUE(rep.psd) << seed;
    EXPECT_TRUE(rep.in_Htilde) << seed;
    EXPECT_GE(min_eigenvalue(rep.R), -1e-10 * (1.0 + rep.R.max_abs())) << seed;
  }
}

// Two admissible compressions of K_{n-1}: the plain range rows and a mixed
// version with a kernel component.
std::pair<CMatrix, CMatrix> two_admissible(const CMatrix& k, SplitMix64& rng) {
  const CMatrix q0 = range_compression(k);
  const auto kd = rank_kernel(k);
  const std::size_t r = q0.rows();
  CMatrix mix = random_matrix(rng, r, r) + CMatrix::identity(r) * 2.0;
  CMatrix second = mix * q0;
  if (kd.kernel_basis.cols() > 0)
    second += random_matrix(rng, r, kd.kernel_basis.cols()) * kd.kernel_basis.adjoint();
  return {q0, second};
}

TEST(TailResidue, IndependentOfPseudoinverse) {
  SplitMix64 rng(32);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto smp = sample(seed);
    const MomentProblem p = seed % 2 ? smp.p : random_psd_problem(smp.m, smp.n, smp.atoms, seed);
    const CMatrix k = hankel_matrix(p.s, p.n - 1);
    const auto [q1, q2] = two_admissible(k, rng);
    const CMatrix r1 = tail_residue(p, q1);
    const CMatrix r2 = tail_residue(p, q2);
    EXPECT_LE(max_abs_diff(r1, r2), 1e-10 * (1.0 + p.s[2 * p.n].max_abs())) << seed;
    EXPECT_GE(min_eigenvalue(r1), -1e-10 * (1.0 + r1.max_abs())) << seed;
  }
}

TEST(NormalizeTail, FixtureB) {
  const MomentProblem q = normalize_tail(fix_b());
  const CMatrix e11{{1.0, 0.0}, {0.0, 0.0}};
  EXPECT_LE(max_abs_diff(q.s[0], e11), 1e-15);
  EXPECT_LE(max_abs_diff(q.s[1], e11), 1e-15);
  EXPECT_LE(max_abs_diff(q.s[2], e11), 1e-12);
  EXPECT_TRUE(classify(q).in_Htilde);
}

TEST(NormalizeTail, FixturesAlreadyInClass) {
  EXPECT_EQ(normalize_tail(fix_a()).s, fix_a().s);
  EXPECT_EQ(normalize_tail(fix_c()).s, fix_c().s);
}

TEST(NormalizeTail, RejectsNonPsd) {
  MomentProblem p = fix_a();
  p.s[2] = CMatrix{{-1.0}};
  try {
    (void)normalize_tail(p);
    FAIL() << "expected NotPSD";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NotPSD);
  }
}

TEST(NormalizeTail, OffDiagonalResidueOnL) {
  // R = [[1, 1], [1, 1]] with L = span(e1): compressing R by the projector
  // onto L-perp would give diag(0, 1), which is not below R.
  MomentProblem p;
  p.m = 2;
  p.n = 1;
  p.s = {CMatrix{{0.0, 0.0}, {0.0, 1.0}}, CMatrix{{0.0, 0.0}, {0.0, 0.0}},
         CMatrix{{1.0, 1.0}, {1.0, 1.0}}};
  ASSERT_TRUE(classify(p).psd);
  ASSERT_FALSE(classify(p).in_Htilde);
  const MomentProblem q = normalize_tail(p);
  EXPECT_TRUE(classify(q).in_Htilde);
  EXPECT_GE(min_eigenvalue(hermitian_part(p.s[2] - q.s[2])), -1e-12);
  EXPECT_TRUE(is_psd(hankel_matrix(q.s, 1)));
}

TEST(NormalizeTail, PropertiesOnPerturbedInstances) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto smp = sample(seed);
    const MomentProblem p = random_psd_problem(smp.m, smp.n, smp.atoms, seed);
    ASSERT_TRUE(classify(p).psd);
    const MomentProblem q = normalize_tail(p);
    const double scale = 1.0 + p.s[2 * p.n].max_abs();
    EXPECT_TRUE(classify(q).in_Htilde) << seed;
    // the normalized tail does not exceed the original and keeps K PSD
    EXPECT_GE(min_eigenvalue(hermitian_part(p.s[2 * p.n] - q.s[2 * q.n])), -1e-10 * scale) << seed;
    EXPECT_TRUE(is_psd(hankel_matrix(q.s, q.n))) << seed;
    const MomentProblem twice = normalize_tail(q);
    EXPECT_LE(max_abs_diff(twice.s[2 * p.n], q.s[2 * p.n]), 1e-10 * scale) << seed;
  }
}

TEST(NormalizeTail, KeepsForwardGeneratedInstances) {
  SplitMix64 rng(33);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const MomentProblem p = sample(seed).p;
    const MomentProblem q = normalize_tail(p);
    EXPECT_LE(max_abs_diff(q.s[2 * p.n], p.s[2 * p.n]), 1e-10 * (1.0 + p.s[2 * p.n].max_abs()));
    const RationalPick w1 = canonical_solution(p);
    const RationalPick w2 = canonical_solution(q);
    for (const cplx z : testing::upper_points(rng, 20)) {
      const CMatrix a = w1(z);
      EXPECT_LE(max_abs_diff(a, w2(z)), 1e-8 * (1.0 + a.max_abs())) << seed;
    }
  }
}

}  // namespace
}  // namespace mhmp
