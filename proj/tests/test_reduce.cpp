#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "mhmp/hankel.hpp"
#include "mhmp/reduce.hpp"
#include "support.hpp"

namespace mhmp {
namespace {

using testing::fix_a;
using testing::fix_b;
using testing::fix_c;
using testing::sample;

Eigen::MatrixXcd to_eigen(const CMatrix& a) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return out;
}

double max_abs(const Eigen::MatrixXcd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

TEST(CompressHead, FixtureA) {
  const CompressedHead h = compress_head(fix_a());
  EXPECT_EQ(h.l, 1u);
  EXPECT_NEAR(std::abs(h.v(0, 0)), 1.0, 1e-15);
  ASSERT_EQ(h.t.size(), 3u);
  EXPECT_NEAR(std::abs(h.t[0](0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h.t[1](0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h.t[2](0, 0)), 0.0, 1e-15);
}

TEST(CompressHead, NormalizedFixtureB) {
  const CompressedHead h = compress_head(normalize_tail(fix_b()));
  EXPECT_EQ(h.l, 1u);
  EXPECT_NEAR(std::abs(h.g(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(h.g(0, 1)), 0.0, 1e-15);
  ASSERT_EQ(h.t.size(), 3u);
  for (const CMatrix& t : h.t) EXPECT_NEAR(std::abs(t(0, 0) - 1.0), 0.0, 1e-12);
}

TEST(CompressHead, ZeroProblem) {
  MomentProblem p;
  p.m = 2;
  p.n = 1;
  p.s.assign(3, CMatrix(2, 2));
  const CompressedHead h = compress_head(p);
  EXPECT_EQ(h.l, 0u);
  EXPECT_TRUE(h.t.empty());
}

TEST(CompressHead, RejectsOutsideClass) {
  try {
    (void)compress_head(fix_b());
    FAIL() << "expected NotInClass";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::NotInClass);
  }
}

TEST(CompressHead, SimultaneousCompression) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MomentProblem p = sample(seed).p;
    const CompressedHead h = compress_head(p);
    EXPECT_LE(max_abs_diff(h.v * h.v.adjoint(), CMatrix::identity(p.m)), 1e-12);
    double scale = 0.0;
    for (const CMatrix& s : p.s) scale = std::max(scale, s.max_abs());
    for (std::size_t i = 0; i < p.s.size(); ++i) {
      CMatrix expected(p.m, p.m);
      expected.set_block(0, 0, h.t[i]);
      EXPECT_LE(max_abs_diff(h.v * p.s[i] * h.v.adjoint(), expected), 1e-10 * (1.0 + scale)) << seed;
    }
    EXPECT_GT(min_eigenvalue(h.t[0]), 0.0);
  }
}

TEST(HankelSchurReduce, FixtureA) {
  const auto out = hankel_schur_reduce({CMatrix{{1.0}}, CMatrix{{0.0}}, CMatrix{{0.0}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(std::abs(out[0](0, 0)), 0.0, 1e-15);
}

TEST(HankelSchurReduce, ScalarPowers) {
  for (const double a : {-1.5, 0.3, 2.0}) {
    const auto out = hankel_schur_reduce(testing::scalar_powers(a, 1).s);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_NEAR(std::abs(out[0](0, 0)), 0.0, 1e-14);
  }
}

TEST(HankelSchurReduce, RejectsSingularHead) {
  try {
    (void)hankel_schur_reduce({CMatrix{{0.0}}, CMatrix{{0.0}}, CMatrix{{1.0}}});
    FAIL() << "expected SingularHead";
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::SingularHead);
  }
}

// Dense Schur complement of T_n on its (0, 0) block, then congruence by
// D_n^{-1} with D_n solved densely.
std::vector<CMatrix> dense_reduce(const std::vector<CMatrix>& t) {
  const std::size_t n = (t.size() - 1) / 2;
  const std::size_t l = t.front().rows();
  const Eigen::MatrixXcd big = to_eigen(hankel_matrix(t, n));
  const auto L = static_cast<Eigen::Index>(l);
  const auto N = static_cast<Eigen::Index>(l * n);
  const Eigen::MatrixXcd a = big.topLeftCorner(L, L);
  const Eigen::MatrixXcd b = big.topRightCorner(L, N);
  const Eigen::MatrixXcd c = big.bottomRightCorner(N, N);
  const Eigen::MatrixXcd schur = c - b.adjoint() * a.inverse() * b;
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      d.block(static_cast<Eigen::Index>(i * l), static_cast<Eigen::Index>(j * l), L, L) =
          to_eigen(t[i - j]);
  const Eigen::MatrixXcd dinv = d.inverse();
  const Eigen::MatrixXcd that = dinv * schur * dinv.adjoint();
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k + 1 < 2 * n; ++k) {
    const std::size_t i = k < n ? 0 : k - (n - 1);
    CMatrix blk(l, l);
    for (std::size_t r = 0; r < l; ++r)
      for (std::size_t s = 0; s < l; ++s)
        blk(r, s) = that(static_cast<Eigen::Index>(i * l + r), static_cast<Eigen::Index>((k - i) * l + s));
    out.push_back(blk);
  }
  return out;
}

TEST(HankelSchurReduce, TwoAtomScalarMatchesDenseSchur) {
  GeneratorSpec spec;
  spec.m = 1;
  spec.n = 2;
  spec.atoms = {{-0.5, CMatrix{{0.4}}}, {1.25, CMatrix{{0.6}}}};
  const MomentProblem p = gen_from_measure(spec);
  const auto got = hankel_schur_reduce(p.s);
  const auto want = dense_reduce(p.s);
  ASSERT_EQ(got.size(), want.size());
  EXPECT_GT(got[0](0, 0).real(), 0.0);
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_LE(max_abs_diff(got[k], want[k]), 1e-12);
}

TEST(HankelSchurReduce, RandomHeadsMatchDenseSchur) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const MomentProblem p = sample(seed).p;
    if (p.n == 0) continue;
    const CompressedHead h = compress_head(p);
    const auto got = hankel_schur_reduce(h.t);
    const auto want = dense_reduce(h.t);
    double scale = 0.0;
    for (const CMatrix& t : h.t) scale = std::max(scale, t.max_abs());
    for (std::size_t k = 0; k < got.size(); ++k)
      EXPECT_LE(max_abs_diff(got[k], want[k]), 1e-9 * (1.0 + scale)) << seed;
  }
}

TEST(SchurPieces, StructuralIdentities) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MomentProblem p = sample(seed).p;
    const CompressedHead h = compress_head(p);
    const SchurPieces sp = schur_pieces(h.t);
    const std::size_t l = h.l;
    const std::size_t n = p.n;
    const CMatrix f = shift_matrix(l, n - 1);
    CMatrix u(l * n, l);
    u.set_block(0, 0, CMatrix::identity(l));
    EXPECT_LE(max_abs_diff(sp.D * f, f * sp.D), 1e-12);
    EXPECT_LE((u.adjoint() * f).max_abs(), 1e-12);
    EXPECT_LE(max_abs_diff(sp.D * u - f * sp.T_col, u * h.t[0]), 1e-12);
    EXPECT_LE(max_abs_diff(sp.D * sp.D_inv, CMatrix::identity(l * n)), 1e-9 * (1.0 + sp.D_inv.max_abs()));
  }
}

TEST(SchurPieces, ReducedProblemIsHankelAndInClass) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MomentProblem p = sample(seed).p;
    if (p.n < 2) continue;
    const CompressedHead h = compress_head(p);
    const SchurPieces sp = schur_pieces(h.t);
    EXPECT_TRUE(hankel_characterization(sp.T_hat, h.l, h.l)) << seed;
    MomentProblem red;
    red.m = h.l;
    red.n = p.n - 1;
    red.s = hankel_schur_reduce(h.t);
    for (CMatrix& s : red.s) s = hermitian_part(s);
    const ClassReport rep = classify(red, 1e-8);
    EXPECT_TRUE(rep.psd) << seed;
    EXPECT_TRUE(rep.in_Htilde) << seed;
  }
}

TEST(BuildQN, FixtureA) {
  const Compression c = build_QN(fix_a());
  EXPECT_EQ(c.r, 1u);
  EXPECT_LE(max_abs_diff(c.Q, CMatrix{{1.0, 0.0}}), 1e-15);
  EXPECT_LE(max_abs_diff(c.N, CMatrix{{0.0}}), 0.0);
  EXPECT_LE(max_abs_diff(c.Kinv, CMatrix{{1.0, 0.0}, {0.0, 0.0}}), 1e-15);
}

TEST(BuildQN, FixtureC) {
  const Compression c = build_QN(fix_c());
  EXPECT_LE(max_abs_diff(c.Q, CMatrix{{1.0}}), 1e-15);
  EXPECT_LE(max_abs_diff(c.N, CMatrix{{0.0}}), 0.0);
}

TEST(BuildQN, NormalizedFixtureB) {
  const MomentProblem p = normalize_tail(fix_b());
  const Compression c = build_QN(p);
  EXPECT_EQ(c.r, 1u);
  EXPECT_LE(max_abs_diff(c.Q, CMatrix{{1.0, 0.0, 0.0, 0.0}}), 1e-12);
  EXPECT_LE(c.N.max_abs(), 0.0);
  const BlockSystem sys = assemble(p);
  EXPECT_LE((c.Q * sys.F).max_abs(), 0.0);
}

TEST(BuildQN, ZeroProblemIsEmpty) {
  MomentProblem p;
  p.m = 1;
  p.n = 2;
  p.s.assign(5, CMatrix(1, 1));
  const Compression c = build_QN(p);
  EXPECT_EQ(c.r, 0u);
  EXPECT_EQ(c.Q.rows(), 0u);
  EXPECT_LE(c.Kinv.max_abs(), 0.0);
}

TEST(BuildQN, RejectsOutsideClass) {
  EXPECT_THROW((void)build_QN(fix_b()), Error);
}

TEST(BuildQN, CompressionTriple) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MomentProblem p = sample(seed).p;
    const BlockSystem sys = assemble(p);
    const Compression c = build_QN(p);
    const std::size_t rank = rank_kernel(sys.K).rank;
    EXPECT_EQ(c.r, rank) << seed;
    const CMatrix qkq = hermitian_part(c.Q * sys.K * c.Q.adjoint());
    EXPECT_GT(min_eigenvalue(qkq), 0.0) << seed;
    EXPECT_EQ(rank_kernel(qkq).rank, rank) << seed;
    EXPECT_LE(coinvariance_residual(c, sys.F), 1e-10 * (1.0 + c.Q.max_abs())) << seed;
  }
}

TEST(BuildQN, PseudoinverseAnnihilatesShiftedGap) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MomentProblem p = sample(seed).p;
    const BlockSystem sys = assemble(p);
    const Compression c = build_QN(p);
    const CMatrix gap = CMatrix::identity(sys.K.rows()) - sys.K * c.Kinv;
    CMatrix fj = CMatrix::identity(sys.K.rows());
    for (std::size_t j = 0; j <= p.n; ++j) {
      EXPECT_LE((c.Kinv * fj * gap).max_abs(), 1e-10 * (1.0 + c.Kinv.max_abs())) << seed << " " << j;
      fj = fj * sys.F;
    }
  }
}

}  // namespace
}  // namespace mhmp
