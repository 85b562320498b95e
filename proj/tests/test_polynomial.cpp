#include <gtest/gtest.h>

#include <algorithm>

#include "mhmp/polynomial.hpp"
#include "support.hpp"

namespace mhmp {
namespace {

Poly from_roots(const std::vector<cplx>& roots, cplx lead = 1.0) {
  Poly p = Poly::constant(lead);
  for (const cplx r : roots) p = p * Poly::linear_factor(r);
  return p;
}

bool has_root_near(const std::vector<cplx>& roots, cplx target, double tol) {
  return std::any_of(roots.begin(), roots.end(),
                     [&](cplx r) { return std::abs(r - target) <= tol; });
}

TEST(Poly, EvaluationDerivativeTaylor) {
  const Poly p({1.0, -2.0, 0.0, 3.0});  // 1 - 2z + 3z^3
  EXPECT_EQ(p.degree(), 3);
  EXPECT_NEAR(std::abs(p(2.0) - cplx{21.0}), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p.derivative()(2.0) - cplx{34.0}), 0.0, 1e-14);
  const cplx c{0.5, -1.0};
  const auto t = p.taylor(c);
  const cplx h{0.3, 0.2};
  cplx acc{};
  for (std::size_t k = t.size(); k-- > 0;) acc = acc * h + t[k];
  EXPECT_NEAR(std::abs(acc - p(c + h)), 0.0, 1e-13);
}

TEST(Poly, TrimmedAndZero) {
  EXPECT_TRUE(Poly().is_zero());
  EXPECT_EQ(trimmed(Poly({1.0, 2.0, 1e-20}), 1e-15).degree(), 1);
}

TEST(PolyRoots, KnownRoots) {
  const std::vector<cplx> roots = {-1.5, 0.25, 2.0, cplx{0.0, 1.0}, cplx{0.0, -1.0}};
  const auto found = poly_roots(from_roots(roots, 3.0));
  ASSERT_EQ(found.size(), roots.size());
  for (const cplx r : roots) EXPECT_TRUE(has_root_near(found, r, 1e-12));
}

TEST(PolyRoots, BadlyScaledCoefficients) {
  const std::vector<cplx> roots = {1e-3, 1.0, 1e3};
  const auto found = poly_roots(from_roots(roots));
  for (const cplx r : roots) EXPECT_TRUE(has_root_near(found, r, 1e-9 * std::abs(r)));
}

TEST(PolyMatrix, DeterminantAndAdjugate) {
  SplitMix64 rng(21);
  for (std::size_t m = 1; m <= 3; ++m) {
    PolyMatrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a(i, j) = Poly({cplx{rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1),
                        rng.uniform(-1, 1)});
    const Poly d = determinant(a);
    const PolyMatrix adj = adjugate(a);
    for (const cplx z : {cplx{0.3, 0.1}, cplx{-1.2, 0.7}, cplx{2.0, 0.0}}) {
      const CMatrix az = a(z);
      EXPECT_LE(max_abs_diff(az * adj(z), CMatrix::identity(m) * d(z)), 1e-12);
    }
  }
}

TEST(MatrixPolynomial, EvaluateAndDerivative) {
  const CMatrix c0{{1.0, 0.0}, {0.0, 2.0}};
  const CMatrix c1{{0.0, 1.0}, {1.0, 0.0}};
  const CMatrix c2{{3.0, 0.0}, {0.0, 0.0}};
  const MatrixPolynomial p({c0, c1, c2});
  const cplx z{0.5, 1.5};
  EXPECT_LE(max_abs_diff(p(z), c0 + c1 * z + c2 * (z * z)), 1e-15);
  EXPECT_LE(max_abs_diff(p.derivative()(z), c1 + c2 * (2.0 * z)), 1e-15);
  EXPECT_LE(max_abs_diff(p(0.0), c0), 0.0);
}

TEST(MatrixPolynomial, EigenvaluesAreDeterminantRoots) {
  SplitMix64 rng(22);
  for (std::size_t trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + trial % 3;
    std::vector<CMatrix> coeffs;
    for (std::size_t k = 0; k < 3; ++k) coeffs.push_back(testing::random_matrix(rng, m, m));
    const MatrixPolynomial p(coeffs);
    const auto eig = matrix_polynomial_eigenvalues(p, 1e6);
    const Poly d = determinant(p.entries());
    ASSERT_EQ(eig.size(), static_cast<std::size_t>(d.degree()));
    for (const cplx z : eig) {
      const double scale = std::max(1.0, std::abs(z));
      EXPECT_LE(std::abs(d(z)) / d.magnitude_bound(scale), 1e-9);
    }
  }
}

TEST(MatrixPolynomial, DropsInfiniteEigenvalues) {
  // degree-1 coefficient singular: one eigenvalue at infinity
  const MatrixPolynomial p({CMatrix{{1.0, 0.0}, {0.0, 2.0}}, CMatrix{{1.0, 0.0}, {0.0, 0.0}}});
  const auto eig = matrix_polynomial_eigenvalues(p, 1e6);
  ASSERT_EQ(eig.size(), 1u);
  EXPECT_NEAR(std::abs(eig[0] + 1.0), 0.0, 1e-12);
}

}  // namespace
}  // namespace mhmp
