#include "mhmp/solve.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>

namespace mhmp {

// ---------------------------------------------------------------------------
// pairs

void ConstantPair::validate(double tol) const {
  if (!p.is_square() || p.rows() != q.rows() || p.cols() != q.cols()) {
    throw Error(ErrorKind::ShapeError, "pair blocks must be equally sized squares");
  }
  const CMatrix stacked = vstack(p, q);
  const std::size_t rank = rank_kernel(hermitian_part(stacked.adjoint() * stacked), tol).rank;
  if (rank != p.cols()) throw Error(ErrorKind::NotInClass, "pair is degenerate");
  const CMatrix form = q.adjoint() * p - p.adjoint() * q;
  if (form.max_abs() > 1e-11 * (1.0 + stacked.max_abs() * stacked.max_abs())) {
    throw Error(ErrorKind::NotInClass, "q* p is not Hermitian");
  }
}

StructuredPair StructuredPair::canonical(std::size_t m, std::size_t nu) {
  StructuredPair out;
  out.nu = nu;
  out.ptilde = CMatrix(m - nu, m - nu);
  out.qtilde = CMatrix::identity(m - nu);
  return out;
}

ConstantPair StructuredPair::expand() const {
  ConstantPair out;
  out.p = block_diag(CMatrix(nu, nu), ptilde);
  out.q = block_diag(CMatrix::identity(nu), qtilde);
  return out;
}

// ---------------------------------------------------------------------------
// measures and rational functions

CMatrix AtomicMeasure::moment(std::size_t k) const {
  CMatrix acc(m, m);
  for (const auto& a : atoms) acc += a.weight * std::pow(a.lambda, static_cast<double>(k));
  return acc;
}

CMatrix AtomicMeasure::transform(cplx z) const {
  CMatrix acc(m, m);
  for (const auto& a : atoms) acc += a.weight * (1.0 / (a.lambda - z));
  return acc;
}

CMatrix RationalPick::operator()(cplx z) const {
  const cplx d = denominator(z);
  if (d == cplx{}) throw Error(ErrorKind::SingularDenominator, "evaluation at a pole");
  return numerators(z) * (1.0 / d);
}

RationalPick RationalPick::from_measure(const AtomicMeasure& mu) {
  RationalPick w;
  w.numerators = PolyMatrix(mu.m, mu.m);
  for (std::size_t i = 0; i < mu.m; ++i)
    for (std::size_t j = 0; j < mu.m; ++j) w.numerators(i, j) = Poly({0.0});
  w.denominator = Poly({1.0});
  for (const auto& a : mu.atoms) w.denominator = w.denominator * Poly::linear_factor(a.lambda);
  // sum_j W_j / (l_j - z) = -sum_j W_j prod_{i != j} (z - l_i) / prod_i (z - l_i)
  for (std::size_t j = 0; j < mu.atoms.size(); ++j) {
    Poly others({-1.0});
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
      if (i != j) others = others * Poly::linear_factor(mu.atoms[i].lambda);
    for (std::size_t r = 0; r < mu.m; ++r)
      for (std::size_t c = 0; c < mu.m; ++c)
        w.numerators(r, c) += others * mu.atoms[j].weight(r, c);
  }
  return w;
}

// ---------------------------------------------------------------------------
// pipeline

Pipeline build_pipeline(const MomentProblem& p, double tol) {
  Pipeline pl;
  pl.sys = assemble(p);
  pl.comp = build_QN(p, tol);
  pl.kernel = rank_kernel(pl.sys.K, tol);
  pl.theta = theta_build(pl.sys, pl.comp);
  pl.corr = build_corrector(pl.sys, pl.kernel, tol);
  pl.A = coefficient_matrix(pl.theta, pl.corr);
  return pl;
}

CMatrix lft(const MatrixPolynomial& a, const StructuredPair& pair, cplx z) {
  const ConstantPair cp = pair.expand();
  const std::size_t m = cp.p.rows();
  const CMatrix az = a(z);
  if (az.rows() != 2 * m) throw Error(ErrorKind::ShapeError, "pair does not match A");
  const CMatrix a11 = az.block(0, 0, m, m);
  const CMatrix a12 = az.block(0, m, m, m);
  const CMatrix a21 = az.block(m, 0, m, m);
  const CMatrix a22 = az.block(m, m, m, m);
  const auto den = try_inverse(a21 * cp.p + a22 * cp.q, 1e-13);
  if (!den) throw Error(ErrorKind::SingularDenominator, "a21 p + a22 q is singular at z");
  return (a11 * cp.p + a12 * cp.q) * *den;
}

namespace {

using xcplx = std::complex<long double>;

// Refinement may move a root by at most this much (relative).
constexpr double kMaxRefine = 1e-6;

xcplx eval_extended(const Poly& p, long double x) {
  xcplx acc{};
  const auto& c = p.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + xcplx{c[k].real(), c[k].imag()};
  return acc;
}

// Newton steps on the real part in extended precision; keeps the start if a
// step fails to reduce the residual.
long double polish_real_root(const Poly& p, const Poly& dp, long double start) {
  long double x = start;
  long double best = std::abs(eval_extended(p, x));
  for (int it = 0; it < 8 && best > 0.0L; ++it) {
    const xcplx d = eval_extended(dp, x);
    if (d == xcplx{}) break;
    const long double next = x - (eval_extended(p, x) / d).real();
    if (std::abs(next - start) > kMaxRefine * (1.0L + std::abs(start))) break;
    const long double res = std::abs(eval_extended(p, next));
    if (!(res < best)) break;
    x = next;
    best = res;
  }
  return x;
}

Poly reversed(const Poly& p, std::size_t len) {
  std::vector<cplx> c(len);
  for (std::size_t k = 0; k < len; ++k) c[len - 1 - k] = p.coeff(k);
  return Poly(std::move(c));
}

// Beyond this radius residues are evaluated in u = 1/z, where the expansion
// of numerator and denominator has no cancellation.
constexpr double kFarRadius = 2.0;

struct SimplePole {
  double lambda;
  CMatrix weight;
};

// Real simple pole of num/d near `guess`: refined location and weight
// -Res w = -num(lambda)/d'(lambda).
SimplePole simple_pole(const PolyMatrix& num, const Poly& d, double guess) {
  const std::size_t m = num.rows();
  SimplePole out{guess, CMatrix(m, m)};
  if (std::abs(guess) <= kFarRadius) {
    const Poly dp = d.derivative();
    const long double x = polish_real_root(d, dp, guess);
    const xcplx den = eval_extended(dp, x);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const xcplx v = -eval_extended(num(i, j), x) / den;
        out.weight(i, j) = cplx{static_cast<double>(v.real()), static_cast<double>(v.imag())};
      }
    out.lambda = static_cast<double>(x);
  } else {
    // w(1/u) = u^L num(1/u) / u^L d(1/u); Res_u at mu = 1/lambda is W mu^2.
    std::size_t len = d.size();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) len = std::max(len, num(i, j).size());
    const Poly dr = reversed(d, len);
    const Poly drp = dr.derivative();
    const long double mu = polish_real_root(dr, drp, 1.0L / guess);
    const xcplx den = eval_extended(drp, mu) * (mu * mu);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const xcplx v = eval_extended(reversed(num(i, j), len), mu) / den;
        out.weight(i, j) = cplx{static_cast<double>(v.real()), static_cast<double>(v.imag())};
      }
    out.lambda = static_cast<double>(1.0L / mu);
  }
  out.weight = hermitian_part(out.weight);
  return out;
}

// Smallest singular pair of a small square matrix: a x ~ sigma y.
struct NullPair {
  CMatrix x, y;
  double sigma;
};

NullPair null_pair(const CMatrix& a) {
  const std::size_t m = a.rows();
  Eigen::MatrixXcd e(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index last = static_cast<Eigen::Index>(m) - 1;
  NullPair out{CMatrix(m, 1), CMatrix(m, 1), svd.singularValues()(last)};
  for (std::size_t i = 0; i < m; ++i) {
    out.x(i, 0) = svd.matrixV()(static_cast<Eigen::Index>(i), last);
    out.y(i, 0) = svd.matrixU()(static_cast<Eigen::Index>(i), last);
  }
  return out;
}

// Real simple eigenvalue of a22 near `guess`, refined by Newton steps on the
// null pair; weight -a12 x y* / (y* a22' x). Empty when a22 is not
// numerically singular at the refined point.
constexpr double kNullTol = 1e-12;

std::optional<SimplePole> near_pole(const MatrixPolynomial& a12, const MatrixPolynomial& a22, double guess) {
  const MatrixPolynomial da22 = a22.derivative();
  double x = guess;
  NullPair np = null_pair(a22(x));
  for (int it = 0; it < 4 && np.sigma > 0.0; ++it) {
    const cplx den = (np.y.adjoint() * da22(x) * np.x)(0, 0);
    if (den == cplx{}) break;
    const double next = x - ((np.y.adjoint() * a22(x) * np.x)(0, 0) / den).real();
    if (std::abs(next - guess) > kMaxRefine * (1.0 + std::abs(guess))) break;
    const NullPair cand = null_pair(a22(next));
    if (!(cand.sigma < np.sigma)) break;
    x = next;
    np = cand;
  }
  if (np.sigma > kNullTol * std::max(1e-300, a22(x).max_abs())) return std::nullopt;
  const cplx den = (np.y.adjoint() * da22(x) * np.x)(0, 0);
  if (den == cplx{}) return std::nullopt;
  CMatrix weight = a12(x) * np.x * np.y.adjoint() * (-1.0 / den);
  return SimplePole{x, hermitian_part(weight)};
}

// Roots closer than this (relative) are one cluster.
constexpr double kClusterTol = 1e-6;
// Snapping threshold for real poles.
constexpr double kRealTol = 1e-7;
// Laurent coefficients at a cluster are compared with the moment scale:
// weights whose contribution |W| max(1, |lambda|)^2n falls below kWeightTol
// are removable singularities, higher-order terms above kHigherTol make the
// pole non-simple.
constexpr double kWeightTol = 1e-10;
constexpr double kHigherTol = 1e-7;
constexpr double kReconstructionTol = 1e-8;

struct Cluster {
  cplx center;
  std::size_t size = 0;
};

std::vector<Cluster> cluster_roots(std::vector<cplx> roots) {
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  const std::size_t k = roots.size();
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double scale = 1.0 + std::max(std::abs(roots[i]), std::abs(roots[j]));
      if (std::abs(roots[i] - roots[j]) <= kClusterTol * scale) parent[find(j)] = find(i);
    }
  std::vector<Cluster> out;
  std::vector<std::size_t> slot(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = find(i);
    if (slot[r] == k) {
      slot[r] = out.size();
      out.push_back({0.0, 0});
    }
    out[slot[r]].center += roots[i];
    ++out[slot[r]].size;
  }
  for (auto& c : out) c.center /= static_cast<double>(c.size);
  return out;
}

std::vector<CMatrix> matrix_taylor(const PolyMatrix& p, cplx center) {
  std::size_t len = 1;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) len = std::max(len, p(i, j).size());
  std::vector<CMatrix> out(len, CMatrix(p.rows(), p.cols()));
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const auto t = p(i, j).taylor(center);
      for (std::size_t k = 0; k < t.size(); ++k) out[k](i, j) = t[k];
    }
  return out;
}

double root_radius(const MomentProblem& p) {
  const double s0 = p.s[0].max_abs();
  double rho = 1.0;
  if (s0 > 0.0)
    for (std::size_t k = 1; k <= 2 * p.n; ++k)
      rho = std::max(rho, std::pow(p.s[k].max_abs() / s0, 1.0 / static_cast<double>(k)));
  return 1e4 * rho;
}

double moment_scale(const MomentProblem& p) {
  double s = 0.0;
  for (const auto& b : p.s) s = std::max(s, b.max_abs());
  return std::max(s, 1e-300);
}

constexpr std::array<cplx, 8> kProbePoints = {
    cplx{0.0, 0.7},  cplx{1.3, 1.1},  cplx{-1.7, 0.9}, cplx{2.9, 2.3},
    cplx{-3.1, 1.7}, cplx{0.3, 4.0},  cplx{0.6, -0.8}, cplx{-2.2, -1.9}};

RationalPick canonical_from(const Pipeline& pl, double radius, double mass, double moment_scale) {
  const std::size_t m = pl.sys.m;
  const MatrixPolynomial a12 = pl.A.block(0, m, m, m);
  const MatrixPolynomial a22 = pl.A.block(m, m, m, m);

  const PolyMatrix a22e = a22.entries();
  const Poly d = determinant(a22e);
  if (trimmed(d, 1e-14).is_zero()) {
    throw Error(ErrorKind::SingularDenominator, "det a22 vanishes identically");
  }
  const PolyMatrix num = a12.entries() * adjugate(a22e);

  const auto roots = matrix_polynomial_eigenvalues(a22, radius);
  AtomicMeasure mu;
  mu.m = m;
  for (const Cluster& cl : cluster_roots(roots)) {
    const bool real = std::abs(cl.center.imag()) <= kRealTol * (1.0 + std::abs(cl.center.real()));
    const cplx c = real ? cplx{cl.center.real(), 0.0} : cl.center;
    const double reach = std::pow(std::max(1.0, std::abs(c)), 2.0 * static_cast<double>(pl.sys.n));
    if (real && cl.size == 1) {
      auto near = std::abs(c) <= kFarRadius ? near_pole(a12, a22, c.real()) : std::nullopt;
      SimplePole pole = near ? std::move(*near) : simple_pole(num, d, c.real());
      if (pole.weight.max_abs() * reach <= kWeightTol * moment_scale) continue;  // removable
      mu.atoms.push_back({pole.lambda, std::move(pole.weight)});
      continue;
    }
    const auto tn = matrix_taylor(num, c);
    const auto td = d.taylor(c);
    const std::size_t k = cl.size;
    const cplx dk = k < td.size() ? td[k] : cplx{};
    if (dk == cplx{}) throw Error(ErrorKind::NonSimplePole, "degenerate denominator expansion");
    auto laurent = [&](std::size_t j) {
      return j < tn.size() ? tn[j] * (1.0 / dk) : CMatrix(m, m);
    };
    bool higher = false;
    for (std::size_t j = 0; j + 1 < k; ++j)
      if (laurent(j).max_abs() > kHigherTol * mass) higher = true;
    CMatrix weight = hermitian_part(-laurent(k - 1));
    if (!higher && weight.max_abs() * reach <= kWeightTol * moment_scale) continue;  // removable
    if (!real) {
      throw Error(ErrorKind::NonRealPole, "pole off the real axis near z = " +
                                              std::to_string(c.real()) + " + " +
                                              std::to_string(c.imag()) + "i");
    }
    if (higher) {
      throw Error(ErrorKind::NonSimplePole, "pole of order > 1 at " + std::to_string(c.real()));
    }
    mu.atoms.push_back({c.real(), std::move(weight)});
  }
  std::sort(mu.atoms.begin(), mu.atoms.end(),
            [](const auto& x, const auto& y) { return x.lambda < y.lambda; });

  const RationalPick w = RationalPick::from_measure(mu);
  for (const cplx z : kProbePoints) {
    const CMatrix az = a22(z);
    const auto inv = try_inverse(az, 1e-13);
    if (!inv) continue;
    const CMatrix direct = a12(z) * *inv;
    const CMatrix rebuilt = w(z);
    if (max_abs_diff(direct, rebuilt) > kReconstructionTol * (1.0 + direct.max_abs())) {
      throw Error(ErrorKind::ReconstructionMismatch,
                  "partial fractions disagree with a12 a22^{-1} by " +
                      std::to_string(max_abs_diff(direct, rebuilt)));
    }
  }
  return w;
}

}  // namespace

RationalPick canonical_solution(const Pipeline& pl) {
  MomentProblem p;
  p.m = pl.sys.m;
  p.n = pl.sys.n;
  for (std::size_t k = 0; k <= 2 * p.n; ++k) {
    const std::size_t i = std::min(k, p.n);
    p.s.push_back(pl.sys.K.block(i * p.m, (k - i) * p.m, p.m, p.m));
  }
  return canonical_from(pl, root_radius(p), std::max(p.s[0].max_abs(), 1e-300), moment_scale(p));
}

RationalPick canonical_solution(const MomentProblem& p, double tol) {
  const Pipeline pl = build_pipeline(p, tol);
  return canonical_from(pl, root_radius(p), std::max(p.s[0].max_abs(), 1e-300), moment_scale(p));
}

// ---------------------------------------------------------------------------
// validators

double fmi_margin(const BlockSystem& sys, const PickEvaluator& w, cplx z) {
  if (z.imag() == 0.0) throw Error(ErrorKind::RealPoint, "fundamental inequality needs Im z > 0");
  const std::size_t dim = sys.K.rows();
  const std::size_t m = sys.m;
  const CMatrix wz = w(z);
  CMatrix resolvent = CMatrix::identity(dim);
  CMatrix term = CMatrix::identity(dim);
  for (std::size_t j = 1; j <= sys.n; ++j) {
    term = term * sys.F * z;
    resolvent += term;
  }
  const CMatrix x = resolvent * (sys.U * wz + sys.M);
  CMatrix big(dim + m, dim + m);
  big.set_block(0, 0, sys.K);
  big.set_block(0, dim, x);
  big.set_block(dim, 0, x.adjoint());
  big.set_block(dim, dim, (wz - wz.adjoint()) * (1.0 / (z - std::conj(z))));
  big = hermitian_part(big);
  const double scale = std::max(1.0, big.max_abs());
  return min_eigenvalue(big) / scale;
}

bool fmi_check(const MomentProblem& p, const PickEvaluator& w, const std::vector<cplx>& zs) {
  for (const cplx z : zs)
    if (z.imag() <= 0.0) throw Error(ErrorKind::RealPoint, "sample point not in the upper half plane");
  const BlockSystem sys = assemble(p);
  for (const cplx z : zs)
    if (fmi_margin(sys, w, z) < -1e-8) return false;
  return true;
}


namespace {

// Residues read off the monomial form lose accuracy near clustered poles;
// weights within this margin of the PSD cone are projected onto it.
constexpr double kExtractPsdTol = 1e-6;

CMatrix psd_part(const CMatrix& a) {
  const auto e = herm_eig(a);
  const std::size_t m = a.rows();
  CMatrix out(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    const double v = std::max(0.0, e.values[k]);
    if (v == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out(i, j) += v * e.vectors(i, k) * std::conj(e.vectors(j, k));
  }
  return hermitian_part(out);
}

}  // namespace

AtomicMeasure extract_measure(const RationalPick& w) {
  AtomicMeasure mu;
  mu.m = w.numerators.rows();
  const Poly den = trimmed(w.denominator, 0.0);
  const int ddeg = den.degree();
  if (ddeg < 0) throw Error(ErrorKind::SingularDenominator, "zero denominator");
  for (std::size_t i = 0; i < mu.m; ++i)
    for (std::size_t j = 0; j < mu.m; ++j)
      if (w.numerators(i, j).degree() >= ddeg) {
        throw Error(ErrorKind::ShapeError, "w does not vanish at infinity");
      }
  if (ddeg == 0) return mu;

  const auto roots = poly_roots(den);
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double scale = 1.0 + std::max(std::abs(roots[i]), std::abs(roots[j]));
      if (std::abs(roots[i] - roots[j]) <= kClusterTol * scale) {
        throw Error(ErrorKind::NonSimplePole, "repeated denominator root near " +
                                                  std::to_string(roots[i].real()));
      }
    }
  for (const cplx r : roots) {
    if (std::abs(r.imag()) > kRealTol * (1.0 + std::abs(r.real()))) {
      throw Error(ErrorKind::NonRealPole, "denominator root off the real axis");
    }
    auto [lambda, weight] = simple_pole(w.numerators, den, r.real());
    if (min_eigenvalue(weight) < -kExtractPsdTol * std::max(1.0, weight.max_abs())) {
      throw Error(ErrorKind::NotPSD, "atom weight at " + std::to_string(lambda) + " is not PSD");
    }
    mu.atoms.push_back({lambda, psd_part(weight)});
  }
  std::sort(mu.atoms.begin(), mu.atoms.end(),
            [](const auto& x, const auto& y) { return x.lambda < y.lambda; });

  for (std::size_t k = 0; k < 20; ++k) {
    const double t = static_cast<double>(k);
    const cplx z{2.5 * std::cos(1.7 * t + 0.3), 0.2 + 0.15 * t};
    const CMatrix direct = w(z);
    if (max_abs_diff(direct, mu.transform(z)) > 1e-8 * (1.0 + direct.max_abs())) {
      throw Error(ErrorKind::ReconstructionMismatch, "atoms do not reproduce w");
    }
  }
  return mu;
}

MomentReport verify_moments(const AtomicMeasure& mu, const MomentProblem& p, double tol) {
  MomentReport rep;
  rep.pass = true;
  for (std::size_t k = 0; k <= 2 * p.n; ++k) rep.moments.push_back(mu.moment(k));
  for (std::size_t k = 0; k < 2 * p.n; ++k) {
    const double scale = std::max(1.0, p.s[k].max_abs());
    const double r = max_abs_diff(rep.moments[k], p.s[k]) / scale;
    rep.residuals.push_back(r);
    if (!(r <= tol)) rep.pass = false;
  }
  const CMatrix& top = p.s[2 * p.n];
  const double scale = std::max(1.0, top.max_abs());
  rep.tail_slack = min_eigenvalue(hermitian_part(top - rep.moments[2 * p.n])) / scale;
  if (!(rep.tail_slack >= -tol)) rep.pass = false;
  return rep;
}

Extension extend(const MomentProblem& p, double tol) {
  const ClassReport rep = classify(p, tol);
  if (!rep.psd) throw Error(ErrorKind::NotPSD, "extension needs a PSD Hankel matrix");
  const MomentProblem q = normalize_tail(p, tol);
  Extension ext;
  ext.tail_normalized = !rep.in_Htilde;
  ext.measure = extract_measure(canonical_solution(q, tol));
  ext.s_next = hermitian_part(ext.measure.moment(2 * p.n + 1));
  ext.s_next2 = hermitian_part(ext.measure.moment(2 * p.n + 2));
  std::vector<CMatrix> blocks = q.s;
  blocks.push_back(ext.s_next);
  blocks.push_back(ext.s_next2);
  ext.K_ext = hankel_matrix(blocks, p.n + 1);
  return ext;
}

CMatrix cayley(const ConstantPair& pair) {
  const auto inv = try_inverse(pair.p + kI * pair.q, 1e-13);
  if (!inv) throw Error(ErrorKind::SingularCayley, "p + iq is singular");
  return (pair.p - kI * pair.q) * *inv;
}

}  // namespace mhmp
