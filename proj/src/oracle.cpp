#include "mhmp/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mhmp {

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t SplitMix64::index(std::size_t lo, std::size_t hi) noexcept {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::size_t>(next() % span);
}

MomentProblem gen_from_measure(const GeneratorSpec& spec) {
  MomentProblem p;
  p.m = spec.m;
  p.n = spec.n;
  p.s.assign(2 * spec.n + 1, CMatrix(spec.m, spec.m));
  for (const auto& a : spec.atoms) {
    double power = 1.0;
    for (std::size_t k = 0; k <= 2 * spec.n; ++k) {
      p.s[k] += a.weight * power;
      power *= a.lambda;
    }
  }
  for (auto& b : p.s) b = hermitian_part(b);
  return p;
}

CMatrix random_psd(SplitMix64& rng, std::size_t m, std::size_t rank, double lo, double hi) {
  // Gram-Schmidt on random complex columns gives a unitary basis.
  CMatrix v(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) v(i, j) = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    for (std::size_t k = 0; k < j; ++k) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < m; ++i) dot += std::conj(v(i, k)) * v(i, j);
      for (std::size_t i = 0; i < m; ++i) v(i, j) -= dot * v(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += std::norm(v(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < m; ++i) v(i, j) /= norm;
  }
  std::vector<double> ev(m, 0.0);
  for (std::size_t k = 0; k < rank; ++k) ev[k] = rng.uniform(lo, hi);
  return hermitian_part(v * CMatrix::diagonal(std::span<const double>(ev)) * v.adjoint());
}

std::pair<GeneratorSpec, MomentProblem> random_instance(std::size_t m, std::size_t n,
                                                        std::size_t atom_count,
                                                        std::uint64_t seed) {
  SplitMix64 rng(seed);
  GeneratorSpec spec;
  spec.m = m;
  spec.n = n;
  spec.seed = seed;
  const double width = atom_count > 0 ? 4.0 / static_cast<double>(atom_count) : 4.0;
  for (std::size_t j = 0; j < atom_count; ++j) {
    const double lo = -2.0 + width * static_cast<double>(j) + 0.05;
    const double hi = lo + width - 0.1;
    GeneratorSpec::Atom atom;
    atom.lambda = rng.uniform(lo, hi);
    const std::size_t rank = rng.index(1, m);
    atom.weight = random_psd(rng, m, rank, 0.1, 1.0);
    spec.atoms.push_back(std::move(atom));
  }
  MomentProblem p = gen_from_measure(spec);
  return {std::move(spec), std::move(p)};
}

MomentProblem random_psd_problem(std::size_t m, std::size_t n, std::size_t atom_count,
                                 std::uint64_t seed) {
  auto [spec, p] = random_instance(m, n, atom_count, seed);
  SplitMix64 rng(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  p.s[2 * n] += random_psd(rng, m, rng.index(1, m), 0.1, 1.0);
  p.s[2 * n] = hermitian_part(p.s[2 * n]);
  return p;
}

namespace {

using EMat = Eigen::MatrixXcd;

EMat to_eigen(const CMatrix& a) {
  EMat out(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return out;
}

CMatrix from_eigen(const EMat& a) {
  CMatrix out(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = a(i, j);
  return out;
}

EMat dense_hankel(const MomentProblem& p, std::size_t order) {
  const auto m = static_cast<Eigen::Index>(p.m);
  const auto blocks = static_cast<Eigen::Index>(order + 1);
  EMat k(m * blocks, m * blocks);
  for (Eigen::Index i = 0; i < blocks; ++i)
    for (Eigen::Index j = 0; j < blocks; ++j)
      k.block(i * m, j * m, m, m) = to_eigen(p.s[static_cast<std::size_t>(i + j)]);
  return k;
}

}  // namespace

BruteReport brute_classify(const MomentProblem& p, double tol) {
  BruteReport rep;
  const auto m = static_cast<Eigen::Index>(p.m);
  const EMat k = dense_hankel(p, p.n);
  Eigen::SelfAdjointEigenSolver<EMat> full(k);
  const auto& ev = full.eigenvalues();
  const double lmax = ev.size() > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
  const double thr = tol * std::max(1.0, lmax);
  rep.psd = ev.size() == 0 || ev.minCoeff() >= -thr;
  rep.rank_K = static_cast<std::size_t>((ev.array().abs() > thr).count());

  if (p.n == 0) {
    rep.in_Htilde = rep.psd;
    rep.R = p.s[0];
    return rep;
  }
  const EMat head = dense_hankel(p, p.n - 1);
  Eigen::SelfAdjointEigenSolver<EMat> hs(head);
  const auto& hv = hs.eigenvalues();
  const double hmax = hv.cwiseAbs().maxCoeff();
  const double hthr = tol * std::max(1.0, hmax);
  const Eigen::Index dim = head.rows();
  EMat proj = EMat::Zero(dim, dim);
  EMat pinv = EMat::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const auto vec = hs.eigenvectors().col(c);
    if (std::abs(hv(c)) <= hthr) proj += vec * vec.adjoint();
    else pinv += vec * vec.adjoint() / hv(c);
  }
  const auto n = static_cast<Eigen::Index>(p.n);
  EMat col(m * n, m);
  EMat y(m, m * n);
  for (Eigen::Index b = 0; b < n; ++b) {
    col.block(b * m, 0, m, m) = to_eigen(p.s[static_cast<std::size_t>(p.n + 1 + b)]);
    y.block(0, b * m, m, m) = to_eigen(p.s[static_cast<std::size_t>(p.n + b)]);
  }
  const double colmax = col.size() > 0 ? col.cwiseAbs().maxCoeff() : 0.0;
  rep.kernel_proj_residual = (proj * col).cwiseAbs().maxCoeff();
  rep.in_Htilde = rep.psd && rep.kernel_proj_residual <= tol * (1.0 + colmax);
  const EMat r = to_eigen(p.s[2 * p.n]) - y * pinv * y.adjoint();
  rep.R = from_eigen(0.5 * (r + r.adjoint()));
  return rep;
}

}  // namespace mhmp
