#include "mhmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mhmp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::RankMismatch: return "RankMismatch";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotInClass: return "NotInClass";
    case ErrorKind::CompressionResidual: return "CompressionResidual";
    case ErrorKind::SingularHead: return "SingularHead";
    case ErrorKind::SingularTheta: return "SingularTheta";
    case ErrorKind::NotNeutral: return "NotNeutral";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::NonSimplePole: return "NonSimplePole";
    case ErrorKind::NonRealPole: return "NonRealPole";
    case ErrorKind::ReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorKind::RealPoint: return "RealPoint";
    case ErrorKind::SingularCayley: return "SingularCayley";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// CMatrix

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::ShapeError, "entry count " + std::to_string(data_.size()) +
                                           " does not match " + std::to_string(rows) + "x" +
                                           std::to_string(cols));
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorKind::ShapeError, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> d) {
  CMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CMatrix CMatrix::transpose() const {
  CMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

CMatrix CMatrix::conj() const {
  CMatrix r = *this;
  for (auto& x : r.data_) x = std::conj(x);
  return r;
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorKind::ShapeError, "block out of range");
  }
  CMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) {
    throw Error(ErrorKind::ShapeError, "set_block out of range");
  }
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

double CMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

CMatrix& CMatrix::operator+=(const CMatrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) throw Error(ErrorKind::ShapeError, "add");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) throw Error(ErrorKind::ShapeError, "subtract");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols_ != b.rows_) {
    throw Error(ErrorKind::ShapeError, "multiply " + std::to_string(a.rows_) + "x" +
                                           std::to_string(a.cols_) + " by " +
                                           std::to_string(b.rows_) + "x" +
                                           std::to_string(b.cols_));
  }
  CMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) { return (a - b).max_abs(); }

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix hstack(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::ShapeError, "hstack");
  CMatrix r(a.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(0, a.cols(), b);
  return r;
}

CMatrix vstack(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.cols()) throw Error(ErrorKind::ShapeError, "vstack");
  CMatrix r(a.rows() + b.rows(), a.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), 0, b);
  return r;
}

CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

bool is_hermitian(const CMatrix& a) {
  if (!a.is_square()) return false;
  const double bound = 1e-12 * (1.0 + a.max_abs());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > bound) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver

EigDecomposition herm_eig(const CMatrix& input) {
  if (!input.is_square()) throw Error(ErrorKind::ShapeError, "herm_eig needs a square matrix");
  if (input.rows() > kMaxEigDimension) throw Error(ErrorKind::ShapeError, "herm_eig size > 512");
  if (!is_hermitian(input)) throw Error(ErrorKind::NotHermitian, "herm_eig input");

  const std::size_t n = input.rows();
  CMatrix a = hermitian_part(input);
  CMatrix v = CMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

  double frob = 0.0;
  for (const auto& x : a.entries()) frob += std::norm(x);
  frob = std::sqrt(frob);
  const double negligible = 1e-18 * frob;

  bool converged = n < 2 || frob == 0.0;
  for (int sweep = 0; sweep < kJacobiSweepBudget && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx h = a(p, q);
        const double habs = std::abs(h);
        if (habs <= negligible) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        // Phase-strip the pivot to a real symmetric 2x2 problem, then rotate.
        const cplx phase = h / habs;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * habs);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]]
        const cplx gpp = c;
        const cplx gpq = s;
        const cplx gqp = -s * std::conj(phase);
        const cplx gqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {  // A <- A G
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- G* A
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {  // V <- V G
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
    converged = !rotated;
  }
  if (!converged) throw Error(ErrorKind::NoConvergence, "Jacobi sweep budget exhausted");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

namespace {

double rank_threshold(const std::vector<double>& values, double tol) {
  double lmax = 0.0;
  for (double x : values) lmax = std::max(lmax, std::abs(x));
  return tol * std::max(1.0, lmax);
}

}  // namespace

KernelData rank_kernel(const CMatrix& a, double tol) {
  const auto eig = herm_eig(a);
  const double thr = rank_threshold(eig.values, tol);
  const std::size_t n = a.rows();
  std::vector<std::size_t> kernel_idx;
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(eig.values[k]) <= thr) kernel_idx.push_back(k);

  KernelData out;
  out.rank = n - kernel_idx.size();
  out.kernel_basis = CMatrix(n, kernel_idx.size());
  for (std::size_t c = 0; c < kernel_idx.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) out.kernel_basis(i, c) = eig.vectors(i, kernel_idx[c]);
  out.projector = out.kernel_basis * out.kernel_basis.adjoint();
  if (n == 0) out.projector = CMatrix(0, 0);
  return out;
}

double min_eigenvalue(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  return herm_eig(a).values.front();
}

bool is_psd(const CMatrix& a, double tol) {
  if (a.rows() == 0) return true;
  const auto eig = herm_eig(a);
  return eig.values.front() >= -rank_threshold(eig.values, tol);
}

CMatrix range_compression(const CMatrix& k, double tol) {
  const auto eig = herm_eig(k);
  const double thr = rank_threshold(eig.values, tol);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < eig.values.size(); ++j)
    if (std::abs(eig.values[j]) > thr) idx.push_back(j);
  CMatrix q(idx.size(), k.rows());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t i = 0; i < k.rows(); ++i) q(r, i) = std::conj(eig.vectors(i, idx[r]));
  return q;
}

namespace {

// Orthonormal basis of the columns of a full column rank matrix; two passes
// of classical Gram-Schmidt.
CMatrix gram_schmidt(const CMatrix& x) {
  CMatrix u = x;
  for (std::size_t j = 0; j < u.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        cplx dot = 0.0;
        for (std::size_t r = 0; r < u.rows(); ++r) dot += std::conj(u(r, i)) * u(r, j);
        for (std::size_t r = 0; r < u.rows(); ++r) u(r, j) -= dot * u(r, i);
      }
    double norm = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) norm += std::norm(u(r, j));
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error(ErrorKind::RankMismatch, "Q is rank deficient");
    for (std::size_t r = 0; r < u.rows(); ++r) u(r, j) /= norm;
  }
  return u;
}

}  // namespace

CMatrix pseudo_inverse(const CMatrix& k, const CMatrix& q, double tol) {
  if (!k.is_square() || q.cols() != k.rows()) {
    throw Error(ErrorKind::ShapeError, "pseudo_inverse shapes");
  }
  const std::size_t rank_k = rank_kernel(k, tol).rank;
  if (q.rows() == 0) {
    if (rank_k != 0) throw Error(ErrorKind::RankMismatch, "empty Q for nonzero K");
    return CMatrix(k.rows(), k.rows());
  }
  const CMatrix qkq = hermitian_part(q * k * q.adjoint());
  const auto eig = herm_eig(qkq);
  const double thr = rank_threshold(eig.values, tol);
  if (eig.values.front() <= thr) {
    throw Error(ErrorKind::RankMismatch, "Q K Q* is not positive definite");
  }
  if (q.rows() != rank_k) {
    throw Error(ErrorKind::RankMismatch, "rank Q K Q* = " + std::to_string(q.rows()) +
                                             " but rank K = " + std::to_string(rank_k));
  }
  // With Q* = U T, U orthonormal and T invertible, Q*(QKQ*)^{-1}Q equals
  // U (U*KU)^{-1} U*; the second form does not see the conditioning of T.
  const CMatrix u = gram_schmidt(q.adjoint());
  const CMatrix g = hermitian_part(u.adjoint() * k * u);
  const auto ge = herm_eig(g);
  if (ge.values.front() <= 0.0) throw Error(ErrorKind::RankMismatch, "U* K U is not positive definite");
  // (U*KU)^{-1} from its eigendecomposition keeps the result Hermitian.
  CMatrix inv(g.rows(), g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.rows(); ++j) {
      cplx acc = 0.0;
      for (std::size_t l = 0; l < g.rows(); ++l)
        acc += ge.vectors(i, l) * std::conj(ge.vectors(j, l)) / ge.values[l];
      inv(i, j) = acc;
    }
  return hermitian_part(u * inv * u.adjoint());
}

// ---------------------------------------------------------------------------
// LU

namespace {

double norm1(const CMatrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

// Returns false when elimination hits an exactly zero pivot.
bool lu_solve_in_place(CMatrix a, CMatrix& b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (best == 0.0) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a(i, k) / a(k, k);
      if (f == cplx{}) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx acc = b(kk, j);
      for (std::size_t l = kk + 1; l < n; ++l) acc -= a(kk, l) * b(l, j);
      b(kk, j) = acc / a(kk, kk);
    }
  }
  return true;
}

}  // namespace

std::optional<CMatrix> try_inverse(const CMatrix& a, double rcond_tol) {
  if (!a.is_square()) throw Error(ErrorKind::ShapeError, "inverse of non-square matrix");
  if (a.rows() == 0) return CMatrix(0, 0);
  CMatrix x = CMatrix::identity(a.rows());
  if (!lu_solve_in_place(a, x)) return std::nullopt;
  const double anorm = norm1(a);
  const double xnorm = norm1(x);
  if (!std::isfinite(xnorm) || anorm == 0.0) return std::nullopt;
  if (1.0 / (anorm * xnorm) < rcond_tol) return std::nullopt;
  return x;
}

CMatrix inverse(const CMatrix& a, double rcond_tol) {
  auto inv = try_inverse(a, rcond_tol);
  if (!inv) throw Error(ErrorKind::SingularMatrix, "matrix is numerically singular");
  return *std::move(inv);
}

CMatrix solve(const CMatrix& a, const CMatrix& b, double rcond_tol) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::ShapeError, "solve shapes");
  return inverse(a, rcond_tol) * b;
}

CMatrix orthonormal_range(const CMatrix& x, double tol) {
  if (x.rows() == 0) return CMatrix(0, 0);
  const auto eig = herm_eig(hermitian_part(x * x.adjoint()));
  const double thr = rank_threshold(eig.values, tol);
  std::vector<std::size_t> idx;
  // Largest first, so the basis order is deterministic and dominant-first.
  for (std::size_t j = eig.values.size(); j-- > 0;)
    if (eig.values[j] > thr) idx.push_back(j);
  CMatrix out(x.rows(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c)
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, c) = eig.vectors(i, idx[c]);
  return out;
}

CMatrix orthonormal_complement(const CMatrix& x, double tol) {
  const std::size_t n = x.rows();
  if (n == 0) return CMatrix(0, 0);
  if (x.cols() == 0) return CMatrix::identity(n);
  const auto eig = herm_eig(hermitian_part(x * x.adjoint()));
  const double thr = rank_threshold(eig.values, tol);
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < n; ++j)
    if (eig.values[j] <= thr) idx.push_back(j);
  CMatrix out(n, idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c)
    for (std::size_t i = 0; i < n; ++i) out(i, c) = eig.vectors(i, idx[c]);
  return out;
}

double spectral_norm(const CMatrix& a) {
  if (a.empty()) return 0.0;
  const auto eig = herm_eig(hermitian_part(a.adjoint() * a));
  return std::sqrt(std::max(0.0, eig.values.back()));
}

}  // namespace mhmp
