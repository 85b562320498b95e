#include "mhmp/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>

namespace mhmp {

int Poly::degree() const noexcept {
  for (std::size_t k = c_.size(); k-- > 0;)
    if (c_[k] != cplx{}) return static_cast<int>(k);
  return -1;
}

cplx Poly::operator()(cplx z) const noexcept {
  cplx acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly({0.0});
  std::vector<cplx> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
  return Poly(std::move(d));
}

std::vector<cplx> Poly::taylor(cplx center) const {
  std::vector<cplx> a = c_;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = n - 1; j-- > k;) a[j] += center * a[j + 1];
  return a;
}

double Poly::max_abs_coeff() const noexcept {
  double m = 0.0;
  for (const auto& x : c_) m = std::max(m, std::abs(x));
  return m;
}

double Poly::magnitude_bound(double radius) const noexcept {
  double acc = 0.0;
  double pw = 1.0;
  for (const auto& x : c_) {
    acc += std::abs(x) * pw;
    pw *= radius;
  }
  return acc;
}

Poly& Poly::operator+=(const Poly& b) {
  if (b.c_.size() > c_.size()) c_.resize(b.c_.size(), cplx{});
  for (std::size_t k = 0; k < b.c_.size(); ++k) c_[k] += b.c_[k];
  return *this;
}

Poly& Poly::operator-=(const Poly& b) {
  if (b.c_.size() > c_.size()) c_.resize(b.c_.size(), cplx{});
  for (std::size_t k = 0; k < b.c_.size(); ++k) c_[k] -= b.c_[k];
  return *this;
}

Poly& Poly::operator*=(cplx s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.c_.empty() || b.c_.empty()) return Poly();
  std::vector<cplx> r(a.c_.size() + b.c_.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(r));
}

Poly trimmed(const Poly& p, double rel_tol) {
  const double bound = rel_tol * p.max_abs_coeff();
  std::vector<cplx> c = p.coeffs();
  while (!c.empty() && std::abs(c.back()) <= bound) c.pop_back();
  return Poly(std::move(c));
}

namespace {

using EMat = Eigen::MatrixXcd;

// Parlett-Reinsch diagonal similarity scaling, radix 2.
void balance(EMat& a) {
  const Eigen::Index n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  for (int iter = 0; iter < 100 && !done; ++iter) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

std::vector<cplx> eigenvalues_of(EMat a) {
  balance(a);
  Eigen::ComplexEigenSolver<EMat> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "companion eigenvalue iteration failed");
  }
  std::vector<cplx> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index k = 0; k < a.rows(); ++k) out[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
  return out;
}

}  // namespace

std::vector<cplx> poly_roots(const Poly& p) {
  const int deg = p.degree();
  if (deg <= 0) return {};
  const cplx lead = p.coeff(static_cast<std::size_t>(deg));
  const auto n = static_cast<Eigen::Index>(deg);
  EMat comp = EMat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) comp(0, k) = -p.coeff(static_cast<std::size_t>(deg - 1 - k)) / lead;
  for (Eigen::Index k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  return eigenvalues_of(std::move(comp));
}

CMatrix PolyMatrix::operator()(cplx z) const {
  CMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j)(z);
  return out;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorKind::ShapeError, "poly matrix multiply");
  PolyMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t j = 0; j < b.cols_; ++j) {
      Poly acc({0.0});
      for (std::size_t k = 0; k < a.cols_; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = std::move(acc);
    }
  return c;
}

namespace {

PolyMatrix minor_of(const PolyMatrix& a, std::size_t skip_row, std::size_t skip_col) {
  PolyMatrix m(a.rows() - 1, a.cols() - 1);
  for (std::size_t i = 0, mi = 0; i < a.rows(); ++i) {
    if (i == skip_row) continue;
    for (std::size_t j = 0, mj = 0; j < a.cols(); ++j) {
      if (j == skip_col) continue;
      m(mi, mj++) = a(i, j);
    }
    ++mi;
  }
  return m;
}

}  // namespace

Poly determinant(const PolyMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeError, "determinant of non-square");
  const std::size_t n = a.rows();
  if (n == 0) return Poly({1.0});
  if (n == 1) return a(0, 0);
  if (n > 8) throw Error(ErrorKind::ShapeError, "polynomial determinant limited to 8x8");
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  Poly acc({0.0});
  for (std::size_t j = 0; j < n; ++j) {
    if (a(0, j).is_zero()) continue;
    Poly term = a(0, j) * determinant(minor_of(a, 0, j));
    if (j % 2 == 0) acc += term;
    else acc -= term;
  }
  return acc;
}

PolyMatrix adjugate(const PolyMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeError, "adjugate of non-square");
  const std::size_t n = a.rows();
  PolyMatrix adj(n, n);
  if (n == 0) return adj;
  if (n == 1) {
    adj(0, 0) = Poly({1.0});
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Poly cof = determinant(minor_of(a, j, i));
      adj(i, j) = ((i + j) % 2 == 0) ? cof : cof * -1.0;
    }
  return adj;
}

MatrixPolynomial::MatrixPolynomial(std::vector<CMatrix> coeffs) : c_(std::move(coeffs)) {
  for (const auto& c : c_)
    if (c.rows() != c_.front().rows() || c.cols() != c_.front().cols())
      throw Error(ErrorKind::ShapeError, "matrix polynomial coefficient shapes differ");
}

CMatrix MatrixPolynomial::operator()(cplx z) const {
  if (c_.empty()) return {};
  CMatrix acc = c_.back();
  for (std::size_t k = c_.size() - 1; k-- > 0;) {
    acc *= z;
    acc += c_[k];
  }
  return acc;
}

MatrixPolynomial MatrixPolynomial::derivative() const {
  if (c_.size() <= 1) return MatrixPolynomial({CMatrix(rows(), cols())});
  std::vector<CMatrix> out;
  for (std::size_t k = 1; k < c_.size(); ++k) out.push_back(c_[k] * static_cast<double>(k));
  return MatrixPolynomial(std::move(out));
}

MatrixPolynomial MatrixPolynomial::block(std::size_t r0, std::size_t c0, std::size_t nr,
                                         std::size_t nc) const {
  std::vector<CMatrix> b;
  b.reserve(c_.size());
  for (const auto& c : c_) b.push_back(c.block(r0, c0, nr, nc));
  return MatrixPolynomial(std::move(b));
}

PolyMatrix MatrixPolynomial::entries() const {
  PolyMatrix out(rows(), cols());
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) {
      std::vector<cplx> coeffs(c_.size());
      for (std::size_t k = 0; k < c_.size(); ++k) coeffs[k] = c_[k](i, j);
      out(i, j) = Poly(std::move(coeffs));
    }
  return out;
}

MatrixPolynomial operator*(const MatrixPolynomial& p, const CMatrix& c) {
  std::vector<CMatrix> out;
  out.reserve(p.c_.size());
  for (const auto& k : p.c_) out.push_back(k * c);
  return MatrixPolynomial(std::move(out));
}

std::vector<cplx> matrix_polynomial_eigenvalues(const MatrixPolynomial& p, double finite_radius) {
  if (p.rows() != p.cols()) throw Error(ErrorKind::ShapeError, "square matrix polynomial required");
  const std::size_t m = p.rows();
  std::size_t deg = p.degree();
  double scale = 0.0;
  for (const auto& c : p.coeffs()) scale = std::max(scale, c.max_abs());
  if (m == 0 || scale == 0.0) return {};
  while (deg > 0 && p.coeffs()[deg].max_abs() <= 1e-15 * scale) --deg;
  if (deg == 0) return {};

  // Shift off the real axis where P is well conditioned; reversing about the
  // shift makes the leading coefficient P(shift), so the pencil is regular.
  static constexpr std::array<cplx, 8> kShifts = {
      cplx{0.0, 0.61}, cplx{0.37, 1.13}, cplx{-0.71, 0.83}, cplx{1.29, 0.47},
      cplx{-1.43, 1.61}, cplx{0.19, 2.27}, cplx{2.11, 1.37}, cplx{-2.33, 0.53}};
  cplx shift = kShifts[0];
  double best_rcond = -1.0;
  CMatrix lead_inv;
  for (const cplx s : kShifts) {
    const CMatrix ps = p(s);
    const auto inv = try_inverse(ps, 0.0);
    if (!inv) continue;
    double a1 = 0.0, b1 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double ca = 0.0, cb = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        ca += std::abs(ps(i, j));
        cb += std::abs((*inv)(i, j));
      }
      a1 = std::max(a1, ca);
      b1 = std::max(b1, cb);
    }
    const double rc = 1.0 / (a1 * b1);
    if (rc > best_rcond) {
      best_rcond = rc;
      shift = s;
      lead_inv = *inv;
    }
  }
  if (best_rcond <= 0.0) {
    throw Error(ErrorKind::SingularMatrix, "matrix polynomial is singular at every trial shift");
  }

  // Taylor coefficients B_k of P about the shift: P(shift + h) = sum_k B_k h^k.
  std::vector<CMatrix> taylor(deg + 1, CMatrix(m, m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<cplx> c(deg + 1);
      for (std::size_t k = 0; k <= deg; ++k) c[k] = p.coeffs()[k](i, j);
      const auto t = Poly(std::move(c)).taylor(shift);
      for (std::size_t k = 0; k <= deg; ++k) taylor[k](i, j) = t[k];
    }

  // mu^deg P(shift + 1/mu) = sum_k B_k mu^(deg-k); monic after B_0^{-1}.
  const auto n = static_cast<Eigen::Index>(m * deg);
  EMat comp = EMat::Zero(n, n);
  for (std::size_t b = 0; b + 1 < deg; ++b)
    for (std::size_t i = 0; i < m; ++i)
      comp(static_cast<Eigen::Index>(b * m + i), static_cast<Eigen::Index>((b + 1) * m + i)) = 1.0;
  for (std::size_t j = 0; j < deg; ++j) {
    // coefficient of mu^j is B_{deg-j}
    const CMatrix r = lead_inv * taylor[deg - j];
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        comp(static_cast<Eigen::Index>((deg - 1) * m + a), static_cast<Eigen::Index>(j * m + b)) =
            -r(a, b);
  }
  const auto mus = eigenvalues_of(std::move(comp));
  std::vector<cplx> out;
  for (const cplx mu : mus) {
    if (std::abs(mu) * finite_radius <= 1.0) continue;
    const cplx z = shift + 1.0 / mu;
    if (std::abs(z) <= finite_radius) out.push_back(z);
  }
  return out;
}

}  // namespace mhmp
