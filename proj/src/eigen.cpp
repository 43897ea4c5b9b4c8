#include "cssp/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cssp {
namespace {

constexpr double kConvergeRelTol = 1e-12;
constexpr int kMaxSweeps = 64;

double offdiag_norm(const DenseMatrix& a) {
  const std::size_t n = a.rows();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += a(i, j) * a(i, j);
  return std::sqrt(2.0 * sum);
}

// Runs cyclic Jacobi sweeps on `a` in place until the off-diagonal mass
// falls below 1e-12 * ||a||_F.  When `v` is non-null it accumulates the
// rotations, so on exit a_in == v * a_out * v^T.
void jacobi(DenseMatrix& a, DenseMatrix* v) {
  const std::size_t n = a.rows();
  const double norm = a.frobenius_norm();
  if (norm == 0.0) return;
  const double stop = kConvergeRelTol * norm;
  const double skip = stop / (static_cast<double>(n) * static_cast<double>(n));
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_norm(a) <= stop) return;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= skip) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        if (v != nullptr) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*v)(k, p);
            const double vkq = (*v)(k, q);
            (*v)(k, p) = c * vkp - s * vkq;
            (*v)(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
}

DenseMatrix symmetrized(const DenseMatrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  if (!m.is_symmetric())
    throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
  const std::size_t n = m.rows();
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  return a;
}

}  // namespace

Eigensystem eigensym(const DenseMatrix& m) {
  DenseMatrix a = symmetrized(m, "eigensym");
  const std::size_t n = a.rows();
  DenseMatrix v = DenseMatrix::identity(n);
  jacobi(a, &v);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  std::vector<double> values(n);
  DenseMatrix basis(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) basis(i, j) = v(i, order[j]);
  }
  return Eigensystem{Spectrum(std::move(values)), std::move(basis)};
}

Spectrum eigenvalues(const DenseMatrix& m) { return eigensym(m).spectrum; }

double trace_norm_sym(const DenseMatrix& m) {
  DenseMatrix a = symmetrized(m, "trace_norm_sym");
  jacobi(a, nullptr);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) sum += std::abs(a(i, i));
  return sum;
}

DenseMatrix psd_pseudo_inverse(const DenseMatrix& m) {
  const Eigensystem es = eigensym(m);
  const std::size_t n = m.rows();
  const double tol = es.spectrum.rank_tolerance();
  DenseMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lam = es.spectrum[j];
    if (lam <= tol) continue;
    const double inv = 1.0 / lam;
    for (std::size_t r = 0; r < n; ++r) {
      const double w = inv * es.basis(r, j);
      if (w == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += w * es.basis(c, j);
    }
  }
  return out;
}

}  // namespace cssp
