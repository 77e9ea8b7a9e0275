#include "besq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace besq {

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SymMatrix::SymMatrix(int n)
    : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {
  if (n < 1) throw std::invalid_argument("SymMatrix: size must be >= 1");
}

SymMatrix SymMatrix::from_rows(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SymMatrix: matrix not square");
  const int n = a.rows();
  double scale = 0.0;
  double asym = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(a(i, j)));
      asym = std::max(asym, std::abs(a(i, j) - a(j, i)));
    }
  if (scale > 0.0 && asym > 1e-12 * scale)
    throw std::invalid_argument("SymMatrix: relative asymmetry exceeds 1e-12");
  SymMatrix s(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.size(); ++i) s.set(i, i, d[static_cast<std::size_t>(i)]);
  return s;
}

Matrix SymMatrix::dense() const {
  Matrix m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double SymMatrix::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

EigenDecomposition sym_eigen(const SymMatrix& y) {
  const int n = y.size();
  Matrix a = y.dense();
  Matrix q = Matrix::identity(n);

  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));

  if (n > 1 && scale > 0.0) {
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double off = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
      if (std::sqrt(off) <= 1e-15 * scale * n) break;

      for (int p = 0; p < n - 1; ++p) {
        for (int qi = p + 1; qi < n; ++qi) {
          const double apq = a(p, qi);
          if (std::abs(apq) <= 1e-18 * scale) continue;
          const double theta = (a(qi, qi) - a(p, p)) / (2.0 * apq);
          double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;

          for (int k = 0; k < n; ++k) {
            const double akp = a(k, p);
            const double akq = a(k, qi);
            a(k, p) = c * akp - s * akq;
            a(k, qi) = s * akp + c * akq;
          }
          for (int k = 0; k < n; ++k) {
            const double apk = a(p, k);
            const double aqk = a(qi, k);
            a(p, k) = c * apk - s * aqk;
            a(qi, k) = s * apk + c * aqk;
          }
          for (int k = 0; k < n; ++k) {
            const double qkp = q(k, p);
            const double qkq = q(k, qi);
            q(k, p) = c * qkp - s * qkq;
            q(k, qi) = s * qkp + c * qkq;
          }
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  EigenDecomposition dec;
  dec.lambda.resize(static_cast<std::size_t>(n));
  dec.q = Matrix(n, n);
  for (int col = 0; col < n; ++col) {
    const int src = order[static_cast<std::size_t>(col)];
    dec.lambda[static_cast<std::size_t>(col)] = a(src, src);
    // Deterministic sign: largest-magnitude component positive.
    int kmax = 0;
    for (int k = 1; k < n; ++k)
      if (std::abs(q(k, src)) > std::abs(q(kmax, src))) kmax = k;
    const double sgn = q(kmax, src) < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k) dec.q(k, col) = sgn * q(k, src);
  }
  return dec;
}

SymMatrix matrix_abs_sqrt(const SymMatrix& y) {
  const int n = y.size();
  EigenDecomposition dec = sym_eigen(y);
  SymMatrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        s += dec.q(i, k) * dec.q(j, k) * std::sqrt(std::abs(dec.lambda[static_cast<std::size_t>(k)]));
      out.set(i, j, s);
    }
  }
  return out;
}

Matrix psd_factor(const SymMatrix& s, double tol_psd) {
  const int n = s.size();
  EigenDecomposition dec = sym_eigen(s);
  double norm = 0.0;
  for (double l : dec.lambda) norm = std::max(norm, std::abs(l));
  if (dec.lambda.front() < -tol_psd * norm)
    throw std::domain_error("psd_factor: matrix has eigenvalue below -tol_psd * norm");

  // Columns ordered by descending eigenvalue (stable, so degenerate
  // spectra keep their column order) and rank-deficient factors carry
  // their mass in the leading columns.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dec.lambda[static_cast<std::size_t>(a)] > dec.lambda[static_cast<std::size_t>(b)];
  });
  Matrix l(n, n);
  for (int col = 0; col < n; ++col) {
    const int src = order[static_cast<std::size_t>(col)];
    const double lam = std::max(dec.lambda[static_cast<std::size_t>(src)], 0.0);
    const double w = std::sqrt(lam);
    for (int k = 0; k < n; ++k) l(k, col) = dec.q(k, src) * w;
  }
  return l;
}

}  // namespace besq
