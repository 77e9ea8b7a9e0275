#ifndef BESQ_LINALG_HPP
#define BESQ_LINALG_HPP

#include <span>
#include <vector>

namespace besq {

// Minimal dense row-major matrix, sized for desk-scale problems (p <= 64).
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);
  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }
  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Real symmetric p x p matrix. Construction from general entries rejects
// relative asymmetry above 1e-12 and symmetrizes what remains.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);  // zero matrix
  static SymMatrix from_rows(const Matrix& a);
  static SymMatrix diagonal(std::span<const double> d);

  int size() const { return n_; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }
  void set(int i, int j, double v) {
    data_[idx(i, j)] = v;
    data_[idx(j, i)] = v;
  }
  Matrix dense() const;
  double frobenius() const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  int n_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> lambda;  // ascending
  Matrix q;                    // columns are eigenvectors, Y = Q diag(lambda) Q^T
};

// Cyclic Jacobi with threshold sweeps; adequate and robust at desk scale.
EigenDecomposition sym_eigen(const SymMatrix& y);

// Spectral |.|^(1/2): Q diag(sqrt(|lambda|)) Q^T.
SymMatrix matrix_abs_sqrt(const SymMatrix& y);

// Factor L with L L^T = S_+ (negative eigenvalues clipped to zero).
// Rejects S with an eigenvalue below -tol_psd * ||S||.
Matrix psd_factor(const SymMatrix& s, double tol_psd = 1e-9);

}  // namespace besq

#endif  // BESQ_LINALG_HPP
