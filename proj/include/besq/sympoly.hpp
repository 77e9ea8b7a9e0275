#ifndef BESQ_SYMPOLY_HPP
#define BESQ_SYMPOLY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "besq/linalg.hpp"

namespace besq {

// (e_0, ..., e_p) with e_0 = 1; the accessor returns 0 outside [0, p].
class SymPolyVector {
 public:
  SymPolyVector() = default;
  explicit SymPolyVector(int p);  // e = (1, 0, ..., 0)
  // Full coefficient list including the leading 1.
  static SymPolyVector from_coeffs(std::vector<double> e);

  int degree() const { return p_; }
  double at(int r) const {
    if (r < 0 || r > p_) return 0.0;
    return e_[static_cast<std::size_t>(r)];
  }
  void set(int r, double v);  // r in [1, p]; e_0 is fixed
  std::span<const double> raw() const { return e_; }

 private:
  int p_ = 0;
  std::vector<double> e_;
};

// All elementary symmetric polynomials of x by the incremental product
// recurrence (O(p^2), stable).
SymPolyVector elementary_all(std::span<const double> x);

// Incomplete elementary symmetric polynomial of degree n over the
// variables whose 1-based indices are not in `excluded`.
double incomplete(std::span<const double> x, int n, std::span<const int> excluded);

// Drift rate of e_n(X) from incomplete-polynomial sums:
//   sum_i alpha e_{n-1}^{i-bar} - sum_{i<j} (|x_i|+|x_j|) e_{n-2}^{i-bar,j-bar}.
// Valid for any sign of x.
double drift_direct(std::span<const double> x, int n, double alpha);

// Closed form (p-n+1)(alpha-n+1) e_{n-1}.
double drift_closed(const SymPolyVector& e, int n, double alpha);

// Squared diffusion coefficient of e_n:
//   4 sum_{k>=1} (2k-1) e_{n-k} e_{n+k-1},
// truncated at K = min(n, p+1-n) where terms vanish anyway.
double diffusion_sq_closed(const SymPolyVector& e, int n);

// Covariation rate of (e_n, e_m), closed form. Entry (n-1, m-1) of the
// returned matrix is 4 sum_k (m-n+2k-1) e_{n-k} e_{m+k-1}.
SymMatrix bracket_matrix_closed(const SymPolyVector& e);

// Single closed-form bracket entry, n, m in [1, p].
double bracket_closed_entry(const SymPolyVector& e, int n, int m);

// Direct covariation rate 4 sum_i |x_i| e_{n-1}^{i-bar} e_{m-1}^{i-bar}.
double bracket_direct(std::span<const double> x, int n, int m);

struct IdentityPair {
  double lhs;
  double rhs;
};

// Both sides of sum_i x_i e_{n-1}^{i-bar} e_{m-1}^{i-bar}
//             = sum_k (m-n+2k-1) e_{n-k} e_{m+k-1},
// stated for non-negative particles (negative entries are rejected).
IdentityPair identity_simple_brack(std::span<const double> x, int n, int m);

struct CombPair {
  std::int64_t lhs;
  std::int64_t rhs;
};

// Exact integers for sum_{r=0}^{N} (j-2r) C(j,r) and (N+1) C(j, N+1).
// Arithmetic is overflow-checked; overflow throws instead of wrapping.
CombPair comb_identity(int j, int N);

struct RootExtraction {
  std::vector<double> roots;  // ascending, length p
  double residual = 0.0;      // relative off-real-rooted residual
  bool real_rooted = true;    // residual <= tolerance
};

// Ordered roots of t^p - e_1 t^{p-1} + ... + (-1)^p e_p. Roots are
// isolated by derivative interlacing and refined by bisection/Newton;
// an unresolved bracket (complex pair drifted off the real-rooted
// manifold) contributes its scaled |P| minimum to `residual` and the
// projected real part is returned in its place.
RootExtraction roots_from_polys(const SymPolyVector& e, double tol = 1e-6);

}  // namespace besq

#endif  // BESQ_SYMPOLY_HPP
