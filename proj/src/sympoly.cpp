#include "besq/sympoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace besq {

SymPolyVector::SymPolyVector(int p) : p_(p), e_(static_cast<std::size_t>(p) + 1, 0.0) {
  if (p < 1) throw std::invalid_argument("SymPolyVector: p must be >= 1");
  e_[0] = 1.0;
}

SymPolyVector SymPolyVector::from_coeffs(std::vector<double> e) {
  if (e.size() < 2) throw std::invalid_argument("SymPolyVector: need e_0 and at least e_1");
  if (e[0] != 1.0) throw std::invalid_argument("SymPolyVector: e_0 must equal 1");
  SymPolyVector v(static_cast<int>(e.size()) - 1);
  v.e_ = std::move(e);
  return v;
}

void SymPolyVector::set(int r, double v) {
  if (r < 1 || r > p_) throw std::out_of_range("SymPolyVector::set: index outside [1, p]");
  e_[static_cast<std::size_t>(r)] = v;
}

SymPolyVector elementary_all(std::span<const double> x) {
  const int p = static_cast<int>(x.size());
  SymPolyVector e(p);
  std::vector<double> c(static_cast<std::size_t>(p) + 1, 0.0);
  c[0] = 1.0;
  // Multiply out prod_i (t + x_i) one factor at a time.
  for (int i = 0; i < p; ++i) {
    for (int n = i + 1; n >= 1; --n)
      c[static_cast<std::size_t>(n)] += x[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(n) - 1];
  }
  for (int n = 1; n <= p; ++n) e.set(n, c[static_cast<std::size_t>(n)]);
  return e;
}

double incomplete(std::span<const double> x, int n, std::span<const int> excluded) {
  const int p = static_cast<int>(x.size());
  if (n < 0) return 0.0;
  if (n == 0) return 1.0;
  std::vector<bool> skip(static_cast<std::size_t>(p), false);
  for (int j : excluded) {
    if (j < 1 || j > p) throw std::invalid_argument("incomplete: excluded index outside {1,...,p}");
    skip[static_cast<std::size_t>(j - 1)] = true;
  }
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  int used = 0;
  for (int i = 0; i < p; ++i) {
    if (skip[static_cast<std::size_t>(i)]) continue;
    ++used;
    const int top = std::min(n, used);
    for (int k = top; k >= 1; --k)
      c[static_cast<std::size_t>(k)] += x[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(k) - 1];
  }
  if (n > used) return 0.0;
  return c[static_cast<std::size_t>(n)];
}

double drift_direct(std::span<const double> x, int n, double alpha) {
  const int p = static_cast<int>(x.size());
  if (n < 1 || n > p) throw std::invalid_argument("drift_direct: n outside [1, p]");
  double s1 = 0.0;
  for (int i = 1; i <= p; ++i) {
    const int ex[1] = {i};
    s1 += incomplete(x, n - 1, ex);
  }
  double s2 = 0.0;
  if (n >= 2) {
    for (int i = 1; i <= p; ++i) {
      for (int j = i + 1; j <= p; ++j) {
        const int ex[2] = {i, j};
        s2 += (std::abs(x[static_cast<std::size_t>(i - 1)]) + std::abs(x[static_cast<std::size_t>(j - 1)])) *
              incomplete(x, n - 2, ex);
      }
    }
  }
  return alpha * s1 - s2;
}

double drift_closed(const SymPolyVector& e, int n, double alpha) {
  const int p = e.degree();
  if (n < 1 || n > p) throw std::invalid_argument("drift_closed: n outside [1, p]");
  return (p - n + 1) * (alpha - n + 1) * e.at(n - 1);
}

double diffusion_sq_closed(const SymPolyVector& e, int n) {
  const int p = e.degree();
  if (n < 1 || n > p) throw std::invalid_argument("diffusion_sq_closed: n outside [1, p]");
  const int kmax = std::min(n, p + 1 - n);
  double s = 0.0;
  for (int k = 1; k <= kmax; ++k) s += (2 * k - 1) * e.at(n - k) * e.at(n + k - 1);
  return 4.0 * s;
}

double bracket_closed_entry(const SymPolyVector& e, int n, int m) {
  const int p = e.degree();
  if (n > m) std::swap(n, m);
  if (n < 1 || m > p) throw std::invalid_argument("bracket_closed_entry: indices outside [1, p]");
  const int kmax = std::min(n, p + 1 - m);
  double s = 0.0;
  for (int k = 1; k <= kmax; ++k) s += (m - n + 2 * k - 1) * e.at(n - k) * e.at(m + k - 1);
  return 4.0 * s;
}

SymMatrix bracket_matrix_closed(const SymPolyVector& e) {
  const int p = e.degree();
  SymMatrix s(p);
  for (int n = 1; n <= p; ++n)
    for (int m = n; m <= p; ++m) s.set(n - 1, m - 1, bracket_closed_entry(e, n, m));
  return s;
}

double bracket_direct(std::span<const double> x, int n, int m) {
  const int p = static_cast<int>(x.size());
  if (n < 1 || n > p || m < 1 || m > p)
    throw std::invalid_argument("bracket_direct: indices outside [1, p]");
  double s = 0.0;
  for (int i = 1; i <= p; ++i) {
    const int ex[1] = {i};
    s += std::abs(x[static_cast<std::size_t>(i - 1)]) * incomplete(x, n - 1, ex) * incomplete(x, m - 1, ex);
  }
  return 4.0 * s;
}

IdentityPair identity_simple_brack(std::span<const double> x, int n, int m) {
  const int p = static_cast<int>(x.size());
  if (!(1 <= n && n <= m && m <= p))
    throw std::invalid_argument("identity_simple_brack: need 1 <= n <= m <= p");
  for (double v : x) {
    if (v < 0.0) throw std::invalid_argument("identity_simple_brack: entries must be non-negative");
  }
  double lhs = 0.0;
  for (int i = 1; i <= p; ++i) {
    const int ex[1] = {i};
    lhs += x[static_cast<std::size_t>(i - 1)] * incomplete(x, n - 1, ex) * incomplete(x, m - 1, ex);
  }
  const SymPolyVector e = elementary_all(x);
  double rhs = 0.0;
  for (int k = 1; k <= p; ++k) rhs += (m - n + 2 * k - 1) * e.at(n - k) * e.at(m + k - 1);
  return {lhs, rhs};
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("comb_identity: integer overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("comb_identity: integer overflow");
  return r;
}

std::int64_t binomial_checked(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    c = checked_mul(c, n - k + i);
    c /= i;  // exact: C(n-k+i, i) is an integer
  }
  return c;
}

}  // namespace

CombPair comb_identity(int j, int N) {
  if (j < 1 || N < 0 || N > j - 1)
    throw std::invalid_argument("comb_identity: need j >= 1 and 0 <= N <= j-1");
  std::int64_t lhs = 0;
  for (int r = 0; r <= N; ++r)
    lhs = checked_add(lhs, checked_mul(j - 2 * r, binomial_checked(j, r)));
  const std::int64_t rhs = checked_mul(N + 1, binomial_checked(j, N + 1));
  return {lhs, rhs};
}

namespace {

// Horner evaluation of sum_i c[i] t^i together with the magnitude scale
// sum_i |c[i]| |t|^i used as a relative backward-error yardstick.
struct EvalResult {
  double value;
  double scale;
};

EvalResult eval_poly(std::span<const double> c, double t) {
  double v = 0.0;
  double s = 0.0;
  const double at = std::abs(t);
  for (std::size_t i = c.size(); i-- > 0;) {
    v = v * t + c[i];
    s = s * at + std::abs(c[i]);
  }
  return {v, std::max(s, 1e-300)};
}

double eval_value(std::span<const double> c, double t) { return eval_poly(c, t).value; }

// Refine a sign-change bracket [lo, hi] by bisection with Newton polish.
double refine_root(std::span<const double> c, std::span<const double> dc, double lo, double hi,
                   double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
    const double fm = eval_value(c, mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double f = eval_value(c, r);
    const double df = eval_value(dc, r);
    if (df == 0.0) break;
    const double step = f / df;
    const double rn = r - step;
    if (rn < lo || rn > hi) break;
    r = rn;
  }
  return r;
}

// All real roots of a polynomial known (up to drift) to be real-rooted,
// by recursive derivative interlacing. Returns the worst scaled |P| at
// any projected (non-crossing) root.
double real_roots_interlaced(std::vector<double> c, std::vector<double>& out) {
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && c[static_cast<std::size_t>(d)] == 0.0) --d;
  c.resize(static_cast<std::size_t>(d) + 1);
  out.clear();
  if (d == 0) return 0.0;
  const double lead = c[static_cast<std::size_t>(d)];
  for (double& v : c) v /= lead;

  if (d == 1) {
    out.push_back(-c[0]);
    return 0.0;
  }
  if (d == 2) {
    const double b = c[1];
    const double c0 = c[0];
    const double disc = b * b - 4.0 * c0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      double r1 = q;
      double r2 = (q != 0.0) ? c0 / q : -b - q;  // q == 0 only when b == c0 == 0
      if (r1 > r2) std::swap(r1, r2);
      out = {r1, r2};
      return 0.0;
    }
    // Complex pair: project to the shared real part.
    const double v = -0.5 * b;
    out = {v, v};
    const EvalResult ev = eval_poly(c, v);
    return std::abs(ev.value) / ev.scale;
  }

  std::vector<double> dc(static_cast<std::size_t>(d));
  for (int i = 1; i <= d; ++i) dc[static_cast<std::size_t>(i) - 1] = i * c[static_cast<std::size_t>(i)];
  std::vector<double> inner;
  double resid = real_roots_interlaced(dc, inner);

  double bound = 0.0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::abs(c[static_cast<std::size_t>(i)]));
  bound += 1.0;  // Cauchy bound for a monic polynomial

  std::vector<double> ends;
  ends.reserve(inner.size() + 2);
  ends.push_back(-bound);
  for (double r : inner) ends.push_back(std::clamp(r, -bound, bound));
  ends.push_back(bound);

  for (std::size_t j = 0; j + 1 < ends.size(); ++j) {
    const double lo = ends[j];
    const double hi = ends[j + 1];
    if (lo == hi) {
      out.push_back(lo);
      const EvalResult ev = eval_poly(c, lo);
      resid = std::max(resid, std::abs(ev.value) / ev.scale);
      continue;
    }
    const EvalResult elo = eval_poly(c, lo);
    const EvalResult ehi = eval_poly(c, hi);
    if (elo.value == 0.0) {
      out.push_back(lo);
      continue;
    }
    if (ehi.value == 0.0) {
      out.push_back(hi);
      continue;
    }
    if ((elo.value < 0.0) != (ehi.value < 0.0)) {
      out.push_back(refine_root(c, dc, lo, hi, elo.value));
    } else {
      // No crossing: the monotone piece only touches zero near the
      // endpoint with the smaller |P| (a multiple root or a complex
      // pair drifted off the real axis). Project there.
      const bool pick_lo = std::abs(elo.value) / elo.scale <= std::abs(ehi.value) / ehi.scale;
      out.push_back(pick_lo ? lo : hi);
      const EvalResult& e = pick_lo ? elo : ehi;
      resid = std::max(resid, std::abs(e.value) / e.scale);
    }
  }
  std::sort(out.begin(), out.end());
  return resid;
}

}  // namespace

RootExtraction roots_from_polys(const SymPolyVector& e, double tol) {
  const int p = e.degree();
  std::vector<double> c(static_cast<std::size_t>(p) + 1, 0.0);
  for (int k = 0; k <= p; ++k)
    c[static_cast<std::size_t>(p - k)] = ((k % 2) ? -1.0 : 1.0) * e.at(k);
  RootExtraction out;
  out.residual = real_roots_interlaced(std::move(c), out.roots);
  out.real_rooted = out.residual <= tol;
  return out;
}

}  // namespace besq
