#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "besq/linalg.hpp"
#include "besq/sympoly.hpp"

using namespace besq;

namespace {

// Brute-force oracle: e_n by explicit subset enumeration. Independent of
// the incremental recurrence under test.
double brute_elementary(const std::vector<double>& x, int n,
                        const std::vector<int>& excluded = {}) {
  const int p = static_cast<int>(x.size());
  if (n == 0) return 1.0;
  if (n < 0) return 0.0;
  std::vector<int> idx;
  for (int i = 1; i <= p; ++i)
    if (std::find(excluded.begin(), excluded.end(), i) == excluded.end()) idx.push_back(i);
  const int m = static_cast<int>(idx.size());
  if (n > m) return 0.0;
  double sum = 0.0;
  // Iterate n-subsets of idx via bitmask (desk scale only).
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    double prod = 1.0;
    for (int b = 0; b < m; ++b)
      if (mask & (1u << b)) prod *= x[static_cast<std::size_t>(idx[static_cast<std::size_t>(b)] - 1)];
    sum += prod;
  }
  return sum;
}

double brute_drift(const std::vector<double>& x, int n, double alpha) {
  const int p = static_cast<int>(x.size());
  double s1 = 0.0;
  for (int i = 1; i <= p; ++i) s1 += brute_elementary(x, n - 1, {i});
  double s2 = 0.0;
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j)
      s2 += (std::abs(x[static_cast<std::size_t>(i - 1)]) + std::abs(x[static_cast<std::size_t>(j - 1)])) *
            brute_elementary(x, n - 2, {i, j});
  return alpha * s1 - s2;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

std::vector<double> random_config(std::mt19937_64& rng, int p, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(static_cast<std::size_t>(p));
  for (double& v : x) v = u(rng);
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

TEST_CASE("elementary_all hand expansions") {
  const SymPolyVector e = elementary_all(std::vector<double>{1, 2, 3});
  CHECK(e.at(0) == 1.0);
  CHECK(e.at(1) == 6.0);
  CHECK(e.at(2) == 11.0);
  CHECK(e.at(3) == 6.0);
  CHECK(e.at(4) == 0.0);
  CHECK(e.at(-1) == 0.0);

  const SymPolyVector z = elementary_all(std::vector<double>{0, 0, 0});
  CHECK(z.at(0) == 1.0);
  CHECK(z.at(1) == 0.0);
  CHECK(z.at(2) == 0.0);
  CHECK(z.at(3) == 0.0);

  const SymPolyVector m = elementary_all(std::vector<double>{-1, 2});
  CHECK(m.at(1) == 1.0);
  CHECK(m.at(2) == -2.0);
}

TEST_CASE("elementary_all matches subset enumeration") {
  std::mt19937_64 rng(3);
  for (int p = 1; p <= 8; ++p) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto x = random_config(rng, p, -4.0, 4.0);
      const SymPolyVector e = elementary_all(x);
      for (int n = 0; n <= p; ++n)
        CHECK(rel_err(e.at(n), brute_elementary(x, n)) <= 1e-12);
    }
  }
}

TEST_CASE("incomplete polynomials") {
  const std::vector<double> x{1, 2, 3};
  const int ex2[] = {2};
  CHECK(incomplete(x, 1, ex2) == 4.0);
  const int ex1[] = {1};
  CHECK(incomplete(x, 2, ex1) == 6.0);
  CHECK(incomplete(x, 3, ex1) == 0.0);
  CHECK(incomplete(x, 0, ex1) == 1.0);
  const int bad[] = {4};
  CHECK_THROWS_AS(incomplete(x, 1, bad), std::invalid_argument);
}

TEST_CASE("drift_direct examples with brute-force oracle") {
  const std::vector<double> x{1, 2, 3};
  CHECK(brute_drift(x, 2, 1.0) == 0.0);  // oracle confirms the frozen value
  CHECK(drift_direct(x, 2, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(drift_direct(x, 1, 0.0) == 0.0);
  CHECK(drift_direct(std::vector<double>{0, 0}, 1, 5.0) == 10.0);
}

TEST_CASE("drift at a zero-block configuration") {
  // With l negatives, m zeros and n positives, the polynomial of degree
  // one past the nonzero count has drift m * (product of nonzeros) *
  // (alpha + l - n); this is what pins the zero block when alpha = n - l.
  {
    const std::vector<double> x{-2, -1, 0, 0, 1, 3};  // l=2, m=2, n=2
    const double prod = (-2.0) * (-1.0) * 1.0 * 3.0;
    for (double alpha : {-1.0, 0.0, 0.7, 2.0})
      CHECK(drift_direct(x, 5, alpha) ==
            doctest::Approx(2.0 * prod * (alpha + 2 - 2)).epsilon(1e-12));
  }
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  std::uniform_real_distribution<double> ua(-3.0, 3.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int l = static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 3);
    const int n = static_cast<int>(rng() % 3);
    const int p = l + m + n;
    if (p < 2 || l + n == 0) continue;
    std::vector<double> x;
    double prod = 1.0;
    for (int i = 0; i < l; ++i) x.push_back(-u(rng));
    for (int i = 0; i < m; ++i) x.push_back(0.0);
    for (int i = 0; i < n; ++i) x.push_back(u(rng));
    std::sort(x.begin(), x.end());
    for (double v : x)
      if (v != 0.0) prod *= v;
    const double alpha = ua(rng);
    const double expected = m * prod * (alpha + l - n);
    CHECK(rel_err(drift_direct(x, l + n + 1, alpha), expected) <= 1e-12);
  }
}

TEST_CASE("drift direct equals closed form on non-negative configs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(-3.0, 6.0);
  for (int p = 2; p <= 8; ++p) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto x = random_config(rng, p, 0.0, 5.0);
      const SymPolyVector e = elementary_all(x);
      const double alpha = ua(rng);
      for (int n = 1; n <= p; ++n)
        CHECK(rel_err(drift_direct(x, n, alpha), drift_closed(e, n, alpha)) <= 1e-10);
    }
  }
}

TEST_CASE("drift_closed examples") {
  const SymPolyVector e = elementary_all(std::vector<double>{1, 2, 3});
  CHECK(drift_closed(e, 2, 0.0) == -12.0);
  CHECK(drift_closed(e, 1, 0.7) == doctest::Approx(3 * 0.7));
  const SymPolyVector e2 = elementary_all(std::vector<double>{1, 2});
  CHECK(drift_closed(e2, 2, 1.0) == 0.0);
}

TEST_CASE("diffusion_sq_closed examples") {
  const SymPolyVector e = elementary_all(std::vector<double>{1, 2, 3});
  CHECK(diffusion_sq_closed(e, 1) == 24.0);
  // Oracle: direct 4 sum x_i (e_1^{i-bar})^2 = 4 (25 + 32 + 27) = 336.
  CHECK(diffusion_sq_closed(e, 2) == 336.0);
  SymPolyVector unit(3);
  CHECK(diffusion_sq_closed(unit, 2) == 0.0);
  CHECK(diffusion_sq_closed(unit, 3) == 0.0);
}

TEST_CASE("bracket matrix examples") {
  const SymPolyVector e = elementary_all(std::vector<double>{1, 2, 3});
  const SymMatrix s = bracket_matrix_closed(e);
  CHECK(s(0, 1) == 88.0);  // oracle: 4 sum x_i e_0 e_1^{i-bar} = 4(5+8+9)
  CHECK(s(0, 0) == 4.0 * e.at(1));
  CHECK(s(1, 0) == s(0, 1));

  const SymMatrix z = bracket_matrix_closed(elementary_all(std::vector<double>{0, 0, 0}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(z(i, j) == 0.0);
}

TEST_CASE("bracket_direct examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(bracket_direct(x, 1, 2) == 88.0);
  CHECK(bracket_direct(x, 1, 1) == 24.0);
  CHECK(bracket_direct(std::vector<double>{-1, 2}, 1, 1) == 12.0);
}

TEST_CASE("bracket direct equals closed form; diffusion is the diagonal") {
  std::mt19937_64 rng(9);
  for (int p = 2; p <= 8; ++p) {
    for (int rep = 0; rep < 30; ++rep) {
      const auto x = random_config(rng, p, 0.0, 5.0);
      const SymPolyVector e = elementary_all(x);
      const SymMatrix s = bracket_matrix_closed(e);
      for (int n = 1; n <= p; ++n) {
        CHECK(rel_err(diffusion_sq_closed(e, n), s(n - 1, n - 1)) <= 1e-12);
        for (int m = n; m <= p; ++m)
          CHECK(rel_err(bracket_direct(x, n, m), s(n - 1, m - 1)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("K-truncation matches the untruncated convention sum") {
  std::mt19937_64 rng(13);
  for (int p = 2; p <= 8; ++p) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = random_config(rng, p, 0.0, 5.0);
      const SymPolyVector e = elementary_all(x);
      for (int n = 1; n <= p; ++n) {
        for (int m = n; m <= p; ++m) {
          double full = 0.0;
          for (int k = 1; k <= p; ++k) full += (m - n + 2 * k - 1) * e.at(n - k) * e.at(m + k - 1);
          CHECK(bracket_closed_entry(e, n, m) == 4.0 * full);
        }
        double fulln = 0.0;
        for (int k = 1; k <= p; ++k) fulln += (2 * k - 1) * e.at(n - k) * e.at(n + k - 1);
        CHECK(diffusion_sq_closed(e, n) == 4.0 * fulln);
      }
    }
  }
}

TEST_CASE("bracket matrix is PSD for non-negative configs") {
  std::mt19937_64 rng(17);
  for (int p = 2; p <= 8; ++p) {
    for (int rep = 0; rep < 25; ++rep) {
      const auto x = random_config(rng, p, 0.0, 5.0);
      const SymMatrix s = bracket_matrix_closed(elementary_all(x));
      const EigenDecomposition dec = sym_eigen(s);
      double norm = 0.0;
      for (double l : dec.lambda) norm = std::max(norm, std::abs(l));
      CHECK(dec.lambda.front() >= -1e-9 * norm);
    }
  }
}

TEST_CASE("simple-bracket identity examples and property") {
  const std::vector<double> x{1, 2, 3};
  IdentityPair pr = identity_simple_brack(x, 1, 1);
  CHECK(pr.lhs == 6.0);
  CHECK(pr.rhs == 6.0);
  pr = identity_simple_brack(x, 2, 2);
  CHECK(pr.lhs == 84.0);
  CHECK(pr.rhs == 84.0);
  pr = identity_simple_brack(x, 1, 2);
  CHECK(pr.lhs == 22.0);
  CHECK(pr.rhs == 22.0);
  CHECK_THROWS_AS(identity_simple_brack(std::vector<double>{-1, 2}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(identity_simple_brack(x, 2, 1), std::invalid_argument);

  std::mt19937_64 rng(21);
  for (int p = 2; p <= 8; ++p) {
    for (int rep = 0; rep < 40; ++rep) {
      const auto xr = random_config(rng, p, 0.0, 5.0);
      for (int n = 1; n <= p; ++n)
        for (int m = n; m <= p; ++m) {
          const IdentityPair q = identity_simple_brack(xr, n, m);
          CHECK(rel_err(q.lhs, q.rhs) <= 1e-10);
        }
    }
  }
}

TEST_CASE("combinatorial identity exact") {
  CombPair c = comb_identity(3, 0);
  CHECK(c.lhs == 3);
  CHECK(c.rhs == 3);
  c = comb_identity(5, 2);
  CHECK(c.lhs == 30);
  CHECK(c.rhs == 30);
  c = comb_identity(4, 3);
  CHECK(c.lhs == 4);
  CHECK(c.rhs == 4);
  for (int j = 1; j <= 25; ++j)
    for (int n = 0; n <= j - 1; ++n) {
      const CombPair pr = comb_identity(j, n);
      CHECK(pr.lhs == pr.rhs);
    }
  CHECK_THROWS_AS(comb_identity(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(comb_identity(0, 0), std::invalid_argument);
  // C(70,35) exceeds 64-bit range: detected, not wrapped.
  CHECK_THROWS_AS(comb_identity(70, 34), std::overflow_error);
}

TEST_CASE("roots_from_polys inverts the examples") {
  {
    const RootExtraction rx = roots_from_polys(SymPolyVector::from_coeffs({1, 6, 11, 6}));
    REQUIRE(rx.roots.size() == 3);
    CHECK(rx.real_rooted);
    CHECK(rx.roots[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rx.roots[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(rx.roots[2] == doctest::Approx(3.0).epsilon(1e-10));
  }
  {
    const RootExtraction rx = roots_from_polys(SymPolyVector::from_coeffs({1, 0, 0, 0}));
    for (double r : rx.roots) CHECK(r == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rx.real_rooted);
  }
  {
    const RootExtraction rx = roots_from_polys(SymPolyVector::from_coeffs({1, 1, -2}));
    CHECK(rx.roots[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rx.roots[1] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("roots round-trip on separated configs") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int p = 2; p <= 8; ++p) {
    for (int rep = 0; rep < 30; ++rep) {
      std::vector<double> x;
      while (static_cast<int>(x.size()) < p) {
        const double v = u(rng);
        bool ok = true;
        for (double w : x)
          if (std::abs(v - w) < 0.1) ok = false;
        if (ok) x.push_back(v);
      }
      std::sort(x.begin(), x.end());
      const RootExtraction rx = roots_from_polys(elementary_all(x));
      CHECK(rx.real_rooted);
      double scale = 1.0;
      for (double v : x) scale = std::max(scale, std::abs(v));
      for (int i = 0; i < p; ++i)
        CHECK(std::abs(rx.roots[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) <=
              1e-8 * scale);
    }
  }
}

TEST_CASE("roots of a clustered configuration stay close") {
  const std::vector<double> x{1.0, 1.0, 1.0};
  const RootExtraction rx = roots_from_polys(elementary_all(x));
  for (double r : rx.roots) CHECK(std::abs(r - 1.0) <= 1e-4);
}

TEST_CASE("non-real-rooted input is reported") {
  // t^2 + 1: e_1 = 0, e_2 = 1.
  const RootExtraction rx = roots_from_polys(SymPolyVector::from_coeffs({1, 0, 1}));
  CHECK_FALSE(rx.real_rooted);
  CHECK(rx.residual > 1e-3);
  CHECK(rx.roots[0] == doctest::Approx(0.0));  // projected real part
}

TEST_CASE("SymPolyVector conventions") {
  CHECK_THROWS_AS(SymPolyVector::from_coeffs({2, 1}), std::invalid_argument);
  SymPolyVector e(3);
  CHECK(e.at(0) == 1.0);
  CHECK_THROWS_AS(e.set(0, 2.0), std::out_of_range);
  CHECK_THROWS_AS(e.set(4, 2.0), std::out_of_range);
}
