#include "besq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "besq/linalg.hpp"
#include "besq/sympoly.hpp"

namespace besq {

namespace {

double rel_err(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1.0});
  return std::abs(a - b) / scale;
}

std::vector<double> random_nonneg_config(std::mt19937_64& rng, int p) {
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<double> x(static_cast<std::size_t>(p));
  for (double& v : x) v = u(rng);
  std::sort(x.begin(), x.end());
  return x;
}

std::vector<double> random_separated_config(std::mt19937_64& rng, int p, double min_gap) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> x;
  while (static_cast<int>(x.size()) < p) {
    const double v = u(rng);
    bool ok = true;
    for (double w : x)
      if (std::abs(v - w) < min_gap) ok = false;
    if (ok) x.push_back(v);
  }
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

std::vector<CheckRow> run_verify_suite(const std::string& suite, int p_max, int cases,
                                       std::uint64_t seed) {
  if (p_max < 2 || p_max > 12) throw std::invalid_argument("verify: p_max must be in [2, 12]");
  if (cases < 1) throw std::invalid_argument("verify: cases must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<CheckRow> rows;

  if (suite == "identities") {
    for (int p = 2; p <= p_max; ++p) {
      double worst = 0.0;
      for (int c = 0; c < cases; ++c) {
        const auto x = random_nonneg_config(rng, p);
        for (int n = 1; n <= p; ++n)
          for (int m = n; m <= p; ++m) {
            const IdentityPair pair = identity_simple_brack(x, n, m);
            worst = std::max(worst, rel_err(pair.lhs, pair.rhs));
          }
      }
      rows.push_back({"simple_brack identity p=" + std::to_string(p), worst <= 1e-10, worst, ""});
    }
    {
      bool pass = true;
      for (int j = 1; j <= 25; ++j)
        for (int n = 0; n <= j - 1; ++n) {
          const CombPair pair = comb_identity(j, n);
          if (pair.lhs != pair.rhs) pass = false;
        }
      rows.push_back({"combinatorial identity j<=25", pass, 0.0, "exact integers"});
    }
  } else if (suite == "coefficients") {
    for (int p = 2; p <= p_max; ++p) {
      double worst = 0.0;
      std::uniform_real_distribution<double> ua(-3.0, 5.0);
      for (int c = 0; c < cases; ++c) {
        const auto x = random_nonneg_config(rng, p);
        const SymPolyVector e = elementary_all(x);
        const double alpha = ua(rng);
        for (int n = 1; n <= p; ++n)
          worst = std::max(worst, rel_err(drift_direct(x, n, alpha), drift_closed(e, n, alpha)));
      }
      rows.push_back({"drift direct vs closed p=" + std::to_string(p), worst <= 1e-10, worst, ""});
    }
  } else if (suite == "brackets") {
    for (int p = 2; p <= p_max; ++p) {
      double worst = 0.0;
      double worst_eig = 0.0;
      for (int c = 0; c < cases; ++c) {
        const auto x = random_nonneg_config(rng, p);
        const SymPolyVector e = elementary_all(x);
        const SymMatrix s = bracket_matrix_closed(e);
        for (int n = 1; n <= p; ++n)
          for (int m = n; m <= p; ++m)
            worst = std::max(worst, rel_err(bracket_direct(x, n, m), s(n - 1, m - 1)));
        const EigenDecomposition dec = sym_eigen(s);
        double norm = 0.0;
        for (double l : dec.lambda) norm = std::max(norm, std::abs(l));
        if (norm > 0.0) worst_eig = std::max(worst_eig, -dec.lambda.front() / norm);
      }
      rows.push_back({"bracket direct vs closed p=" + std::to_string(p), worst <= 1e-10, worst, ""});
      rows.push_back({"bracket matrix PSD p=" + std::to_string(p), worst_eig <= 1e-9, worst_eig,
                      "min eigenvalue relative to norm"});
    }
  } else if (suite == "roundtrip") {
    for (int p = 2; p <= p_max; ++p) {
      double worst = 0.0;
      for (int c = 0; c < cases; ++c) {
        const auto x = random_separated_config(rng, p, 0.1);
        const RootExtraction rx = roots_from_polys(elementary_all(x));
        double scale = 1.0;
        for (double v : x) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < p; ++i)
          worst = std::max(worst, std::abs(rx.roots[static_cast<std::size_t>(i)] -
                                           x[static_cast<std::size_t>(i)]) / scale);
        if (!rx.real_rooted) worst = std::max(worst, 1.0);
      }
      rows.push_back({"roots round-trip p=" + std::to_string(p), worst <= 1e-8, worst, ""});
    }
  } else {
    throw std::invalid_argument("verify: unknown suite '" + suite +
                                "' (identities|coefficients|brackets|roundtrip)");
  }
  return rows;
}

}  // namespace besq
