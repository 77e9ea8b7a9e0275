#ifndef BESQ_ANALYSIS_HPP
#define BESQ_ANALYSIS_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "besq/domain.hpp"
#include "besq/rng.hpp"
#include "besq/sde.hpp"
#include "besq/sympoly.hpp"

namespace besq {

struct McSummary {
  double estimate = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;  // estimate -/+ 1.96 std_error
  double ci_hi = 0.0;
  int n_reps = 0;
  double completion_rate = 1.0;
};

// Grid-time hitting times (right-biased by up to one step, no
// interpolation). Non-hits carry +infinity and a censored flag; the
// serialized form uses the path horizon as sentinel.
struct HittingTimes {
  std::vector<double> t0;
  std::vector<double> t_minus;
  std::vector<std::uint8_t> t0_censored;
  std::vector<std::uint8_t> t_minus_censored;
  std::vector<std::string> warnings;  // ordering violations (discretization)
};

HittingTimes detect_hitting_times(const PathRecord& path, double tol_zero);

// E[e_n(t)] from the exact linear recursion
//   d/dt E e_n = (p-n+1)(alpha-n+1) E e_{n-1},  E e_0 = 1,
// a degree-n polynomial in t. Requires alpha >= p-1 (non-negative regime,
// where the polynomial dynamics hold for all time).
SymPolyVector moment_curve(const SystemParams& params, const SymPolyVector& e0, double t);

using PathRunner = std::function<PathRecord(const RngSpec&)>;
using PathStatistic = std::function<double(const PathRecord&)>;

// n_reps independent replicates on streams (base.replicate + r); results
// merged in replicate order, so the thread count does not affect output.
// Aborted paths are excluded and reported through completion_rate.
McSummary mc_estimate(const PathRunner& runner, const PathStatistic& statistic,
                      int n_reps, const RngSpec& base, int threads = 1);

// Same replicates, several statistics in one pass.
std::vector<McSummary> mc_estimate_many(const PathRunner& runner,
                                        std::span<const PathStatistic> statistics,
                                        int n_reps, const RngSpec& base, int threads = 1);

// Sum over steps of (delta e_n)(delta e_m) along the path. Particle and
// eigenvalue paths are mapped through elementary_all first.
double realized_covariation(const PathRecord& path, int n, int m);

// Time integral of the closed-form bracket entry along the same path
// (left Riemann sum).
double integrated_bracket(const PathRecord& path, int n, int m);

// Least-squares slope c in delta e_p ~ c e_{p-1} delta t across steps and
// paths, with a heteroskedasticity-robust standard error. The CI should
// contain alpha - p + 1. Requires alpha >= p-1; throws on a degenerate
// regressor.
McSummary drift_regression_ep(std::span<const PathRecord> paths, const SystemParams& params);

// Path functionals used by the CLI and the acceptance suite.
double particle_value_at(const PathRecord& path, int i, double t);  // 1-based i
double sympoly_value_at(const PathRecord& path, int n, double t);
double min_particle_over(const PathRecord& path, int i);  // over recorded times

}  // namespace besq

#endif  // BESQ_ANALYSIS_HPP
