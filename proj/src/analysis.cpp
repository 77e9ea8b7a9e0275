#include "besq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace besq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Particle-view series of a record (mapped view for polynomial paths).
const std::vector<std::vector<double>>& particle_series(const PathRecord& path) {
  return path.view == PathView::sympolys ? path.aux : path.states;
}

std::size_t index_at_time(const PathRecord& path, double t) {
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    if (std::abs(path.times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  }
  throw std::invalid_argument("no recorded snapshot at requested time");
}

// e_1..e_p series of a record; particle and eigenvalue snapshots are
// mapped through elementary_all.
std::vector<std::vector<double>> sympoly_series(const PathRecord& path) {
  std::vector<std::vector<double>> out;
  out.reserve(path.states.size());
  if (path.view == PathView::sympolys) {
    out = path.states;
  } else {
    for (const auto& x : path.states) {
      const SymPolyVector e = elementary_all(x);
      out.emplace_back(e.raw().begin() + 1, e.raw().end());
    }
  }
  return out;
}

}  // namespace

HittingTimes detect_hitting_times(const PathRecord& path, double tol_zero) {
  const auto& series = particle_series(path);
  const int p = path.p;
  HittingTimes ht;
  ht.t0.assign(static_cast<std::size_t>(p), kInf);
  ht.t_minus.assign(static_cast<std::size_t>(p), kInf);
  ht.t0_censored.assign(static_cast<std::size_t>(p), 1);
  ht.t_minus_censored.assign(static_cast<std::size_t>(p), 1);

  for (std::size_t k = 0; k < series.size(); ++k) {
    for (int i = 0; i < p; ++i) {
      const double v = series[k][static_cast<std::size_t>(i)];
      if (ht.t0_censored[static_cast<std::size_t>(i)] && v <= tol_zero) {
        ht.t0[static_cast<std::size_t>(i)] = path.times[k];
        ht.t0_censored[static_cast<std::size_t>(i)] = 0;
      }
      if (ht.t_minus_censored[static_cast<std::size_t>(i)] && v < -tol_zero) {
        ht.t_minus[static_cast<std::size_t>(i)] = path.times[k];
        ht.t_minus_censored[static_cast<std::size_t>(i)] = 0;
      }
    }
  }
  for (int i = 0; i + 1 < p; ++i) {
    if (ht.t0[static_cast<std::size_t>(i)] > ht.t0[static_cast<std::size_t>(i) + 1])
      ht.warnings.push_back("T0 ordering violated between particles " + std::to_string(i + 1) +
                            " and " + std::to_string(i + 2) + " (discretization)");
    if (ht.t_minus[static_cast<std::size_t>(i)] > ht.t_minus[static_cast<std::size_t>(i) + 1])
      ht.warnings.push_back("T- ordering violated between particles " + std::to_string(i + 1) +
                            " and " + std::to_string(i + 2) + " (discretization)");
  }
  return ht;
}

SymPolyVector moment_curve(const SystemParams& params, const SymPolyVector& e0, double t) {
  const int p = params.p;
  if (e0.degree() != p) throw std::invalid_argument("moment_curve: e0 degree != p");
  if (params.alpha < static_cast<double>(p) - 1.0)
    throw std::domain_error("moment_curve: requires alpha >= p-1");

  // E e_n(t) = e0_n + c_n Int E e_{n-1}, built as polynomial coefficients.
  std::vector<std::vector<double>> poly(static_cast<std::size_t>(p) + 1);
  poly[0] = {1.0};
  for (int n = 1; n <= p; ++n) {
    const double cn = (p - n + 1) * (params.alpha - n + 1);
    const auto& prev = poly[static_cast<std::size_t>(n) - 1];
    std::vector<double> cur(prev.size() + 1, 0.0);
    cur[0] = e0.at(n);
    for (std::size_t k = 0; k < prev.size(); ++k)
      cur[k + 1] = cn * prev[k] / static_cast<double>(k + 1);
    poly[static_cast<std::size_t>(n)] = std::move(cur);
  }

  SymPolyVector out(p);
  for (int n = 1; n <= p; ++n) {
    const auto& c = poly[static_cast<std::size_t>(n)];
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    out.set(n, v);
  }
  return out;
}

std::vector<McSummary> mc_estimate_many(const PathRunner& runner,
                                        std::span<const PathStatistic> statistics,
                                        int n_reps, const RngSpec& base, int threads) {
  if (n_reps < 2) throw std::invalid_argument("mc_estimate: n_reps must be >= 2");
  if (statistics.empty()) throw std::invalid_argument("mc_estimate: no statistics");
  const std::size_t ns = statistics.size();

  std::vector<std::vector<double>> values(ns, std::vector<double>(static_cast<std::size_t>(n_reps), 0.0));
  std::vector<std::uint8_t> ok(static_cast<std::size_t>(n_reps), 0);

  auto work = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      const RngSpec spec = base.with_replicate(base.replicate + static_cast<std::uint32_t>(r));
      try {
        const PathRecord path = runner(spec);
        if (path.aborted) continue;
        std::vector<double> vals(ns);
        for (std::size_t s = 0; s < ns; ++s) vals[s] = statistics[s](path);
        for (std::size_t s = 0; s < ns; ++s) values[s][static_cast<std::size_t>(r)] = vals[s];
        ok[static_cast<std::size_t>(r)] = 1;
      } catch (const std::exception&) {
        // A replicate whose path stopped before the statistic's time (or
        // otherwise cannot be evaluated) counts as incomplete.
      }
    }
  };

  const int nt = std::clamp(threads, 1, n_reps);
  if (nt == 1) {
    work(0, n_reps);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_reps + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(n_reps, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  int n_ok = 0;
  for (int r = 0; r < n_reps; ++r)
    if (ok[static_cast<std::size_t>(r)]) ++n_ok;

  std::vector<McSummary> out(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    McSummary& m = out[s];
    m.n_reps = n_reps;
    m.completion_rate = static_cast<double>(n_ok) / n_reps;
    if (n_ok == 0) continue;
    double mean = 0.0;
    for (int r = 0; r < n_reps; ++r)
      if (ok[static_cast<std::size_t>(r)]) mean += values[s][static_cast<std::size_t>(r)];
    mean /= n_ok;
    double var = 0.0;
    for (int r = 0; r < n_reps; ++r)
      if (ok[static_cast<std::size_t>(r)]) {
        const double d = values[s][static_cast<std::size_t>(r)] - mean;
        var += d * d;
      }
    var = n_ok > 1 ? var / (n_ok - 1) : 0.0;
    m.estimate = mean;
    m.std_error = std::sqrt(var / n_ok);
    m.ci_lo = mean - 1.96 * m.std_error;
    m.ci_hi = mean + 1.96 * m.std_error;
  }
  return out;
}

McSummary mc_estimate(const PathRunner& runner, const PathStatistic& statistic, int n_reps,
                      const RngSpec& base, int threads) {
  const PathStatistic stats[1] = {statistic};
  return mc_estimate_many(runner, stats, n_reps, base, threads)[0];
}

double realized_covariation(const PathRecord& path, int n, int m) {
  if (n < 1 || n > path.p || m < 1 || m > path.p)
    throw std::invalid_argument("realized_covariation: indices outside [1, p]");
  const auto series = sympoly_series(path);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    const double dn = series[k + 1][static_cast<std::size_t>(n - 1)] - series[k][static_cast<std::size_t>(n - 1)];
    const double dm = series[k + 1][static_cast<std::size_t>(m - 1)] - series[k][static_cast<std::size_t>(m - 1)];
    s += dn * dm;
  }
  return s;
}

double integrated_bracket(const PathRecord& path, int n, int m) {
  if (n < 1 || n > path.p || m < 1 || m > path.p)
    throw std::invalid_argument("integrated_bracket: indices outside [1, p]");
  const auto series = sympoly_series(path);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    std::vector<double> full(series[k].size() + 1);
    full[0] = 1.0;
    std::copy(series[k].begin(), series[k].end(), full.begin() + 1);
    const SymPolyVector e = SymPolyVector::from_coeffs(std::move(full));
    s += bracket_closed_entry(e, n, m) * (path.times[k + 1] - path.times[k]);
  }
  return s;
}

McSummary drift_regression_ep(std::span<const PathRecord> paths, const SystemParams& params) {
  if (params.alpha < static_cast<double>(params.p) - 1.0)
    throw std::domain_error("drift_regression_ep: requires alpha >= p-1");
  if (paths.empty()) throw std::invalid_argument("drift_regression_ep: no paths");
  const int p = params.p;

  std::vector<double> zs;
  std::vector<double> ys;
  for (const PathRecord& path : paths) {
    const auto series = sympoly_series(path);
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
      const double dt = path.times[k + 1] - path.times[k];
      const double ep_prev = p >= 2 ? series[k][static_cast<std::size_t>(p - 2)] : 1.0;
      zs.push_back(ep_prev * dt);
      ys.push_back(series[k + 1][static_cast<std::size_t>(p - 1)] - series[k][static_cast<std::size_t>(p - 1)]);
    }
  }

  double szz = 0.0;
  double szy = 0.0;
  double zmax = 0.0;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    szz += zs[k] * zs[k];
    szy += zs[k] * ys[k];
    zmax = std::max(zmax, std::abs(zs[k]));
  }
  if (!(szz > 0.0) || zmax == 0.0)
    throw std::domain_error("drift_regression_ep: degenerate regressor (e_{p-1} vanishes)");

  const double c = szy / szz;
  double hc0 = 0.0;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const double r = ys[k] - c * zs[k];
    hc0 += zs[k] * zs[k] * r * r;
  }
  McSummary m;
  m.estimate = c;
  m.std_error = std::sqrt(hc0) / szz;
  m.ci_lo = c - 1.96 * m.std_error;
  m.ci_hi = c + 1.96 * m.std_error;
  m.n_reps = static_cast<int>(paths.size());
  return m;
}

double particle_value_at(const PathRecord& path, int i, double t) {
  if (i < 1 || i > path.p) throw std::invalid_argument("particle_value_at: index outside [1, p]");
  const auto& series = particle_series(path);
  return series[index_at_time(path, t)][static_cast<std::size_t>(i - 1)];
}

double sympoly_value_at(const PathRecord& path, int n, double t) {
  if (n < 1 || n > path.p) throw std::invalid_argument("sympoly_value_at: index outside [1, p]");
  const std::size_t k = index_at_time(path, t);
  if (path.view == PathView::sympolys) return path.states[k][static_cast<std::size_t>(n - 1)];
  return elementary_all(path.states[k]).at(n);
}

double min_particle_over(const PathRecord& path, int i) {
  if (i < 1 || i > path.p) throw std::invalid_argument("min_particle_over: index outside [1, p]");
  const auto& series = particle_series(path);
  double v = kInf;
  for (const auto& x : series) v = std::min(v, x[static_cast<std::size_t>(i - 1)]);
  return v;
}

}  // namespace besq
