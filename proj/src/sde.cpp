#include "besq/sde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace besq {

void SimulationGrid::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("SimulationGrid: dt must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("SimulationGrid: t_end must be > 0");
  if (substep_cap < 1) throw std::invalid_argument("SimulationGrid: substep_cap must be >= 1");
  if (!(tol_coll > 0.0) || !(tol_zero > 0.0))
    throw std::invalid_argument("SimulationGrid: tolerances must be > 0");
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::hit_zero: return "hit_zero";
    case EventKind::went_negative: return "went_negative";
    case EventKind::collision: return "collision";
    case EventKind::projection_residual: return "projection_residual";
    case EventKind::substep_floor: return "substep_floor";
  }
  return "unknown";
}

bool PathRecord::has_event(EventKind kind, int i) const {
  for (const Event& e : events) {
    if (e.kind == kind && (i < 0 || e.i == i)) return true;
  }
  return false;
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Base-step boundaries k*dt, with the horizon appended when it is not a
// multiple of dt.
std::vector<double> grid_times(const SimulationGrid& grid) {
  std::vector<double> t;
  const long long n = static_cast<long long>(std::floor(grid.t_end / grid.dt + 1e-9));
  t.reserve(static_cast<std::size_t>(n) + 2);
  for (long long k = 0; k <= n; ++k) t.push_back(static_cast<double>(k) * grid.dt);
  if (t.back() < grid.t_end - 1e-12 * grid.dt) t.push_back(grid.t_end);
  else t.back() = std::min(t.back(), grid.t_end);
  return t;
}

}  // namespace

void append_state_events(PathRecord& rec, const SimulationGrid& grid) {
  const auto& series = (rec.view == PathView::sympolys) ? rec.aux : rec.states;
  const int p = rec.p;
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(p), 0);
  std::vector<std::uint8_t> neg(static_cast<std::size_t>(p), 0);
  std::vector<std::uint8_t> coll(static_cast<std::size_t>(p) * p, 0);

  for (std::size_t k = 0; k < series.size() && k < rec.times.size(); ++k) {
    const std::vector<double>& x = series[k];
    const double t = rec.times[k];
    for (int i = 0; i < p; ++i) {
      const double v = x[static_cast<std::size_t>(i)];
      if (!hit[static_cast<std::size_t>(i)] && v <= grid.tol_zero) {
        hit[static_cast<std::size_t>(i)] = 1;
        rec.events.push_back({EventKind::hit_zero, t, i + 1, -1, v});
      }
      if (!neg[static_cast<std::size_t>(i)] && v < -grid.tol_zero) {
        neg[static_cast<std::size_t>(i)] = 1;
        rec.events.push_back({EventKind::went_negative, t, i + 1, -1, v});
      }
    }
    for (int i = 0; i < p; ++i) {
      for (int j = i + 1; j < p; ++j) {
        const std::size_t c = static_cast<std::size_t>(i) * p + j;
        if (!coll[c] &&
            std::abs(x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(i)]) <= grid.tol_coll) {
          coll[c] = 1;
          rec.events.push_back({EventKind::collision, t, i + 1, j + 1,
                                x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(i)]});
        }
      }
    }
  }
  std::stable_sort(rec.events.begin(), rec.events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
}

std::vector<double> step_particles(std::span<const double> x, const SystemParams& params,
                                   double dt, std::span<const double> noise, double tol_coll) {
  const int p = params.p;
  if (static_cast<int>(x.size()) != p || static_cast<int>(noise.size()) != p)
    throw std::invalid_argument("step_particles: size mismatch");
  const double sq = std::sqrt(dt);
  std::vector<double> out(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    double drift = params.alpha;
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      const double xj = x[static_cast<std::size_t>(j)];
      const double d = xi - xj;
      if (std::abs(d) > tol_coll) {
        drift += (std::abs(xi) + std::abs(xj)) / d;
      } else if (std::abs(xi) <= tol_coll && std::abs(xj) <= tol_coll) {
        // Collided pair at zero: diffusion vanishes too, so the plain
        // scheme would freeze there, while the non-colliding solution
        // splits the block immediately. The pairwise ratio has the
        // mixed-sign one-sided limit +-1 at zero, which is exactly the
        // split drift of the gluing construction; away from zero the
        // limit diverges and the term stays dropped.
        drift += (j < i) ? 1.0 : -1.0;
      }
    }
    out[static_cast<std::size_t>(i)] =
        xi + 2.0 * std::sqrt(std::abs(xi)) * sq * noise[static_cast<std::size_t>(i)] + drift * dt;
  }
  std::sort(out.begin(), out.end());
  return out;
}

PathRecord simulate_particles(const SystemParams& params, const ParticleConfig& x0,
                              const SimulationGrid& grid, const RngSpec& rng) {
  grid.validate();
  const int p = params.p;
  if (x0.size() != p) throw std::invalid_argument("simulate_particles: x0 size != p");

  PathRecord rec;
  rec.view = PathView::particles;
  rec.p = p;
  GaussianStream gs(rng);

  std::vector<double> x(x0.values().begin(), x0.values().end());
  std::vector<double> noise(static_cast<std::size_t>(p));
  const std::vector<double> times = grid_times(grid);
  const double lim = p * (1.0 + std::abs(params.alpha));
  bool floor_logged = false;

  rec.times.push_back(0.0);
  rec.states.push_back(x);

  // Smallest gap among pairs whose drift term is actually singular:
  // both entries strictly on the same side of zero. Mixed-sign and
  // zero-touching pairs have |(|x|+|y|)/(x-y)| <= 1 and need no
  // refinement.
  auto active_gap = [&](const std::vector<double>& s) {
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) {
        const double lo = s[static_cast<std::size_t>(i)];
        const double hi = s[static_cast<std::size_t>(j)];
        const double g = hi - lo;
        if (g <= grid.tol_coll) continue;
        const bool same_sign = (lo > grid.tol_coll && hi > grid.tol_coll) ||
                               (lo < -grid.tol_coll && hi < -grid.tol_coll);
        if (same_sign) gap = std::min(gap, g);
      }
    return gap;
  };

  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h0 = times[k + 1] - times[k];
    const double floor_h = h0 / grid.substep_cap;

    // The gap is re-checked at every substep boundary: the singular
    // pairwise drift must not step further than the gap it divides by,
    // and the gap can collapse mid base step.
    double remaining = h0;
    while (remaining > 1e-12 * h0) {
      const double gap = active_gap(x);
      const double target =
          std::isfinite(gap) ? (gap * gap) / (lim * lim) : std::numeric_limits<double>::infinity();
      double h = remaining;
      while (h > target && 0.5 * h >= floor_h) h *= 0.5;
      if (h > target && !floor_logged) {
        floor_logged = true;
        rec.events.push_back({EventKind::substep_floor, times[k + 1] - remaining, -1, -1, h});
      }
      h = std::min(h, remaining);
      gs.fill(noise);
      x = step_particles(x, params, h, noise, grid.tol_coll);
      if (!all_finite(x)) {
        rec.aborted = true;
        rec.abort_reason =
            "non-finite particle state at t=" + std::to_string(times[k + 1] - remaining + h);
        append_state_events(rec, grid);
        return rec;
      }
      remaining -= h;
    }

    rec.times.push_back(times[k + 1]);
    rec.states.push_back(x);
  }
  append_state_events(rec, grid);
  return rec;
}

PathRecord simulate_wishart(const SystemParams& params, const SymMatrix& y0,
                            const SimulationGrid& grid, const RngSpec& rng) {
  grid.validate();
  const int p = params.p;
  if (y0.size() != p) throw std::invalid_argument("simulate_wishart: Y0 size != p");

  PathRecord rec;
  rec.view = PathView::eigenvalues;
  rec.p = p;
  GaussianStream gs(rng);

  SymMatrix y = y0;
  Matrix g(p, p);
  const std::vector<double> times = grid_times(grid);

  auto snapshot = [&](double t) -> bool {
    EigenDecomposition dec = sym_eigen(y);
    const bool ok = all_finite(dec.lambda);
    rec.times.push_back(t);
    rec.states.push_back(std::move(dec.lambda));
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(p) * p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) flat.push_back(y(i, j));
    rec.aux.push_back(std::move(flat));
    return ok;
  };

  snapshot(0.0);

  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    const double sq = std::sqrt(h);
    const SymMatrix s = matrix_abs_sqrt(y);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) g(i, j) = gs.next();
    // Y += sqrt(h) (S G + (S G)^T) + alpha I h, symmetric by construction.
    SymMatrix yn = y;
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) {
        double m_ij = 0.0;
        double m_ji = 0.0;
        for (int l = 0; l < p; ++l) {
          m_ij += s(i, l) * g(l, j);
          m_ji += s(j, l) * g(l, i);
        }
        double v = y(i, j) + sq * (m_ij + m_ji);
        if (i == j) v += params.alpha * h;
        yn.set(i, j, v);
      }
    }
    y = yn;
    if (!snapshot(times[k + 1])) {
      rec.aborted = true;
      rec.abort_reason = "non-finite matrix state at t=" + std::to_string(times[k + 1]);
      append_state_events(rec, grid);
      return rec;
    }
  }
  append_state_events(rec, grid);
  return rec;
}

PathRecord simulate_polys(const SystemParams& params, const SymPolyVector& e0,
                          const SimulationGrid& grid, const RngSpec& rng) {
  grid.validate();
  const int p = params.p;
  if (e0.degree() != p) throw std::invalid_argument("simulate_polys: e0 degree != p");

  PathRecord rec;
  rec.view = PathView::sympolys;
  rec.p = p;
  GaussianStream gs(rng);

  SymPolyVector e = e0;
  std::vector<double> z(static_cast<std::size_t>(p));
  const std::vector<double> times = grid_times(grid);
  constexpr double kResidualFloor = 1e-10;

  // Records the snapshot; true when the mapped particle vector reports
  // the exit (smallest particle below -tol_zero).
  auto snapshot = [&](double t) -> bool {
    RootExtraction rx = roots_from_polys(e);
    rec.times.push_back(t);
    std::vector<double> ev(e.raw().begin() + 1, e.raw().end());
    rec.states.push_back(std::move(ev));
    const bool exited = rx.roots.front() < -grid.tol_zero;
    if (rx.residual > kResidualFloor)
      rec.events.push_back({EventKind::projection_residual, t, -1, -1, rx.residual});
    rec.aux.push_back(std::move(rx.roots));
    return exited;
  };

  bool exited = snapshot(0.0);

  // Near the exit the mapped configuration sits just below zero (inside
  // the tol_zero band, so not yet an exit) and the bracket matrix is
  // indefinite by a commensurate amount. Clip that boundary dust; only
  // indefiniteness beyond the band signals a corrupted state.
  const double tol_psd = std::max(1e-9, 4.0 * grid.tol_zero);

  for (std::size_t k = 0; !exited && k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    const double sq = std::sqrt(h);
    Matrix l;
    try {
      l = psd_factor(bracket_matrix_closed(e), tol_psd);
    } catch (const std::domain_error& err) {
      rec.aborted = true;
      rec.abort_reason = std::string("bracket factorization failed at t=") +
                         std::to_string(times[k]) + ": " + err.what();
      append_state_events(rec, grid);
      return rec;
    }
    gs.fill(z);
    SymPolyVector en = e;
    for (int n = 1; n <= p; ++n) {
      double dm = 0.0;
      for (int m = 0; m < p; ++m) dm += l(n - 1, m) * z[static_cast<std::size_t>(m)];
      en.set(n, e.at(n) + dm * sq + drift_closed(e, n, params.alpha) * h);
    }
    e = en;
    bool finite = true;
    for (int n = 1; n <= p; ++n)
      if (!std::isfinite(e.at(n))) finite = false;
    if (!finite) {
      rec.aborted = true;
      rec.abort_reason = "non-finite polynomial state at t=" + std::to_string(times[k + 1]);
      append_state_events(rec, grid);
      return rec;
    }
    exited = snapshot(times[k + 1]);
  }
  append_state_events(rec, grid);
  return rec;
}

}  // namespace besq
