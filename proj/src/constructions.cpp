#include "besq/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace besq {

namespace {

// Substream salts for independent sub-simulations.
constexpr std::uint32_t kGlueNeg = 11;
constexpr std::uint32_t kGluePos = 12;
constexpr std::uint32_t kBlockPos = 21;
constexpr std::uint32_t kBlockNeg = 22;
constexpr std::uint32_t kPinned = 31;

int require_eligible_alpha(const SystemParams& params, const char* who) {
  long long ai = 0;
  if (!eligible_integer_alpha(params, &ai) || ai < 0)
    throw std::invalid_argument(std::string(who) + ": alpha must be an integer in {0,...,p-2}");
  return static_cast<int>(ai);
}

// Recorded grid times without running a simulation.
std::vector<double> clock_times(const SimulationGrid& grid) {
  std::vector<double> t;
  const long long n = static_cast<long long>(std::floor(grid.t_end / grid.dt + 1e-9));
  for (long long k = 0; k <= n; ++k) t.push_back(static_cast<double>(k) * grid.dt);
  if (t.back() < grid.t_end - 1e-12 * grid.dt) t.push_back(grid.t_end);
  else t.back() = std::min(t.back(), grid.t_end);
  return t;
}

}  // namespace

GluePlan plan_glue(const SystemParams& params, const ParticleConfig& x0) {
  const int alpha = require_eligible_alpha(params, "plan_glue");
  if (x0.size() != params.p) throw std::invalid_argument("plan_glue: x0 size != p");
  const int p = params.p;
  const int ns = n_star(p, alpha);
  const Ranks r = ranks(x0.values());
  if (r.plus > ns || r.minus > p - ns)
    throw std::invalid_argument("plan_glue: start point has rk+ > n* or rk- > p - n*");

  GluePlan plan;
  plan.p_minus = p - ns;
  plan.alpha_minus = ns - alpha;
  plan.p_plus = ns;
  plan.alpha_plus = alpha + p - ns;
  plan.split = p - ns;
  plan.z0.resize(static_cast<std::size_t>(plan.p_minus));
  for (int i = 1; i <= plan.p_minus; ++i)
    plan.z0[static_cast<std::size_t>(i - 1)] = -x0[p - ns - i];
  plan.y0.assign(x0.values().begin() + plan.split, x0.values().end());

  for (double v : plan.z0)
    if (v < 0.0) throw std::logic_error("plan_glue: negated low block not non-negative");
  for (double v : plan.y0)
    if (v < 0.0) throw std::logic_error("plan_glue: high block not non-negative");
  return plan;
}

PathRecord simulate_glued(const GluePlan& plan, const SimulationGrid& grid, const RngSpec& rng) {
  const int p = plan.p_minus + plan.p_plus;
  const PathRecord z = simulate_particles(SystemParams(plan.p_minus, plan.alpha_minus),
                                          ParticleConfig(plan.z0), grid, rng.sub(kGlueNeg));
  const PathRecord y = simulate_particles(SystemParams(plan.p_plus, plan.alpha_plus),
                                          ParticleConfig(plan.y0), grid, rng.sub(kGluePos));

  PathRecord rec;
  rec.view = PathView::particles;
  rec.p = p;
  if (z.aborted || y.aborted) {
    rec.aborted = true;
    rec.abort_reason = z.aborted ? z.abort_reason : y.abort_reason;
    return rec;
  }

  rec.times = z.times;
  rec.states.reserve(rec.times.size());
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    std::vector<double> x(static_cast<std::size_t>(p));
    for (int i = 1; i <= plan.p_minus; ++i)
      x[static_cast<std::size_t>(plan.split - i)] = -z.states[k][static_cast<std::size_t>(i - 1)];
    for (int i = 0; i < plan.p_plus; ++i)
      x[static_cast<std::size_t>(plan.split + i)] = y.states[k][static_cast<std::size_t>(i)];

    // Across the split, (|x|+|y|)/(x-y) must be exactly -1 whenever the
    // blocks keep their signs and are not both zero.
    if (plan.split >= 1 && plan.split < p) {
      const double lo = x[static_cast<std::size_t>(plan.split - 1)];
      const double hi = x[static_cast<std::size_t>(plan.split)];
      if (lo <= 0.0 && hi >= 0.0 && (lo != 0.0 || hi != 0.0) &&
          (std::abs(lo) + std::abs(hi)) / (lo - hi) != -1.0) {
        rec.aborted = true;
        rec.abort_reason =
            "mixed-sign drift ratio check failed at t=" + std::to_string(rec.times[k]);
        return rec;
      }
    }
    rec.states.push_back(std::move(x));
  }
  append_state_events(rec, grid);
  return rec;
}

ZeroBlockPlan plan_zero_block(const SystemParams& params, const ParticleConfig& x0) {
  const int alpha = require_eligible_alpha(params, "plan_zero_block");
  if (x0.size() != params.p) throw std::invalid_argument("plan_zero_block: x0 size != p");
  const int p = params.p;
  if (classify_strong_uniqueness(params, x0))
    throw std::invalid_argument("plan_zero_block: strong uniqueness holds for this start point");

  const int ns = n_star(p, alpha);
  const Ranks r = ranks(x0.values());

  // n = alpha + l pins n to l, so the largest feasible l gives the
  // smallest zero block and the tie-break on n never fires.
  ZeroBlockPlan best;
  bool found = false;
  for (int l = 0; l < p - ns; ++l) {
    const int n = alpha + l;
    if (n >= ns) break;
    const int m = p - n - l;
    if (m < 1) break;
    if (r.plus > n || r.minus > l) continue;
    best.n_pos = n;
    best.l_neg = l;
    best.m_zero = m;
    best.alpha_plus = alpha + p - n;
    best.alpha_minus = p - alpha - l;
    found = true;
  }
  if (!found)
    throw std::invalid_argument("plan_zero_block: no zero-block plan is compatible with x0");

  best.z0.assign(x0.values().end() - best.n_pos, x0.values().end());
  best.y0.resize(static_cast<std::size_t>(best.l_neg));
  for (int i = 1; i <= best.l_neg; ++i)
    best.y0[static_cast<std::size_t>(i - 1)] = -x0[best.l_neg - i];
  return best;
}

PathRecord build_non_unique(const SystemParams& params, const ParticleConfig& x0,
                            const SimulationGrid& grid, const RngSpec& rng) {
  grid.validate();
  const ZeroBlockPlan plan = plan_zero_block(params, x0);
  const int p = params.p;

  PathRecord z;
  if (plan.n_pos > 0)
    z = simulate_particles(SystemParams(plan.n_pos, plan.alpha_plus), ParticleConfig(plan.z0),
                           grid, rng.sub(kBlockPos));
  PathRecord y;
  if (plan.l_neg > 0)
    y = simulate_particles(SystemParams(plan.l_neg, plan.alpha_minus), ParticleConfig(plan.y0),
                           grid, rng.sub(kBlockNeg));

  PathRecord rec;
  rec.view = PathView::particles;
  rec.p = p;
  if (z.aborted || y.aborted) {
    rec.aborted = true;
    rec.abort_reason = z.aborted ? z.abort_reason : y.abort_reason;
    return rec;
  }

  rec.times = plan.n_pos > 0 ? z.times : (plan.l_neg > 0 ? y.times : clock_times(grid));
  rec.states.reserve(rec.times.size());
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    std::vector<double> x(static_cast<std::size_t>(p), 0.0);
    for (int i = 1; i <= plan.l_neg; ++i)
      x[static_cast<std::size_t>(plan.l_neg - i)] = -y.states[k][static_cast<std::size_t>(i - 1)];
    for (int i = 0; i < plan.n_pos; ++i)
      x[static_cast<std::size_t>(p - plan.n_pos + i)] = z.states[k][static_cast<std::size_t>(i)];
    std::sort(x.begin(), x.end());
    rec.states.push_back(std::move(x));
  }
  append_state_events(rec, grid);
  return rec;
}

PathRecord build_pinned_nonnegative(const SystemParams& params, const ParticleConfig& x0,
                                    const SimulationGrid& grid, const RngSpec& rng) {
  grid.validate();
  const int alpha = require_eligible_alpha(params, "build_pinned_nonnegative");
  if (x0.size() != params.p) throw std::invalid_argument("build_pinned_nonnegative: x0 size != p");
  if (x0[0] < 0.0)
    throw std::invalid_argument("build_pinned_nonnegative: x0 must be non-negative");
  const int p = params.p;
  if (ranks(x0.values()).nonzero > alpha)
    throw std::invalid_argument("build_pinned_nonnegative: rk(x0) exceeds alpha");

  PathRecord sub;
  if (alpha > 0) {
    std::vector<double> top(x0.values().end() - alpha, x0.values().end());
    sub = simulate_particles(SystemParams(alpha, static_cast<double>(p)), ParticleConfig(top),
                             grid, rng.sub(kPinned));
    if (sub.aborted) {
      PathRecord rec;
      rec.view = PathView::particles;
      rec.p = p;
      rec.aborted = true;
      rec.abort_reason = sub.abort_reason;
      return rec;
    }
  }

  PathRecord rec;
  rec.view = PathView::particles;
  rec.p = p;
  rec.times = alpha > 0 ? sub.times : clock_times(grid);
  rec.states.reserve(rec.times.size());
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    std::vector<double> x(static_cast<std::size_t>(p), 0.0);
    for (int i = 0; i < alpha; ++i)
      x[static_cast<std::size_t>(p - alpha + i)] = sub.states[k][static_cast<std::size_t>(i)];
    std::sort(x.begin(), x.end());
    rec.states.push_back(std::move(x));
  }
  append_state_events(rec, grid);
  return rec;
}

}  // namespace besq
