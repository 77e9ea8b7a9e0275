#ifndef BESQ_CONSTRUCTIONS_HPP
#define BESQ_CONSTRUCTIONS_HPP

#include <vector>

#include "besq/domain.hpp"
#include "besq/sde.hpp"

namespace besq {

// Split of the system at p - n* into an independent negated non-negative
// subsystem (size p_minus, dimension alpha_minus = n* - alpha) and a
// non-negative subsystem (size p_plus = n*, dimension alpha_plus =
// alpha + p - n*). Guarantees alpha_minus >= p_minus and
// alpha_plus >= p_plus - 1.
struct GluePlan {
  int p_minus = 0;
  int alpha_minus = 0;
  int p_plus = 0;
  int alpha_plus = 0;
  int split = 0;           // = p_minus
  std::vector<double> z0;  // negated, reversed low block; non-negative
  std::vector<double> y0;  // high block; non-negative
};

// Requires integer alpha in {0,...,p-2}, rk+(x0) <= n*, rk-(x0) <= p - n*.
GluePlan plan_glue(const SystemParams& params, const ParticleConfig& x0);

// Runs the two subsystems on independent streams and assembles
// X = (-Z reversed, Y). Verifies the mixed-sign drift ratio
// (|x|+|y|)/(x-y) = -1 across the split along the path.
PathRecord simulate_glued(const GluePlan& plan, const SimulationGrid& grid,
                          const RngSpec& rng);

// Non-unique solution block structure: n_pos positive particles with
// dimension alpha_plus = alpha + p - n, m_zero particles pinned at zero
// (their assembled drift alpha + l - n vanishes), l_neg negated particles
// with dimension alpha_minus = p - alpha - l.
struct ZeroBlockPlan {
  int n_pos = 0;
  int l_neg = 0;
  int m_zero = 0;
  int alpha_plus = 0;
  int alpha_minus = 0;
  std::vector<double> z0;  // top block start, non-negative
  std::vector<double> y0;  // negated bottom block start, non-negative
};

// Smallest zero block with m >= 1 among plans n = alpha + l, n < n*,
// l < p - n* compatible with the start point (rk+ <= n, rk- <= l).
// Throws when strong uniqueness holds or no compatible plan exists.
ZeroBlockPlan plan_zero_block(const SystemParams& params, const ParticleConfig& x0);

// Path witnessing non-uniqueness: the zero block is exactly 0 at every
// time while the outer blocks run as independent subsystems.
PathRecord build_non_unique(const SystemParams& params, const ParticleConfig& x0,
                            const SimulationGrid& grid, const RngSpec& rng);

// Non-negative solution for integer alpha in {0,...,p-2} with
// rk(x0) <= alpha: the first p - alpha particles stay at zero and the
// remaining alpha particles run as a system of size alpha with
// dimension p.
PathRecord build_pinned_nonnegative(const SystemParams& params, const ParticleConfig& x0,
                                    const SimulationGrid& grid, const RngSpec& rng);

}  // namespace besq

#endif  // BESQ_CONSTRUCTIONS_HPP
