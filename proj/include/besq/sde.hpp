#ifndef BESQ_SDE_HPP
#define BESQ_SDE_HPP

#include <span>
#include <string>
#include <vector>

#include "besq/domain.hpp"
#include "besq/linalg.hpp"
#include "besq/rng.hpp"
#include "besq/sympoly.hpp"

namespace besq {

struct SimulationGrid {
  double t_end = 1.0;
  double dt = 1e-3;
  int substep_cap = 1048576;  // max subdivisions per base step (power-of-two halving)
  double tol_coll = 1e-12;  // collision proximity tolerance
  double tol_zero = 1e-2;   // zero-hit tolerance

  void validate() const;
};

enum class PathView { particles, sympolys, eigenvalues };

enum class EventKind {
  hit_zero,             // first time x_i <= tol_zero (per particle)
  went_negative,        // first time x_i < -tol_zero (per particle)
  collision,            // |x_i - x_j| <= tol_coll at a recorded time (per pair)
  projection_residual,  // polynomial state off the real-rooted manifold
  substep_floor,        // substep cap exhausted; continued at floor step
};

const char* event_kind_name(EventKind k);

struct Event {
  EventKind kind;
  double time = 0.0;
  int i = -1;  // 1-based particle index
  int j = -1;
  double value = 0.0;
};

struct PathRecord {
  PathView view = PathView::particles;
  int p = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  // Secondary per-time view: flattened matrix for the Wishart path,
  // mapped particle vector for the polynomial path.
  std::vector<std::vector<double>> aux;
  std::vector<Event> events;
  bool aborted = false;
  std::string abort_reason;

  bool has_event(EventKind kind, int i = -1) const;
};

// One explicit Euler-Maruyama step of the particle system. `noise` holds
// p standard normals; the pairwise drift term is dropped for pairs within
// tol_coll. The result is re-sorted ascending.
std::vector<double> step_particles(std::span<const double> x, const SystemParams& params,
                                   double dt, std::span<const double> noise,
                                   double tol_coll = 1e-12);

// Particle-system path on the base grid with adaptive substepping near
// collisions: when the smallest active gap g has g^2 < dt (p(1+|alpha|))^2,
// the base step is halved until the local step is at most g^2/(p(1+|alpha|))^2
// or the substep cap is reached.
PathRecord simulate_particles(const SystemParams& params, const ParticleConfig& x0,
                              const SimulationGrid& grid, const RngSpec& rng);

// Matrix path dY = sqrt|Y| dW + dW^T sqrt|Y| + alpha I dt. Snapshots store
// the ordered eigenvalues; aux stores the row-major matrix entries.
PathRecord simulate_wishart(const SystemParams& params, const SymMatrix& y0,
                            const SimulationGrid& grid, const RngSpec& rng);

// Symmetric-polynomial path with correlated noise from the closed-form
// bracket matrix. Integration stops at the first step where the mapped
// particle vector goes below -tol_zero. Snapshots store (e_1..e_p); aux
// stores the mapped particles.
PathRecord simulate_polys(const SystemParams& params, const SymPolyVector& e0,
                          const SimulationGrid& grid, const RngSpec& rng);

// Scans the recorded particle-view snapshots (states, or aux for the
// polynomial view) and appends first-occurrence hit_zero, went_negative
// and collision events. Used by the simulators and by assembled paths.
void append_state_events(PathRecord& rec, const SimulationGrid& grid);

}  // namespace besq

#endif  // BESQ_SDE_HPP
