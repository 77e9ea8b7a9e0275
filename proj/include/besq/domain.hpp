#ifndef BESQ_DOMAIN_HPP
#define BESQ_DOMAIN_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace besq {

// Parameters of the squared Bessel particle system: p particles with
// drift dimension alpha (any real sign).
struct SystemParams {
  int p;
  double alpha;

  SystemParams(int p_, double alpha_);
};

// Weakly increasing particle configuration x_1 <= ... <= x_p.
class ParticleConfig {
 public:
  explicit ParticleConfig(std::vector<double> x);

  int size() const { return static_cast<int>(x_.size()); }
  double operator[](int i) const { return x_[static_cast<std::size_t>(i)]; }
  std::span<const double> values() const { return x_; }

  // (-x_p, ..., -x_1): the order-preserving sign flip.
  ParticleConfig reflected() const;

 private:
  std::vector<double> x_;
};

// Counts of strictly positive / strictly negative / nonzero entries.
// Comparisons are exact; inputs are exact initial conditions.
struct Ranks {
  int plus = 0;
  int minus = 0;
  int nonzero = 0;
};

Ranks ranks(std::span<const double> x);

// The unique integer n* with 2 n* in {p+alpha, p+alpha+1}.
// Defined for integer alpha in {0, ..., p-2}; throws otherwise.
int n_star(int p, int alpha);

// True iff alpha is an exact integer with |alpha| <= p-2. Returns the
// integer value through out when non-null.
bool eligible_integer_alpha(const SystemParams& params, long long* out = nullptr);

// Strong uniqueness: |alpha| outside {0,...,p-2}, or rk+(x) > n* or
// rk-(x) > p - n*. Negative integer alpha is resolved by the reflection
// (alpha, x) -> (-alpha, reflected x).
bool classify_strong_uniqueness(const SystemParams& params, const ParticleConfig& x);

// Existence of a unique strong non-negative solution: alpha >= p-1, or
// integer alpha in {0,...,p-2} with rk(x) <= alpha. Requires x_1 >= 0.
bool classify_nonnegative_solution(const SystemParams& params, const ParticleConfig& x);

// Sign structure of the non-colliding system started from a non-negative
// point, for alpha < p+1: particle i hits zero iff p+3-alpha > 2i and
// visits the negative half-line iff p+1-alpha > 2i; n = ceil((p+1-alpha)/2).
struct StructurePrediction {
  int n = 0;
  std::vector<std::uint8_t> hits_zero;
  std::vector<std::uint8_t> goes_negative;
};

StructurePrediction structure_prediction(const SystemParams& params);

struct ClassificationReport {
  int n_star = -1;  // -1 when |alpha| is not an eligible integer
  Ranks rk;
  bool unique_strong = false;
  bool nonneg_exists = false;
  int structure_n = 0;  // 0 when alpha >= p+1
  std::vector<std::uint8_t> hits_zero;
  std::vector<std::uint8_t> goes_negative;
  // Set when negative integer alpha was classified through the reflection;
  // the reported n_star belongs to the reflected instance.
  bool alpha_reflected = false;
};

ClassificationReport classify(const SystemParams& params, const ParticleConfig& x);

}  // namespace besq

#endif  // BESQ_DOMAIN_HPP
