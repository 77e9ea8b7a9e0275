#ifndef BESQ_RNG_HPP
#define BESQ_RNG_HPP

#include <cstdint>
#include <span>

namespace besq {

// Identifies one reproducible noise stream. Identical specs produce
// bit-identical Gaussian sequences regardless of thread schedule.
// zero_noise swaps in the all-zeros diagnostic stream.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;
  std::uint32_t component = 0;
  bool zero_noise = false;

  RngSpec with_replicate(std::uint32_t r) const {
    RngSpec s = *this;
    s.replicate = r;
    return s;
  }
  // Derived substream for an internal sub-simulation.
  RngSpec sub(std::uint32_t salt) const {
    RngSpec s = *this;
    s.component = s.component * 1000003u + salt;
    return s;
  }
};

// Counter-based splittable generator (SplitMix64 core with a per-stream
// increment), standard normals via Box-Muller.
class GaussianStream {
 public:
  explicit GaussianStream(const RngSpec& spec);

  double next();
  void fill(std::span<double> out);

  std::uint64_t next_u64();
  double next_uniform();  // in (0, 1)

 private:
  std::uint64_t state_;
  std::uint64_t gamma_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  bool zero_ = false;
};

}  // namespace besq

#endif  // BESQ_RNG_HPP
