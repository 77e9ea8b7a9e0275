#include "besq/rng.hpp"

#include <cmath>
#include <numbers>

namespace besq {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t derive_key(const RngSpec& spec) {
  std::uint64_t h = mix64(spec.seed + kGolden);
  h = mix64(h ^ (static_cast<std::uint64_t>(spec.replicate) * 0xD6E8FEB86659FD93ull + kGolden));
  h = mix64(h ^ (static_cast<std::uint64_t>(spec.component) * 0xA5A5A5A5A5A5A5A5ull + 0x2545F4914F6CDD1Dull));
  return h;
}

}  // namespace

GaussianStream::GaussianStream(const RngSpec& spec) : zero_(spec.zero_noise) {
  const std::uint64_t key = derive_key(spec);
  state_ = mix64(key + 1);
  gamma_ = mix64(key + 2) | 1ull;  // odd increment: a distinct full-period sequence per stream
}

std::uint64_t GaussianStream::next_u64() {
  state_ += gamma_;
  return mix64(state_);
}

double GaussianStream::next_uniform() {
  // (0, 1): 53-bit mantissa shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (zero_) return 0.0;
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void GaussianStream::fill(std::span<double> out) {
  for (double& v : out) v = next();
}

}  // namespace besq
