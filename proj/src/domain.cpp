#include "besq/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace besq {

SystemParams::SystemParams(int p_, double alpha_) : p(p_), alpha(alpha_) {
  if (p < 1) throw std::invalid_argument("SystemParams: p must be >= 1");
  if (!std::isfinite(alpha)) throw std::invalid_argument("SystemParams: alpha must be finite");
}

ParticleConfig::ParticleConfig(std::vector<double> x) : x_(std::move(x)) {
  if (x_.empty()) throw std::invalid_argument("ParticleConfig: empty configuration");
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    if (!(x_[i] <= x_[i + 1]))
      throw std::invalid_argument("ParticleConfig: entries must be weakly increasing");
  }
  for (double v : x_) {
    if (!std::isfinite(v)) throw std::invalid_argument("ParticleConfig: non-finite entry");
  }
}

ParticleConfig ParticleConfig::reflected() const {
  std::vector<double> r(x_.rbegin(), x_.rend());
  for (double& v : r) v = -v;
  return ParticleConfig(std::move(r));
}

Ranks ranks(std::span<const double> x) {
  Ranks r;
  for (double v : x) {
    if (v > 0.0) ++r.plus;
    if (v < 0.0) ++r.minus;
  }
  r.nonzero = r.plus + r.minus;
  return r;
}

int n_star(int p, int alpha) {
  if (p < 1) throw std::invalid_argument("n_star: p must be >= 1");
  if (alpha < 0 || alpha > p - 2)
    throw std::domain_error("n_star: alpha must lie in {0, ..., p-2}");
  // The unique n with 2n in {p+alpha, p+alpha+1}.
  return (p + alpha + 1) / 2;
}

bool eligible_integer_alpha(const SystemParams& params, long long* out) {
  const double a = params.alpha;
  if (std::rint(a) != a) return false;
  if (std::abs(a) > static_cast<double>(params.p) - 2.0) return false;
  if (out) *out = static_cast<long long>(std::llrint(a));
  return true;
}

namespace {

bool rank_test(int p, int alpha, const Ranks& r) {
  const int ns = n_star(p, alpha);
  return r.plus > ns || r.minus > p - ns;
}

}  // namespace

bool classify_strong_uniqueness(const SystemParams& params, const ParticleConfig& x) {
  long long ai = 0;
  if (!eligible_integer_alpha(params, &ai)) return true;
  if (ai < 0) {
    // Reduce to alpha >= 0 by the reflection (alpha, x) -> (-alpha, -x reversed).
    return classify_strong_uniqueness(SystemParams(params.p, -params.alpha), x.reflected());
  }
  const Ranks r = ranks(x.values());
  if (ai == 0) {
    // alpha = 0 is a fixed point of the reflection, but for odd p the rank
    // test is orientation-dependent (n* != p - n*). The system itself is
    // reflection-symmetric, so uniqueness holds when either orientation
    // certifies it.
    const Ranks mirrored{r.minus, r.plus, r.nonzero};
    return rank_test(params.p, 0, r) || rank_test(params.p, 0, mirrored);
  }
  return rank_test(params.p, static_cast<int>(ai), r);
}

bool classify_nonnegative_solution(const SystemParams& params, const ParticleConfig& x) {
  if (x[0] < 0.0)
    throw std::invalid_argument("classify_nonnegative_solution: x_1 must be >= 0");
  if (params.alpha >= static_cast<double>(params.p) - 1.0) return true;
  long long ai = 0;
  if (eligible_integer_alpha(params, &ai) && ai >= 0)
    return ranks(x.values()).nonzero <= ai;
  return false;
}

StructurePrediction structure_prediction(const SystemParams& params) {
  const double a = params.alpha;
  const double p = static_cast<double>(params.p);
  if (a >= p + 1.0)
    throw std::domain_error("structure_prediction: requires alpha < p+1");
  StructurePrediction s;
  s.n = static_cast<int>(std::ceil((p + 1.0 - a) / 2.0));
  s.hits_zero.resize(params.p);
  s.goes_negative.resize(params.p);
  for (int i = 1; i <= params.p; ++i) {
    s.hits_zero[i - 1] = (p + 3.0 - a > 2.0 * i) ? 1 : 0;
    s.goes_negative[i - 1] = (p + 1.0 - a > 2.0 * i) ? 1 : 0;
  }
  return s;
}

ClassificationReport classify(const SystemParams& params, const ParticleConfig& x) {
  ClassificationReport rep;
  rep.rk = ranks(x.values());
  rep.unique_strong = classify_strong_uniqueness(params, x);
  long long ai = 0;
  if (eligible_integer_alpha(params, &ai)) {
    rep.alpha_reflected = ai < 0;
    rep.n_star = n_star(params.p, static_cast<int>(ai < 0 ? -ai : ai));
  }
  rep.nonneg_exists = x[0] >= 0.0 && classify_nonnegative_solution(params, x);
  if (params.alpha < static_cast<double>(params.p) + 1.0) {
    StructurePrediction s = structure_prediction(params);
    rep.structure_n = s.n;
    rep.hits_zero = std::move(s.hits_zero);
    rep.goes_negative = std::move(s.goes_negative);
  } else {
    rep.structure_n = 0;
    rep.hits_zero.assign(static_cast<std::size_t>(params.p), 0);
    rep.goes_negative.assign(static_cast<std::size_t>(params.p), 0);
  }
  return rep;
}

}  // namespace besq
