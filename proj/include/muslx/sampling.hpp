#pragma once

#include <muslx/types.hpp>

#include <cstdint>
#include <random>

namespace muslx {

/// Region of (t, x, xi)-space that the sampled assumption checks draw from.
struct SampleBox {
  double horizon = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  int dim = 2;
  double radius = 1.0;  // xi is drawn from [-radius, radius]^dim
};

/// Deterministic sampler shared by the assumption checks.
class BoxSampler {
 public:
  BoxSampler(const SampleBox& box, std::uint64_t seed) : box_(box), rng_(seed) {}

  double time() { return std::uniform_real_distribution<double>(0.0, box_.horizon)(rng_); }
  Point point() {
    std::uniform_real_distribution<double> u(box_.lo, box_.hi);
    const double x = u(rng_);
    return {x, box_.dim == 2 ? u(rng_) : 0.0};
  }
  Vec2 xi() {
    std::uniform_real_distribution<double> u(-box_.radius, box_.radius);
    const double a = u(rng_);
    return {a, box_.dim == 2 ? u(rng_) : 0.0};
  }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  /// Log-uniform on [a, b], a > 0.
  double log_uniform(double a, double b) {
    return std::exp(uniform(std::log(a), std::log(b)));
  }

 private:
  SampleBox box_;
  std::mt19937_64 rng_;
};

}  // namespace muslx
