#pragma once

#include <muslx/basis.hpp>
#include <muslx/grid.hpp>
#include <muslx/sampling.hpp>
#include <muslx/wiener.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace muslx {

/// Declared constants of the growth and Lipschitz bounds on the mode maps.
struct NoiseConstants {
  double C1 = 0.0;
  double C2 = 0.0;
  std::function<double(const Point&)> C3;  // empty means C3 = 0
};

/// Diagonal noise: h(t, u)(e_j) = x -> h_j(t, x, u(x)) for j = 1..modes.
class NoiseModel {
 public:
  using ModeMap = std::function<double(int, double, const Point&, double)>;

  NoiseModel(int modes, ModeMap h, bool additive, std::string label = "custom");

  static NoiseModel zero(int modes = 1);
  /// h_j = a_j e_j(x).
  static NoiseModel additive(const SineBasis& basis, std::vector<double> amplitudes);
  /// h_j = a_j lambda e_j(x).
  static NoiseModel multiplicative(const SineBasis& basis, std::vector<double> amplitudes);

  int modes() const { return modes_; }
  bool is_additive() const { return additive_; }
  bool is_zero() const { return zero_; }
  const std::string& label() const { return label_; }

  double operator()(int j, double t, const Point& x, double lambda) const {
    return zero_ ? 0.0 : h_(j, t, x, lambda);
  }

  /// h^N: the first N modes only.
  NoiseModel truncated(int N) const;

 private:
  int modes_;
  ModeMap h_;
  bool additive_;
  bool zero_ = false;
  std::string label_;
};

/// sum_j h_j(t, x, u(x)) dbeta_j^step.
GridFunction apply_noise(const NoiseModel& h, const GridFunction& u, double t, const WienerDraw& draw, int step);

/// sum_{j in [first, last]} ||h_j(t, ., u)||^2_{L^2}; the defaults cover all modes.
double hs_norm_sq(const NoiseModel& h, double t, const GridFunction& u, int first = 1, int last = -1);

/// h frozen at the left end of each partition interval (t_l, t_{l+1}].
NoiseModel elementary_approximation(const NoiseModel& h, std::vector<double> partition);

struct NoiseAssumptionReport {
  bool growth_passed = true;
  double growth_excess = 0.0;  // max of sum_j h_j^2 - C1 lambda^2 - C3(x)
  std::vector<double> growth_witness;
  bool lipschitz_passed = true;
  double lipschitz_ratio = 0.0;  // max of sum_j |dh_j|^2 / |dlambda|^2 (empirical C2)
  std::vector<double> lipschitz_witness;

  bool passed() const { return growth_passed && lipschitz_passed; }
};

NoiseAssumptionReport verify_h_assumptions(const NoiseModel& h, const NoiseConstants& declared, int samples,
                                           const SampleBox& box, double lambda_max = 100.0,
                                           std::uint64_t seed = 1);

}  // namespace muslx
