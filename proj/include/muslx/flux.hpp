#pragma once

#include <muslx/conjugate.hpp>
#include <muslx/exponent.hpp>
#include <muslx/sampling.hpp>
#include <muslx/types.hpp>
#include <muslx/young.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace muslx {

using SpaceTimeScalar = std::function<double(double, const Point&)>;

/// Monotone operator A(t, x, xi) with its xi-Jacobian and, when it is a
/// gradient, the potential Phi with grad_xi Phi = A.
struct Flux {
  using VectorMap = std::function<Vec2(double, const Point&, const Vec2&)>;
  using MatrixMap = std::function<Mat2(double, const Point&, const Vec2&)>;
  using ScalarMap = std::function<double(double, const Point&, const Vec2&)>;

  std::string label;
  VectorMap eval;
  MatrixMap jacobian;
  ScalarMap potential;  // empty when A has no potential
  /// Times at which A jumps in t; a time grid must step onto each of them.
  std::vector<double> breakpoints;

  bool has_potential() const { return static_cast<bool>(potential); }
  Vec2 operator()(double t, const Point& x, const Vec2& xi) const { return eval(t, x, xi); }
};

/// (delta^2 + |xi|^2)^{(p-2)/2} xi with A(t, x, 0) = 0 when delta = 0.
Flux plaplace_flux(const ExponentField& p, double delta = 0.0, double lo = 0.0, double hi = 1.0, int dim = 2);
/// |xi|^{p-2} xi + a(t,x) |xi|^{q-2} xi.
Flux double_phase_flux(double p, double q, SpaceTimeScalar a);
/// A = xi.
Flux linear_flux();
/// A + eps m'(|xi|) xi / |xi|.
Flux regularize(const Flux& A, double eps, const YoungFunction& m);

struct SampledWorst {
  double value = 0.0;
  double t = 0.0;
  Point x{};
  Vec2 xi{};
  Vec2 xi2{};
};

struct CoercivityReport {
  bool passed = true;
  /// max of M + M*(A) - (c A.xi + g); <= 1e-9 required.
  SampledWorst worst_margin;
  /// max |M + M*(A) - c A.xi - g|, useful when the bound is an identity.
  double max_abs_gap = 0.0;
  int samples = 0;
};

CoercivityReport verify_coercivity(const Flux& A, const NFunction& M, const DualFunction& Mstar, double c,
                                   const SpaceTimeScalar& g, int samples, const SampleBox& box,
                                   std::uint64_t seed = 1);

struct MonotonicityReport {
  bool passed = true;
  SampledWorst minimum;  // smallest (A(xi1) - A(xi2)).(xi1 - xi2) over pairs xi1 != xi2
  int samples = 0;
};

MonotonicityReport verify_monotonicity(const Flux& A, int samples, const SampleBox& box, std::uint64_t seed = 1);

/// Empirical sup of |A| over |xi| <= K; half of the samples sit on |xi| = K.
double bounded_flux_bound(const Flux& A, double K, int samples, const SampleBox& box, std::uint64_t seed = 1);

}  // namespace muslx
