#include <muslx/flux.hpp>

#include <muslx/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace muslx {

namespace {

// floor on |xi|^2 where a Jacobian would otherwise blow up (exponents below 2)
constexpr double kTinySq = 1e-24;

}  // namespace

Flux plaplace_flux(const ExponentField& p, double delta, double lo, double hi, int dim) {
  if (!(p.min_over(lo, hi, dim) > 1.0)) throw Error(ErrorCode::invalid_argument, "p-Laplacian exponent must exceed 1");
  if (delta < 0.0) throw Error(ErrorCode::invalid_argument, "regularization delta must be >= 0");
  const double d2 = delta * delta;
  Flux f;
  f.label = "plaplace";
  f.breakpoints = p.breakpoints();
  f.eval = [p, d2](double t, const Point& x, const Vec2& xi) -> Vec2 {
    const double r2 = dot(xi, xi) + d2;
    if (r2 == 0.0) return {0.0, 0.0};
    const double e = p(t, x);
    return std::pow(r2, 0.5 * (e - 2.0)) * xi;
  };
  f.jacobian = [p, d2](double t, const Point& x, const Vec2& xi) -> Mat2 {
    const double e = p(t, x);
    double r2 = dot(xi, xi) + d2;
    if (e == 2.0) return scaled_identity(1.0);
    if (r2 == 0.0 && e > 2.0) return scaled_identity(0.0);
    r2 = std::max(r2, kTinySq);
    const double phi = std::pow(r2, 0.5 * (e - 2.0));
    return scaled_identity(phi) + outer((e - 2.0) * phi / r2, xi);
  };
  f.potential = [p, d2](double t, const Point& x, const Vec2& xi) {
    const double e = p(t, x);
    return std::pow(dot(xi, xi) + d2, 0.5 * e) / e;
  };
  return f;
}

Flux double_phase_flux(double p, double q, SpaceTimeScalar a) {
  if (!(p > 1.0)) throw Error(ErrorCode::invalid_argument, "double phase needs p > 1");
  if (q < p) throw Error(ErrorCode::invalid_argument, "double phase needs q >= p");
  Flux f;
  f.label = "double_phase";
  f.eval = [p, q, a](double t, const Point& x, const Vec2& xi) -> Vec2 {
    const double r2 = dot(xi, xi);
    if (r2 == 0.0) return {0.0, 0.0};
    return (std::pow(r2, 0.5 * (p - 2.0)) + a(t, x) * std::pow(r2, 0.5 * (q - 2.0))) * xi;
  };
  f.jacobian = [p, q, a](double t, const Point& x, const Vec2& xi) -> Mat2 {
    const double r2 = std::max(dot(xi, xi), kTinySq);
    const double w = a(t, x);
    auto part = [&](double e, double scale) -> Mat2 {
      if (scale == 0.0) return scaled_identity(0.0);
      if (e == 2.0) return scaled_identity(scale);
      const double phi = std::pow(r2, 0.5 * (e - 2.0));
      return scaled_identity(scale * phi) + outer(scale * (e - 2.0) * phi / r2, xi);
    };
    return part(p, 1.0) + part(q, w);
  };
  f.potential = [p, q, a](double t, const Point& x, const Vec2& xi) {
    const double r = norm(xi);
    return std::pow(r, p) / p + a(t, x) * std::pow(r, q) / q;
  };
  return f;
}

Flux linear_flux() {
  Flux f;
  f.label = "linear";
  f.eval = [](double, const Point&, const Vec2& xi) { return xi; };
  f.jacobian = [](double, const Point&, const Vec2&) { return scaled_identity(1.0); };
  f.potential = [](double, const Point&, const Vec2& xi) { return 0.5 * dot(xi, xi); };
  return f;
}

Flux regularize(const Flux& A, double eps, const YoungFunction& m) {
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "regularization needs eps > 0");
  Flux f;
  std::ostringstream os;
  os << A.label << "+" << eps << "*grad " << m.label();
  f.label = os.str();
  f.breakpoints = A.breakpoints;
  f.eval = [A, eps, m](double t, const Point& x, const Vec2& xi) -> Vec2 {
    const Vec2 base = A.eval(t, x, xi);
    const double r = norm(xi);
    if (r == 0.0) return base;
    return base + (eps * m.deriv(r) / r) * xi;
  };
  f.jacobian = [A, eps, m](double t, const Point& x, const Vec2& xi) -> Mat2 {
    const Mat2 base = A.jacobian(t, x, xi);
    const double r = std::max(norm(xi), 1e-12);
    // eps [ m''(r) n n^T + m'(r)/r (I - n n^T) ] with n = xi / r
    const double radial = m.second_deriv(r);
    const double tangential = m.deriv(r) / r;
    const double inv_r2 = 1.0 / (r * r);
    return base + scaled_identity(eps * tangential) + outer(eps * (radial - tangential) * inv_r2, xi);
  };
  if (A.has_potential()) {
    f.potential = [A, eps, m](double t, const Point& x, const Vec2& xi) {
      return A.potential(t, x, xi) + eps * m(norm(xi));
    };
  }
  return f;
}

CoercivityReport verify_coercivity(const Flux& A, const NFunction& M, const DualFunction& Mstar, double c,
                                   const SpaceTimeScalar& g, int samples, const SampleBox& box,
                                   std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1");
  BoxSampler rng(box, seed);
  CoercivityReport rep;
  rep.samples = samples;
  rep.worst_margin.value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = rng.time();
    const Point x = rng.point();
    const Vec2 xi = rng.xi();
    const Vec2 a = A(t, x, xi);
    const double lhs = M(t, x, norm(xi)) + Mstar(t, x, norm(a));
    const double rhs = c * dot(a, xi) + g(t, x);
    const double margin = lhs - rhs;
    rep.max_abs_gap = std::max(rep.max_abs_gap, std::abs(margin));
    if (margin > rep.worst_margin.value) rep.worst_margin = {margin, t, x, xi, {}};
  }
  rep.passed = rep.worst_margin.value <= 1e-9;
  return rep;
}

MonotonicityReport verify_monotonicity(const Flux& A, int samples, const SampleBox& box, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1");
  BoxSampler rng(box, seed);
  MonotonicityReport rep;
  rep.samples = samples;
  rep.minimum.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = rng.time();
    const Point x = rng.point();
    const Vec2 a = rng.xi();
    const Vec2 b = rng.xi();
    if (a == b) continue;
    const double prod = dot(A(t, x, a) - A(t, x, b), a - b);
    if (prod < rep.minimum.value) rep.minimum = {prod, t, x, a, b};
  }
  rep.passed = rep.minimum.value > 0.0;
  return rep;
}

double bounded_flux_bound(const Flux& A, double K, int samples, const SampleBox& box, std::uint64_t seed) {
  if (K < 0.0) throw Error(ErrorCode::invalid_argument, "K must be >= 0");
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1");
  BoxSampler rng(box, seed);
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = rng.time();
    const Point x = rng.point();
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double r = K;
    if (i % 2 == 1) r = K * rng.uniform(0.0, 1.0);
    Vec2 xi = box.dim == 2 ? Vec2{r * std::cos(angle), r * std::sin(angle)}
                           : Vec2{angle < std::numbers::pi ? r : -r, 0.0};
    sup = std::max(sup, norm(A(t, x, xi)));
  }
  return sup;
}

}  // namespace muslx
