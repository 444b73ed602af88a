#include <muslx/modular.hpp>

#include <muslx/error.hpp>

#include <cmath>
#include <limits>

namespace muslx {

namespace {

double modular_scaled(const NFunction& M, const SampledField& f, double inv_lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += f.weight[i] * M(f.t[i], f.x[i], inv_lambda * f.magnitude(i));
  }
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

}  // namespace

double modular(const NFunction& M, const SampledField& f) {
  const double v = modular_scaled(M, f, 1.0);
  if (!std::isfinite(v)) throw Error(ErrorCode::modular_overflow, "modular of " + M.label() + " is not finite");
  return v;
}

double luxemburg_norm(const NFunction& M, const SampledField& f) {
  bool nonzero = false;
  for (std::size_t i = 0; i < f.size() && !nonzero; ++i) nonzero = f.magnitude(i) != 0.0;
  if (!nonzero) return 0.0;

  double lo = 1e-12;
  double hi = 1e12;
  if (modular_scaled(M, f, 1.0 / hi) > 1.0) {
    hi = 1e24;
    if (modular_scaled(M, f, 1.0 / hi) > 1.0) {
      throw Error(ErrorCode::norm_not_found, "no finite lambda below 1e24 brings the modular under 1");
    }
  }
  if (modular_scaled(M, f, 1.0 / lo) <= 1.0) {
    lo = 1e-24;
    if (modular_scaled(M, f, 1.0 / lo) <= 1.0) return lo;
  }
  // invariant: modular(f/lo) > 1 >= modular(f/hi)
  while (hi / lo - 1.0 > 1e-10) {
    const double mid = std::sqrt(lo * hi);
    if (modular_scaled(M, f, 1.0 / mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double holder_defect(const NFunction& M, const NFunction& Mstar, const SampledField& f,
                     const SampledField& g) {
  if (f.size() != g.size()) throw Error(ErrorCode::shape_mismatch, "Holder pairing needs matching samples");
  double pairing = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) pairing += f.weight[i] * f.value[i][0] * g.value[i][0];
  return 2.0 * luxemburg_norm(M, f) * luxemburg_norm(Mstar, g) - pairing;
}

}  // namespace muslx
