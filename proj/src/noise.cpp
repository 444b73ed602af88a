#include <muslx/noise.hpp>

#include <muslx/error.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace muslx {

NoiseModel::NoiseModel(int modes, ModeMap h, bool additive, std::string label)
    : modes_(modes), h_(std::move(h)), additive_(additive), label_(std::move(label)) {
  if (modes < 0) throw Error(ErrorCode::invalid_argument, "negative noise mode count");
  if (!h_) zero_ = true;
}

NoiseModel NoiseModel::zero(int modes) {
  NoiseModel n(modes, {}, true, "zero");
  return n;
}

NoiseModel NoiseModel::additive(const SineBasis& basis, std::vector<double> amplitudes) {
  if (static_cast<int>(amplitudes.size()) > basis.modes()) {
    throw Error(ErrorCode::mode_mismatch, "more amplitudes than basis modes");
  }
  const int n = static_cast<int>(amplitudes.size());
  if (std::all_of(amplitudes.begin(), amplitudes.end(), [](double a) { return a == 0.0; })) return zero(n);
  return NoiseModel(
      n, [basis, a = std::move(amplitudes)](int j, double, const Point& x, double) {
        return a[static_cast<std::size_t>(j - 1)] * basis(j, x);
      },
      true, "additive");
}

NoiseModel NoiseModel::multiplicative(const SineBasis& basis, std::vector<double> amplitudes) {
  if (static_cast<int>(amplitudes.size()) > basis.modes()) {
    throw Error(ErrorCode::mode_mismatch, "more amplitudes than basis modes");
  }
  const int n = static_cast<int>(amplitudes.size());
  if (std::all_of(amplitudes.begin(), amplitudes.end(), [](double a) { return a == 0.0; })) return zero(n);
  return NoiseModel(
      n, [basis, a = std::move(amplitudes)](int j, double, const Point& x, double lambda) {
        return a[static_cast<std::size_t>(j - 1)] * lambda * basis(j, x);
      },
      false, "multiplicative");
}

NoiseModel NoiseModel::truncated(int N) const {
  if (N < 0 || N > modes_) {
    throw Error(ErrorCode::mode_mismatch, "cannot truncate " + std::to_string(modes_) + " modes to " + std::to_string(N));
  }
  NoiseModel out = *this;
  out.modes_ = N;
  return out;
}

GridFunction apply_noise(const NoiseModel& h, const GridFunction& u, double t, const WienerDraw& draw, int step) {
  if (draw.modes != h.modes()) {
    throw Error(ErrorCode::mode_mismatch, "draw has " + std::to_string(draw.modes) + " modes, noise has " +
                                              std::to_string(h.modes()));
  }
  if (step < 0 || step >= draw.steps) throw Error(ErrorCode::invalid_argument, "step outside the draw");
  const Domain& dom = u.domain();
  std::vector<double> out(dom.node_count(), 0.0);
  if (h.is_zero()) return {dom, std::move(out)};
  for (int j = 1; j <= h.modes(); ++j) {
    const double db = draw(j, step);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h(j, t, dom.node(i), u[i]) * db;
  }
  return {dom, std::move(out)};
}

double hs_norm_sq(const NoiseModel& h, double t, const GridFunction& u, int first, int last) {
  if (last < 0) last = h.modes();
  if (h.is_zero()) return 0.0;
  const Domain& dom = u.domain();
  double s = 0.0;
  for (int j = std::max(first, 1); j <= std::min(last, h.modes()); ++j) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double v = h(j, t, dom.node(i), u[i]);
      s += v * v;
    }
  }
  return s * dom.node_weight();
}

NoiseModel elementary_approximation(const NoiseModel& h, std::vector<double> partition) {
  if (partition.empty()) throw Error(ErrorCode::empty_input, "elementary approximation needs a partition");
  std::sort(partition.begin(), partition.end());
  if (h.is_zero()) return h;
  auto freeze = [partition](double t) {
    // left end of the interval (t_l, t_{l+1}] containing t
    auto it = std::lower_bound(partition.begin(), partition.end(), t);
    if (it == partition.begin()) return partition.front();
    return *(it - 1);
  };
  return NoiseModel(
      h.modes(), [h, freeze](int j, double t, const Point& x, double lambda) { return h(j, freeze(t), x, lambda); },
      h.is_additive(), h.label() + "/elementary");
}

NoiseAssumptionReport verify_h_assumptions(const NoiseModel& h, const NoiseConstants& declared, int samples,
                                           const SampleBox& box, double lambda_max, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::invalid_argument, "samples must be >= 1");
  BoxSampler rng(box, seed);
  NoiseAssumptionReport rep;
  rep.growth_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = rng.time();
    const Point x = rng.point();
    const double l1 = rng.uniform(-lambda_max, lambda_max);
    const double l2 = rng.uniform(-lambda_max, lambda_max);
    double sq = 0.0;
    double dsq = 0.0;
    for (int j = 1; j <= h.modes(); ++j) {
      const double a = h(j, t, x, l1);
      const double b = h(j, t, x, l2);
      sq += a * a;
      dsq += (a - b) * (a - b);
    }
    const double c3 = declared.C3 ? declared.C3(x) : 0.0;
    const double excess = sq - declared.C1 * l1 * l1 - c3;
    if (excess > rep.growth_excess) rep.growth_excess = excess, rep.growth_witness = {t, x[0], x[1], l1};
    if (excess > 1e-12 * (1.0 + sq)) rep.growth_passed = false;
    if (l1 != l2) {
      const double dl = (l1 - l2) * (l1 - l2);
      const double ratio = dsq / dl;
      if (ratio > rep.lipschitz_ratio) rep.lipschitz_ratio = ratio, rep.lipschitz_witness = {t, x[0], x[1], l1, l2};
      if (dsq > declared.C2 * dl + 1e-12 * (1.0 + dsq)) rep.lipschitz_passed = false;
    }
  }
  return rep;
}

}  // namespace muslx
