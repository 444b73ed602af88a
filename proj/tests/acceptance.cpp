// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <muslx/basis.hpp>
#include <muslx/conjugate.hpp>
#include <muslx/exponent.hpp>
#include <muslx/flux.hpp>
#include <muslx/verify.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

using namespace muslx;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %s  [%.2f s of %.0f s%s]\n", id, ok ? "PASS" : "FAIL", o.detail.c_str(), secs,
              budget_s, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> geometric(int n, double first, double ratio) {
  std::vector<double> a;
  double v = first;
  for (int j = 0; j < n; ++j, v *= ratio) a.push_back(v);
  return a;
}

SolverConfig ou_config(int paths, double dt) {
  SolverConfig c;
  c.domain = Domain(1, 64);
  const SineBasis b(c.domain, 1);
  c.flux = plaplace_flux(ExponentField(2.0));
  c.noise = NoiseModel::additive(b, {0.5});
  c.initial = b.mode(1);
  c.horizon = 0.5;
  c.dt = dt;
  c.paths = paths;
  c.seed = 20240601;
  return c;
}

Outcome integration_by_parts() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (const Domain& d : {Domain(1, 256), Domain(2, 64)}) {
    for (int pair = 0; pair < 100; ++pair) {
      std::vector<Vec2> f(d.element_count());
      for (Vec2& g : f) g = {n(rng), d.dim() == 2 ? n(rng) : 0.0};
      std::vector<double> v(d.node_count());
      for (double& x : v) x = n(rng);
      const GradientField F(d, f);
      const GridFunction V(d, v);
      const double gap = std::abs(l2_inner(divergence(F), V) + l2_inner(F, gradient(V)));
      worst = std::max(worst, gap / std::sqrt(l2_norm_sq(F) * l2_norm_sq(V)));
    }
  }
  return {worst <= 1e-12, fmt("max |<div F,v> + <F,grad v>| / (|F||v|) = %.2e (limit 1e-12)", worst)};
}

Outcome heat_baseline() {
  SolverConfig c;
  c.domain = Domain(1, 256);
  c.flux = plaplace_flux(ExponentField(2.0));
  c.initial = SineBasis(c.domain, 1).mode(1);
  c.horizon = 0.1;
  c.dt = 1e-4;
  const PathResult r = solve_path(c, 0);
  const double ratio = std::sqrt(l2_norm_sq(r.final_state)) / std::exp(-std::numbers::pi * std::numbers::pi * 0.1);
  return {ratio >= 0.99 && ratio <= 1.01, fmt("|u(T)| / exp(-pi^2 T) = %.6f (window [0.99, 1.01])", ratio)};
}

Outcome ou_energy() {
  const SolverConfig c = ou_config(2000, 1e-3);
  const std::vector<PathResult> ens = solve_ensemble(c);
  const EnergyReport r = energy_residual_expectation(ens, 0.5);
  double s = 0.0, s2 = 0.0;
  for (const PathResult& p : ens) {
    s += p.ledger.back().norm_sq;
    s2 += p.ledger.back().norm_sq * p.ledger.back().norm_sq;
  }
  const double n = static_cast<double>(ens.size());
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
  const double mu = SineBasis(c.domain, 1).discrete_eigenvalue(1);
  const double exact = ou_second_moment(1.0, 0.5, mu, 0.5);
  const bool moment_ok = std::abs(mean - exact) <= 3.0 * se;
  return {r.passed && moment_ok,
          fmt("energy residual %.3e vs allowance %.3e (%s); E|u(T)|^2 = %.5f vs closed form %.5f, %.2f stderr (%s)",
              r.residual, r.allowance, r.passed ? "ok" : "exceeded", mean, exact, std::abs(mean - exact) / se,
              moment_ok ? "ok" : "exceeded")};
}

// Coarse draws are sums of fine increments so every level follows one Brownian path.
WienerDraw coarsen(const WienerDraw& fine, int factor) {
  WienerDraw d = fine;
  d.steps = fine.steps / factor;
  d.dt = fine.dt * factor;
  d.increments.assign(static_cast<std::size_t>(d.steps) * static_cast<std::size_t>(d.modes), 0.0);
  for (int m = 0; m < d.steps; ++m)
    for (int j = 1; j <= d.modes; ++j)
      for (int k = 0; k < factor; ++k)
        d.increments[static_cast<std::size_t>(m * d.modes + j - 1)] += fine(j, m * factor + k);
  return d;
}

Outcome truncated_pathwise() {
  const std::vector<double> dts{1e-2, 5e-3, 2.5e-3};
  SolverConfig fine_cfg = ou_config(1, dts.back());
  const WienerDraw fine = draw_for(fine_cfg, 0);
  std::vector<double> res;
  for (double dt : dts) {
    SolverConfig c = ou_config(1, dt);
    c.store_trajectory = true;
    const WienerDraw draw = coarsen(fine, static_cast<int>(std::lround(dt / dts.back())));
    const PathResult p = solve_with_draw(c, draw);
    res.push_back(std::abs(energy_residual_truncated_pathwise(p, c, {10.0, 0.0}, draw).residual));
  }
  const double r1 = res[0] / res[1], r2 = res[1] / res[2];
  return {r1 >= 1.33 && r2 >= 1.33,
          fmt("|residual| %.3e, %.3e, %.3e; halving factors %.3f, %.3f (need >= 1.33)", res[0], res[1], res[2], r1, r2)};
}

Outcome ito_isometry() {
  const Domain d(1, 64);
  const SineBasis b(d, 8);
  const IsometryReport r = ito_isometry_check(NoiseModel::additive(b, geometric(8, 0.5, 0.5)), d, 2.0, 100, 5000, 11);
  return {r.passed && std::abs(r.exact - 0.666656494140625) <= 1e-12,
          fmt("MC %.6f +- %.6f vs exact %.9f (%.2f stderr)", r.estimate, r.mc_stderr, r.exact,
              std::abs(r.estimate - r.exact) / r.mc_stderr)};
}

Outcome piecewise() {
  SolverConfig c;
  c.domain = Domain(1, 64);
  const ExponentField p({1.0}, {ExponentPiece{2.0}, ExponentPiece{4.0}});
  c.flux = plaplace_flux(p);
  c.initial = SineBasis(c.domain, 1).mode(1);
  c.horizon = 2.0;
  c.dt = 0.01;
  c.seed = 5;
  const std::vector<Flux> pieces{plaplace_flux(p.piece_only(0)), plaplace_flux(p.piece_only(1))};
  const PiecewiseReport quiet = piecewise_consistency(c, pieces);
  c.noise = NoiseModel::additive(SineBasis(c.domain, 4), geometric(4, 0.5, 0.5));
  const PiecewiseReport noisy = piecewise_consistency(c, pieces);
  return {quiet.passed && noisy.passed,
          fmt("sup_m L2 gap without noise %.2e, with noise %.2e (limit 1e-12)", quiet.max_gap, noisy.max_gap)};
}

Outcome coercivity() {
  const SampleBox box;  // t in (0,1), x in (0,1)^2, xi in [-1,1]^2
  double worst = 0.0;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const NFunction M = NFunction::from_young(YoungFunction::power(p));
    const CoercivityReport r = verify_coercivity(plaplace_flux(ExponentField(p)), M, pointwise_conjugate(M), 1.0,
                                                 [](double, const Point&) { return 0.0; }, 100000, box, 7);
    worst = std::max(worst, r.max_abs_gap);
  }
  return {worst <= 1e-12, fmt("max |M + M*(A) - A.xi| = %.2e over 4 x 1e5 samples (limit 1e-12)", worst)};
}

Outcome monotonicity() {
  const SampleBox box;
  double lowest = INFINITY;
  for (const Flux& A : {plaplace_flux(ExponentField(1.5)), plaplace_flux(ExponentField(2.0)),
                        plaplace_flux(ExponentField(4.0)),
                        double_phase_flux(2.0, 4.0, [](double, const Point&) { return 1.0; })}) {
    lowest = std::min(lowest, verify_monotonicity(A, 100000, box, 9).minimum.value);
  }
  return {lowest > 0.0, fmt("min (A(a)-A(b)).(a-b) = %.3e over 4 x 1e5 pairs", lowest)};
}

Outcome conjugation() {
  const std::vector<double> grid = default_dual_grid();
  double worst_conj = 0.0, worst_bi = 0.0;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const YoungFunction m = YoungFunction::power(p);
    const double q = p / (p - 1.0);
    const ConjugateTable once = conjugate(m, grid);
    for (int i = 0; i <= 400; ++i) {
      const double x = std::pow(10.0, -2.0 + 4.0 * i / 400.0);
      worst_conj = std::max(worst_conj, std::abs(once(x) / (std::pow(x, q) / q) - 1.0));
    }
    std::vector<double> inner;
    for (double x : grid)
      if (x <= 10.5) inner.push_back(x);
    const ConjugateTable twice = conjugate(once.as_young(), inner);
    for (int i = 0; i <= 200; ++i) {
      const double s = std::pow(10.0, -1.0 + 2.0 * i / 200.0);
      worst_bi = std::max(worst_bi, std::abs(twice(s) / m(s) - 1.0));
    }
  }
  return {worst_conj <= 1e-3 && worst_bi <= 5e-3,
          fmt("conjugate rel. error %.2e (limit 1e-3), biconjugate %.2e (limit 5e-3)", worst_conj, worst_bi)};
}

Outcome fixed_point() {
  SolverConfig c;
  c.domain = Domain(1, 64);
  const SineBasis b(c.domain, 8);
  c.initial = b.mode(1);
  c.flux = plaplace_flux(ExponentField(2.0));
  c.noise = NoiseModel::multiplicative(b, geometric(8, 0.05, 0.5));
  c.horizon = 0.5;
  c.dt = 1e-3;
  c.seed = 13;
  const FixedPointResult mult = solve_multiplicative(c, 0);
  c.noise = NoiseModel::additive(b, geometric(8, 0.05, 0.5));
  const FixedPointResult add = solve_multiplicative(c, 0);
  const bool ok = mult.max_ratio < 0.9 && mult.iterations <= 10 && add.iterations == 1;
  return {ok, fmt("multiplicative: %d iterations, max defect ratio %.3e, final defect %.2e; additive: %d iteration(s)",
                  mult.iterations, mult.max_ratio, mult.defects[static_cast<std::size_t>(mult.iterations)],
                  add.iterations)};
}

Outcome mode_cascade() {
  SolverConfig c;
  c.domain = Domain(1, 64);
  const SineBasis b(c.domain, 32);
  c.flux = plaplace_flux(ExponentField(2.0));
  c.noise = NoiseModel::additive(b, geometric(32, 0.5, 0.5));
  c.initial = b.mode(1);
  c.horizon = 0.01;
  c.dt = 1e-4;
  c.paths = 400;
  c.seed = 21;
  const std::vector<int> modes{4, 8, 16, 32};
  const CascadeTable t = noise_mode_cascade(c, modes);
  double lo = INFINITY, hi = 0.0;
  std::string ratios;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double r = *t.rows[i].ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    ratios += fmt("%s%.3e", i > 1 ? ", " : "", r);
  }
  return {hi / lo <= 10.0, fmt("LHS/RHS ratios %s; max/min %.2f (limit 10)", ratios.c_str(), hi / lo)};
}

Outcome gaussian_modular() {
  const Domain d(1, 32);
  const SineBasis b(d, 1);
  const GaussianModularReport r = gaussian_modular_finiteness(NoiseModel::additive(b, {0.5}), d,
                                                              YoungFunction::exp_beta(1.0, 0.5),
                                                              std::vector<double>{1.0}, 1.0, 0.01, 10000, 17);
  const GaussianModularRow& row = r.rows.front();
  return {r.passed() && std::isfinite(row.estimate),
          fmt("estimate %.5f (1e4 paths), %.5f (2e4 paths), change %.2f%% (limit 20%%)", row.estimate, row.doubled,
              100.0 * row.relative_change)};
}

}  // namespace

int main() {
  criterion(1, 1.0, integration_by_parts);
  criterion(2, 10.0, heat_baseline);
  criterion(3, 300.0, ou_energy);
  criterion(4, 60.0, truncated_pathwise);
  criterion(5, 60.0, ito_isometry);
  criterion(6, 60.0, piecewise);
  criterion(7, 5.0, coercivity);
  criterion(8, 5.0, monotonicity);
  criterion(9, 5.0, conjugation);
  criterion(10, 120.0, fixed_point);
  criterion(11, 600.0, mode_cascade);
  criterion(12, 120.0, gaussian_modular);
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
