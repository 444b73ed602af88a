#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <muslx/basis.hpp>
#include <muslx/error.hpp>
#include <muslx/noise.hpp>
#include <muslx/wiener.hpp>

#include <cmath>
#include <numbers>

using namespace muslx;

namespace {

std::vector<double> geometric(int n, double ratio) {
  std::vector<double> a(static_cast<std::size_t>(n));
  double v = 1.0;
  for (double& x : a) x = (v *= ratio);
  return a;
}

}  // namespace

TEST_CASE("keyed normals are reproducible") {
  CHECK(keyed_normal(1, 2, 3, 4) == keyed_normal(1, 2, 3, 4));
  CHECK(keyed_normal(1, 2, 3, 4) != keyed_normal(1, 2, 3, 5));
  CHECK(keyed_normal(1, 2, 3, 4) != keyed_normal(1, 3, 3, 4));
  CHECK(keyed_normal(1, 2, 3, 4) != keyed_normal(2, 2, 3, 4));
  CHECK(std::isfinite(keyed_normal(0, 0, 1, 0)));
}

TEST_CASE("increment mean at dt = 1 over 10^6 draws") {
  const WienerDraw d = sample_increments(42, 0, 1000000, 1, 1.0);
  double s = 0.0;
  for (double x : d.increments) s += x;
  CHECK(std::abs(s / 1e6) <= 5e-3);
}

TEST_CASE("empty and repeated draws") {
  const WienerDraw e = sample_increments(1, 0, 0, 3, 0.1);
  CHECK(e.steps == 0);
  CHECK(e.increments.empty());
  const WienerDraw a = sample_increments(9, 4, 50, 3, 0.01);
  const WienerDraw b = sample_increments(9, 4, 50, 3, 0.01);
  CHECK(a.increments == b.increments);
  const WienerDraw c = sample_increments(9, 5, 50, 3, 0.01);
  CHECK(a.increments != c.increments);
  CHECK_THROWS_AS(sample_increments(1, 0, 5, 1, 0.0), Error);
  CHECK_THROWS_AS(sample_increments(1, 0, -1, 1, 0.1), Error);
}

TEST_CASE("a later window reproduces the tail of the full draw") {
  const WienerDraw full = sample_increments(3, 1, 40, 4, 0.05);
  const WienerDraw tail = sample_increments(3, 1, 15, 4, 0.05, 25);
  for (int m = 0; m < 15; ++m)
    for (int j = 1; j <= 4; ++j) CHECK(tail(j, m) == full(j, 25 + m));
}

TEST_CASE("per-mode variance and cross-correlation") {
  const int steps = 200000;
  const int modes = 4;
  const double dt = 0.01;
  const WienerDraw d = sample_increments(77, 2, steps, modes, dt);
  for (int j = 1; j <= modes; ++j) {
    double s2 = 0.0;
    for (int m = 0; m < steps; ++m) s2 += d(j, m) * d(j, m);
    const double var = s2 / steps;
    const double se = dt * std::sqrt(2.0 / steps);
    CHECK(std::abs(var - dt) <= 5.0 * se);
    for (int k = j + 1; k <= modes; ++k) {
      double c = 0.0;
      for (int m = 0; m < steps; ++m) c += d(j, m) * d(k, m);
      CHECK(std::abs(c / steps) <= 5.0 * dt / std::sqrt(steps));
    }
  }
}

TEST_CASE("apply_noise examples") {
  const Domain dom(1, 32);
  const SineBasis basis(dom, 8);
  const GridFunction u = GridFunction::sample(dom, [](const Point& x) { return x[0] * (1.0 - x[0]); });

  WienerDraw draw = sample_increments(1, 0, 3, 1, 0.1);
  const GridFunction z = apply_noise(NoiseModel::zero(1), u, 0.0, draw, 0);
  CHECK(z.max_abs() == 0.0);

  draw.increments[0] = 0.3;
  const GridFunction s = apply_noise(NoiseModel::additive(basis, {1.0}), u, 0.0, draw, 0);
  const GridFunction e1 = basis.mode(1);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(0.3 * e1[i]).epsilon(1e-15));

  // h_j(lambda) = lambda 2^-j e_j checked against a direct sum at three nodes
  const NoiseModel mult = NoiseModel::multiplicative(basis, geometric(8, 0.5));
  const WienerDraw d8 = sample_increments(5, 0, 4, 8, 0.02);
  const GridFunction out = apply_noise(mult, u, 0.0, d8, 2);
  for (std::size_t i : {std::size_t{3}, std::size_t{15}, std::size_t{27}}) {
    const double x = dom.node(i)[0];
    const double lam = x * (1.0 - x);
    double want = 0.0;
    for (int j = 1; j <= 8; ++j)
      want += lam * std::pow(2.0, -j) * std::sqrt(2.0) * std::sin(j * std::numbers::pi * x) * d8(j, 2);
    CHECK(out[i] == doctest::Approx(want).epsilon(1e-13));
  }
  CHECK_THROWS_AS(apply_noise(mult, u, 0.0, draw, 0), Error);
  CHECK_THROWS_AS(apply_noise(mult, u, 0.0, d8, 4), Error);
}

TEST_CASE("hs_norm_sq examples") {
  const Domain dom(1, 64);
  const SineBasis basis(dom, 8);
  const GridFunction u = GridFunction::sample(dom, [](const Point& x) { return std::sin(3.0 * x[0]); });
  CHECK(hs_norm_sq(NoiseModel::zero(4), 0.0, u) == 0.0);
  CHECK(hs_norm_sq(NoiseModel::additive(basis, {1.0}), 0.0, u) == doctest::Approx(1.0).epsilon(1e-14));
  const NoiseModel g = NoiseModel::additive(basis, geometric(8, 0.5));
  CHECK(hs_norm_sq(g, 0.0, u) == doctest::Approx(0.3333282470703125).epsilon(1e-14));
  CHECK(hs_norm_sq(g, 0.0, u, 2, 3) == doctest::Approx(1.0 / 16.0 + 1.0 / 64.0).epsilon(1e-14));
  CHECK(hs_norm_sq(g.truncated(2), 0.0, u) == doctest::Approx(0.25 + 1.0 / 16.0).epsilon(1e-14));
  CHECK_THROWS_AS(g.truncated(9), Error);
  CHECK_THROWS_AS(NoiseModel::additive(basis, std::vector<double>(9, 1.0)), Error);
}

TEST_CASE("elementary approximation") {
  const NoiseModel steady(1, [](int, double, const Point& x, double l) { return x[0] + l; }, false);
  const NoiseModel frozen = elementary_approximation(steady, {0.0, 0.5, 1.0});
  for (double t : {0.0, 0.1, 0.5, 0.7, 1.0}) CHECK(frozen(1, t, {0.3, 0.0}, 2.0) == steady(1, t, {0.3, 0.0}, 2.0));

  const NoiseModel ramp(1, [](int, double t, const Point&, double) { return t; }, true);
  const NoiseModel r = elementary_approximation(ramp, {0.0, 0.5, 1.0});
  CHECK(r(1, 0.25, {0.0, 0.0}, 0.0) == 0.0);
  CHECK(r(1, 0.5, {0.0, 0.0}, 0.0) == 0.0);
  CHECK(r(1, 0.5000001, {0.0, 0.0}, 0.0) == 0.5);
  CHECK(r(1, 1.0, {0.0, 0.0}, 0.0) == 0.5);
  CHECK_THROWS_AS(elementary_approximation(ramp, {}), Error);
}

TEST_CASE("elementary approximation defect decays at second order") {
  // for h_1 = t on (0, 1) the squared defect is sum over L slabs of dt^3/3
  const NoiseModel ramp(1, [](int, double t, const Point&, double) { return t; }, true);
  double prev = 0.0;
  for (int L : {4, 8, 16, 32}) {
    std::vector<double> part;
    for (int l = 0; l <= L; ++l) part.push_back(static_cast<double>(l) / L);
    const NoiseModel r = elementary_approximation(ramp, part);
    const int q = 4096;
    double defect = 0.0;
    for (int i = 0; i < q; ++i) {
      const double t = (i + 0.5) / q;
      const double e = r(1, t, {0.0, 0.0}, 0.0) - t;
      defect += e * e / q;
    }
    const double dt = 1.0 / L;
    CHECK(defect == doctest::Approx(dt * dt / 3.0).epsilon(1e-3));
    if (prev > 0.0) CHECK(prev / defect == doctest::Approx(4.0).epsilon(1e-2));
    prev = defect;
  }
}

TEST_CASE("assumption checks on noise maps") {
  const SampleBox box{1.0, 0.0, 1.0, 1, 1.0};
  const NoiseAssumptionReport z = verify_h_assumptions(NoiseModel::zero(3), {}, 1000, box);
  CHECK(z.passed());

  const Domain dom(1, 32);
  const SineBasis basis(dom, 8);
  const NoiseModel mult = NoiseModel::multiplicative(basis, geometric(8, 0.5));
  // sum_j 4^-j e_j^2 <= 2 sum_j 4^-j
  const double c2 = 2.0 * 0.3333282470703125;
  const NoiseAssumptionReport m = verify_h_assumptions(mult, {c2, c2, {}}, 20000, box);
  CHECK(m.passed());
  CHECK(m.lipschitz_ratio <= c2);
  CHECK(m.lipschitz_ratio > 0.5 * c2);

  const NoiseModel quad(1, [](int, double, const Point&, double l) { return l * l; }, false);
  const NoiseAssumptionReport q = verify_h_assumptions(quad, {1.0, 1.0, {}}, 5000, box);
  CHECK_FALSE(q.lipschitz_passed);
  CHECK(q.lipschitz_witness.size() == 5);
  CHECK(q.lipschitz_ratio > 100.0);

  const NoiseModel add = NoiseModel::additive(basis, {1.0});
  CHECK_FALSE(verify_h_assumptions(add, {0.0, 0.0, {}}, 1000, box).growth_passed);
  CHECK(verify_h_assumptions(add, {0.0, 0.0, [](const Point&) { return 2.0; }}, 1000, box).passed());
}
