#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <muslx/basis.hpp>
#include <muslx/error.hpp>
#include <muslx/grid.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace muslx;

namespace {

GridFunction random_field(const Domain& d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<double> v(d.node_count());
  for (double& x : v) x = n(rng);
  return GridFunction(d, std::move(v));
}

GradientField random_gradient(const Domain& d, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  std::vector<Vec2> v(d.element_count());
  for (Vec2& g : v) g = {n(rng), d.dim() == 2 ? n(rng) : 0.0};
  return GradientField(d, std::move(v));
}

}  // namespace

TEST_CASE("domain construction") {
  const Domain d1(1, 8);
  CHECK(d1.node_count() == 7);
  CHECK(d1.element_count() == 8);
  CHECK(d1.spacing() == 0.125);
  CHECK(d1.node_weight() == 0.125);
  CHECK(d1.node(0)[0] == 0.125);
  const Domain d2(2, 4, 0.0, 2.0);
  CHECK(d2.node_count() == 9);
  CHECK(d2.element_count() == 32);
  CHECK(d2.measure() == 4.0);
  CHECK(d2.element_weight() == 0.125);
  CHECK_THROWS_AS(Domain(1, 3), Error);
  CHECK_THROWS_AS(Domain(3, 8), Error);
  CHECK_THROWS_AS(Domain(1, 8, 1.0, 1.0), Error);
  CHECK_THROWS_AS(GridFunction(d1, std::vector<double>(5)), Error);
}

TEST_CASE("gradient of zero is zero") {
  for (int dim : {1, 2}) {
    const Domain d(dim, 16);
    const GradientField g = gradient(GridFunction(d));
    for (const Vec2& v : g.values()) {
      CHECK(v[0] == 0.0);
      CHECK(v[1] == 0.0);
    }
  }
}

TEST_CASE("hat function gradient in 1-D") {
  const Domain d(1, 10);
  const double h = d.spacing();
  for (std::size_t i = 0; i < d.node_count(); ++i) {
    std::vector<double> v(d.node_count(), 0.0);
    v[i] = 1.0;
    const GridFunction hat(d, v);
    const GradientField g = gradient(hat);
    for (std::size_t e = 0; e < d.element_count(); ++e) {
      const double want = e == i ? 1.0 / h : (e == i + 1 ? -1.0 / h : 0.0);
      CHECK(g[e][0] == doctest::Approx(want).epsilon(1e-15));
    }
    std::mt19937_64 rng(i);
    const GradientField F = random_gradient(d, rng);
    const double lhs = l2_inner(divergence(F), hat) + l2_inner(F, g);
    CHECK(std::abs(lhs) <= 1e-14 * (1.0 + std::sqrt(l2_norm_sq(F) * l2_norm_sq(g))));
  }
}

TEST_CASE("summation by parts holds on random fields for every grid size") {
  std::mt19937_64 rng(7);
  for (int dim : {1, 2}) {
    for (int n : {4, 5, 8, 13, 32, 64}) {
      const Domain d(dim, n, -0.5, 1.5);
      for (int trial = 0; trial < 5; ++trial) {
        const GridFunction u = random_field(d, rng);
        const GridFunction v = random_field(d, rng);
        const GradientField gu = gradient(u);
        const GradientField gv = gradient(v);
        const double lhs = l2_inner(divergence(gu), v) + l2_inner(gu, gv);
        CHECK(std::abs(lhs) <= 1e-12 * std::sqrt(l2_norm_sq(gu) * l2_norm_sq(gv)));
        const GradientField F = random_gradient(d, rng);
        const double lhs2 = l2_inner(divergence(F), v) + l2_inner(F, gv);
        CHECK(std::abs(lhs2) <= 1e-12 * std::sqrt(l2_norm_sq(F) * l2_norm_sq(gv)));
      }
    }
  }
}

TEST_CASE("summation by parts on a 64 x 64 grid") {
  std::mt19937_64 rng(64);
  const Domain d(2, 64);
  const GridFunction u = random_field(d, rng);
  const GridFunction v = random_field(d, rng);
  const GradientField gu = gradient(u), gv = gradient(v);
  CHECK(std::abs(l2_inner(divergence(gu), v) + l2_inner(gu, gv)) <=
        1e-12 * std::sqrt(l2_norm_sq(gu) * l2_norm_sq(gv)));
}

TEST_CASE("inner products") {
  std::mt19937_64 rng(11);
  const Domain d(2, 12);
  const GridFunction u = random_field(d, rng), v = random_field(d, rng);
  CHECK(l2_inner(u, v) == doctest::Approx(l2_inner(v, u)).epsilon(1e-15));
  CHECK(l2_norm_sq(u) > 0.0);
  CHECK(l2_norm_sq(GridFunction(d)) == 0.0);
  CHECK(l2_norm_sq(u) == doctest::Approx(l2_inner(u, u)).epsilon(1e-15));
  CHECK_THROWS_AS(l2_inner(u, GridFunction(Domain(2, 13))), Error);
}

TEST_CASE("sine modes at n = 256") {
  const Domain d(1, 256);
  const SineBasis b(d, 4);
  const GridFunction e1 = b.mode(1), e2 = b.mode(2);
  CHECK(std::abs(l2_inner(e1, e1) - 1.0) <= 1e-6);
  CHECK(std::abs(l2_inner(e1, e2)) <= 1e-6);
  CHECK(b.sup_norm(1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("sine modes are exactly orthonormal on the lumped grid") {
  // the trapezoid rule integrates sin(j pi x) sin(k pi x) exactly for j + k < 2n,
  // so the O(h^2) quadrature error vanishes identically
  for (int dim : {1, 2}) {
    for (int n : {8, 16, 32, 64}) {
      const Domain d(dim, n);
      const SineBasis b(d, 6);
      for (int j = 1; j <= 6; ++j)
        for (int k = 1; k <= 6; ++k)
          CHECK(std::abs(l2_inner(b.mode(j), b.mode(k)) - (j == k ? 1.0 : 0.0)) <= 1e-13);
    }
  }
}

TEST_CASE("sine modes are eigenvectors of the discrete Laplacian") {
  for (int dim : {1, 2}) {
    const Domain d(dim, 24, 0.0, 2.0);
    const SineBasis b(d, 8);
    for (int j = 1; j <= 8; ++j) {
      const GridFunction e = b.mode(j);
      const GridFunction lap = divergence(gradient(e));
      const double mu = b.discrete_eigenvalue(j);
      for (std::size_t i = 0; i < e.size(); ++i) CHECK(std::abs(lap[i] + mu * e[i]) <= 1e-10 * mu);
    }
  }
  const Domain d(1, 64);
  const double h = d.spacing();
  CHECK(SineBasis(d, 1).discrete_eigenvalue(1) ==
        doctest::Approx(4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2)).epsilon(1e-14));
}

TEST_CASE("2-D modes are ordered by eigenvalue") {
  const SineBasis b(Domain(2, 16), 10);
  CHECK(b.wave_numbers(1) == std::array<int, 2>{1, 1});
  for (int j = 2; j <= 10; ++j) CHECK(b.discrete_eigenvalue(j) >= b.discrete_eigenvalue(j - 1));
}

TEST_CASE("projection and lifting") {
  const Domain d(1, 64);
  const SineBasis b(d, 10);
  const std::vector<double> c3 = project_modes(b.mode(3), b, 10);
  for (int j = 0; j < 10; ++j) CHECK(std::abs(c3[static_cast<std::size_t>(j)] - (j == 2 ? 1.0 : 0.0)) <= 1e-13);
  for (double c : project_modes(GridFunction(d), b, 10)) CHECK(c == 0.0);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int dim : {1, 2}) {
    const Domain dd(dim, 32);
    const SineBasis bb(dd, 20);
    std::vector<double> coeffs(20);
    for (double& c : coeffs) c = n(rng);
    const GridFunction u = lift_modes(coeffs, bb);
    const std::vector<double> back = project_modes(u, bb, 20);
    for (std::size_t j = 0; j < 20; ++j) CHECK(std::abs(back[j] - coeffs[j]) <= 1e-8);
    const GridFunction again = lift_modes(back, bb);
    CHECK((again - u).max_abs() <= 1e-8);
  }
  CHECK_THROWS_AS(project_modes(GridFunction(d), b, 11), Error);
  CHECK_THROWS_AS(lift_modes(std::vector<double>(11), b), Error);
}

TEST_CASE("space-time quadrature") {
  const Domain d(2, 8);
  const SampledField one = SampledField::sample(d, 2.0, 5, [](double, const Point&) { return 1.0; });
  CHECK(qt_integral(one) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(one.total_measure() == doctest::Approx(2.0).epsilon(1e-14));
  // midpoint rule is exact for bilinear integrands
  const SampledField tx = SampledField::sample(d, 1.0, 4, [](double t, const Point& x) { return t * x[0]; });
  CHECK(qt_integral(tx) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(qt_integral(tx.scaled(3.0)) == doctest::Approx(0.75).epsilon(1e-14));

  const Domain d1(1, 16);
  const GridFunction c = GridFunction::sample(d1, [](const Point&) { return 1.0; });
  // interior nodes only: 15 nodes of weight 1/16
  CHECK(qt_integral(SampledField::from_grid(c)) == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
  std::vector<GridFunction> states{c, c.scaled(2.0), c.scaled(3.0)};
  // trapezoid in time of 1, 2, 3 with dt = 0.5 gives 2, times 15/16
  CHECK(qt_integral(SampledField::from_trajectory(states, 0.5)) == doctest::Approx(2.0 * 15.0 / 16.0).epsilon(1e-15));
  CHECK_THROWS_AS(SampledField::from_trajectory(std::span<const GridFunction>(states.data(), 1), 0.5), Error);
  CHECK_THROWS_AS(SampledField::sample(d, 0.0, 4, [](double, const Point&) { return 1.0; }), Error);
}
