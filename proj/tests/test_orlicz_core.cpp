#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <muslx/conjugate.hpp>
#include <muslx/error.hpp>
#include <muslx/grid.hpp>
#include <muslx/modular.hpp>
#include <muslx/young.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace muslx;

namespace {

NFunction power_nfunction(double p) {
  // plain s^p, used where the examples are stated without the 1/p factor
  const YoungFunction m("s^" + std::to_string(p), [p](double s) { return std::pow(s, p); },
                        [p](double s) { return p * std::pow(s, p - 1.0); });
  return NFunction::from_young(m);
}

SampledField constant_field(const Domain& dom, double horizon, double c) {
  return SampledField::sample(dom, horizon, 4, [c](double, const Point&) { return c; });
}

}  // namespace

TEST_CASE("built-in Young functions satisfy the sampled axioms") {
  for (std::string name : {"power:1.5", "power:2", "power:4", "exp_beta:1,0.5", "zygmund"}) {
    const AxiomReport r = check_young_axioms(YoungFunction::parse(name), 2000, 7);
    INFO(name);
    CHECK(r.all_passed());
  }
}

TEST_CASE("a linear function fails superlinearity and a negative one is rejected") {
  const YoungFunction lin("linear", [](double s) { return s; }, [](double) { return 1.0; });
  const AxiomReport r = check_young_axioms(lin, 500, 3);
  CHECK_FALSE(r.get("superlinearity").passed);
  CHECK(r.get("convexity").passed);
  CHECK_THROWS_AS(YoungFunction("neg", [](double s) { return -s; }, [](double) { return -1.0; }), Error);
}

TEST_CASE("Young parser names") {
  CHECK(YoungFunction::parse("power:3")(2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
  CHECK(YoungFunction::parse("exp_beta:1,0.5")(1.0) == doctest::Approx(std::expm1(1.0)).epsilon(1e-15));
  CHECK(YoungFunction::parse("exp_beta:1,0.5").growth().has_value());
  CHECK_THROWS_AS(YoungFunction::parse("cubic"), Error);
  CHECK_THROWS_AS(YoungFunction::parse("power:0.5"), Error);
}

TEST_CASE("N-function bounds hold for the variable exponent and double phase builders") {
  const ExponentField p({1.0}, {ExponentPiece{2.0, 0.5, 0.0}, ExponentPiece{3.0, 0.0, 1.0}});
  const SampleBox box{2.0, 0.0, 1.0, 2, 20.0};
  CHECK(check_nfunction_bounds(NFunction::variable_power(p, 0.0, 1.0, 2), 5000, box, 5).all_passed());
  const NFunction dp = NFunction::double_phase(2.0, 4.0, [](double, const Point& x) { return x[0]; }, 1.0);
  CHECK(check_nfunction_bounds(dp, 5000, box, 5).all_passed());
}

TEST_CASE("conjugate values at frozen points") {
  // s^3/3 <-> x^{3/2} 2/3
  CHECK(conjugate_at(YoungFunction::power(3.0), 8.0) == doctest::Approx(2.0 * std::pow(8.0, 1.5) / 3.0).epsilon(1e-9));
  CHECK(conjugate_at(YoungFunction::power(3.0), 8.0) == doctest::Approx(15.084944665313014).epsilon(1e-9));
  CHECK(conjugate_at(YoungFunction::power(2.0), 0.0) == 0.0);
  // dense brute-force maximization of 2 s - (exp(s^1.5) - 1) over [0, 10] at 1e6 points
  CHECK(conjugate_at(YoungFunction::exp_beta(1.0, 0.5), 2.0) == doctest::Approx(0.6113755862).epsilon(1e-8));
}

TEST_CASE("conjugate table reproduces the classical power pairs") {
  const std::vector<double> grid = default_dual_grid();
  CHECK(grid.size() == 512);
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const ConjugateTable t = conjugate(YoungFunction::power(p), grid);
    const double q = p / (p - 1.0);
    CHECK(t(0.0) == 0.0);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = std::pow(10.0, -2.0 + 4.0 * i / 400.0);
      const double exact = std::pow(x, q) / q;
      worst = std::max(worst, std::abs(t(x) - exact) / exact);
    }
    INFO("p = " << p);
    CHECK(worst <= 1e-3);
    for (std::size_t i = 1; i + 1 < t.values().size(); ++i) {
      CHECK(t.values()[i] >= t.values()[i - 1]);
    }
  }
}

TEST_CASE("conjugate table is nondecreasing and convex on its nodes") {
  const ConjugateTable t = conjugate(YoungFunction::zygmund(), default_dual_grid());
  const auto& x = t.nodes();
  const auto& v = t.values();
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double left = (v[i] - v[i - 1]) / (x[i] - x[i - 1]);
    const double right = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
    CHECK(right >= left - 1e-9 * (1.0 + std::abs(left)));
    CHECK(v[i] >= v[i - 1]);
  }
}

TEST_CASE("table outside its coverage throws") {
  const ConjugateTable t = conjugate(YoungFunction::power(2.0), default_dual_grid());
  CHECK_THROWS_AS(t(2e4), std::out_of_range);
}

TEST_CASE("bracket exhaustion for a function that is not superlinear") {
  const YoungFunction lin("linear", [](double s) { return s; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(conjugate_at(lin, 2.0), Error);
  try {
    conjugate_at(lin, 2.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bracket_exhausted);
  }
}

TEST_CASE("biconjugate recovers m") {
  const std::vector<double> grid = default_dual_grid();
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const YoungFunction m = YoungFunction::power(p);
    const ConjugateTable once = conjugate(m, grid);
    // second transform only where its maximizer stays inside the first table
    std::vector<double> inner;
    for (double x : grid) {
      if (x <= 20.0) inner.push_back(x);
    }
    const ConjugateTable twice = conjugate(once.as_young(), inner);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
      const double s = std::pow(10.0, -1.0 + 2.0 * i / 100.0);
      worst = std::max(worst, std::abs(twice(s) - m(s)) / m(s));
    }
    INFO("p = " << p);
    CHECK(worst <= 5e-3);
  }
}

TEST_CASE("Fenchel-Young gap") {
  const std::vector<double> grid = default_dual_grid();
  const YoungFunction half_sq = YoungFunction::power(2.0);
  const ConjugateTable t2 = conjugate(half_sq, grid);
  CHECK(std::abs(fenchel_young_gap(half_sq, t2, 3.0, 3.0)) <= 1e-6);
  CHECK(fenchel_young_gap(half_sq, t2, 1.0, 4.0) == doctest::Approx(4.5).epsilon(1e-6));
  const YoungFunction cube = YoungFunction::power(3.0);
  const ConjugateTable t3 = conjugate(cube, grid);
  // brute force: m*(1) = max_s (s - s^3/3) = 2/3, so the gap is 8/3 + 2/3 - 2
  CHECK(fenchel_young_gap(cube, t3, 2.0, 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ls(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double s = std::pow(10.0, ls(rng));
    const double x = std::pow(10.0, ls(rng));
    worst = std::min(worst, fenchel_young_gap(cube, t3, s, x));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("modular quadrature") {
  const Domain unit(1, 8);
  CHECK(modular(power_nfunction(2.0), constant_field(unit, 1.0, 2.0)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(modular(power_nfunction(2.0), constant_field(unit, 1.0, 0.0)) == 0.0);
  // int_0^1 t^3 dt, midpoint in time
  const SampledField ft = SampledField::sample(unit, 1.0, 1000, [](double t, const Point&) { return t; });
  CHECK(modular(power_nfunction(3.0), ft) == doctest::Approx(0.25).epsilon(1e-6));
  const NFunction huge = NFunction::from_young(YoungFunction::exp_beta(1.0, 0.5));
  CHECK_THROWS_AS(modular(huge, constant_field(unit, 1.0, 1e4)), Error);
}

TEST_CASE("Luxemburg norm examples") {
  const Domain unit(1, 8);
  CHECK(luxemburg_norm(power_nfunction(2.0), constant_field(unit, 1.0, -1.7)) == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(luxemburg_norm(power_nfunction(2.0), constant_field(unit, 1.0, 0.0)) == 0.0);
  const Domain two(1, 8, 0.0, 2.0);
  CHECK(luxemburg_norm(power_nfunction(4.0), constant_field(two, 1.0, 3.0)) ==
        doctest::Approx(3.5676213450081633).epsilon(1e-9));
}

TEST_CASE("Luxemburg norm is homogeneous and bounded by the modular") {
  const Domain dom(2, 8);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const NFunction M = NFunction::from_young(YoungFunction::zygmund());
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const SampledField f =
        SampledField::sample(dom, 1.0, 3, [&](double t, const Point& x) { return a + b * x[0] * t + c * x[1]; });
    const double n = luxemburg_norm(M, f);
    const double k = u(rng) * 3.0;
    CHECK(luxemburg_norm(M, f.scaled(k)) == doctest::Approx(std::abs(k) * n).epsilon(1e-8));
    const double mod = modular(M, f);
    if (mod > 1.0) CHECK(n <= mod * (1.0 + 1e-9));
  }
}

TEST_CASE("Holder defect") {
  const Domain unit(1, 8);
  const NFunction sq = power_nfunction(2.0);
  CHECK(holder_defect(sq, sq, constant_field(unit, 1.0, 0.0), constant_field(unit, 1.0, 0.0)) == 0.0);
  // with s^2 in both slots: 2 * 1 * 1 - 1
  CHECK(holder_defect(sq, sq, constant_field(unit, 1.0, 1.0), constant_field(unit, 1.0, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // the true conjugate of s^2 is s^2 / 4: the inequality is then sharp
  const NFunction quarter = NFunction::from_young(
      YoungFunction("s^2/4", [](double s) { return 0.25 * s * s; }, [](double s) { return 0.5 * s; }));
  CHECK(std::abs(holder_defect(sq, quarter, constant_field(unit, 1.0, 1.0), constant_field(unit, 1.0, 1.0))) <= 1e-9);

  const Domain dom(2, 8);
  const NFunction cube = power_nfunction(3.0);
  // conjugate of s^3 is 2 (s/3)^{3/2}
  const NFunction cube_star = NFunction::from_young(YoungFunction(
      "cube*", [](double s) { return 2.0 * std::pow(s / 3.0, 1.5); }, [](double s) { return std::sqrt(s / 3.0); }));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = u(rng), b = u(rng);
    const SampledField f = SampledField::sample(dom, 1.0, 2, [&](double t, const Point& x) {
      return std::sin(3.0 * a * x[0]) + t * b;
    });
    const SampledField g = SampledField::sample(dom, 1.0, 2, [&](double, const Point& x) { return b * x[1] - a; });
    CHECK(holder_defect(cube, cube_star, f, g) >= -1e-9);
  }
}

TEST_CASE("theta diagnostic is 1 for an x-independent function") {
  const SampleBox box;
  CHECK(theta_ratio_diagnostic(NFunction::from_young(YoungFunction::power(2.0)), box, 0.1, 2.0, 200) ==
        doctest::Approx(1.0));
}

TEST_CASE("conjugate table CSV") {
  const ConjugateTable t = conjugate(YoungFunction::power(2.0), default_dual_grid());
  std::ostringstream os;
  t.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("x,conjugate\n0,0\n", 0) == 0);
}
