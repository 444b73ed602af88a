#include <muslx/young.hpp>

#include <muslx/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace muslx {

YoungFunction::YoungFunction(std::string label, Scalar eval, Scalar deriv, Scalar second,
                             std::optional<GrowthParams> growth, double domain_max)
    : label_(std::move(label)),
      eval_(std::move(eval)),
      deriv_(std::move(deriv)),
      second_(std::move(second)),
      growth_(growth),
      domain_max_(domain_max) {
  if (!eval_ || !deriv_) throw Error(ErrorCode::invalid_argument, "Young function needs m and m'");
  if (std::abs(eval_(0.0)) > 1e-15) {
    throw Error(ErrorCode::invalid_argument, label_ + ": m(0) must vanish");
  }
  for (double s : {1e-3, 1.0, 10.0}) {
    if (s > domain_max_) break;
    const double v = eval_(s);
    if (!(v > 0.0)) {
      std::ostringstream os;
      os << label_ << ": m(" << s << ") = " << v << " is not positive";
      throw Error(ErrorCode::invalid_argument, os.str());
    }
  }
  if (growth_ && !(growth_->B > 0.0 && growth_->beta > 0.0 && growth_->beta < 1.0)) {
    throw Error(ErrorCode::invalid_argument, label_ + ": growth constants need B > 0 and beta in (0,1)");
  }
}

YoungFunction YoungFunction::power(double p) {
  if (!(p > 1.0)) throw Error(ErrorCode::invalid_argument, "power Young function needs p > 1");
  std::ostringstream os;
  os << "power:" << p;
  return YoungFunction(
      os.str(), [p](double s) { return std::pow(s, p) / p; },
      [p](double s) { return std::pow(s, p - 1.0); },
      [p](double s) { return (p - 1.0) * std::pow(s, p - 2.0); });
}

YoungFunction YoungFunction::exp_beta(double B, double beta) {
  if (!(B > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "exp_beta needs B > 0 and beta > 0");
  }
  std::ostringstream os;
  os << "exp_beta:" << B << "," << beta;
  const double q = 1.0 + beta;
  std::optional<GrowthParams> growth;
  if (beta < 1.0) growth = GrowthParams{B, beta};
  return YoungFunction(
      os.str(), [B, q](double s) { return std::expm1(B * std::pow(s, q)); },
      [B, q](double s) { return B * q * std::pow(s, q - 1.0) * std::exp(B * std::pow(s, q)); },
      [B, q](double s) {
        const double e = std::exp(B * std::pow(s, q));
        const double d1 = B * q * std::pow(s, q - 1.0);
        return e * (B * q * (q - 1.0) * std::pow(s, q - 2.0) + d1 * d1);
      },
      growth);
}

YoungFunction YoungFunction::zygmund() {
  constexpr double e = std::numbers::e;
  return YoungFunction(
      "zygmund", [](double s) { return s * s * std::log(e + s); },
      [](double s) { return 2.0 * s * std::log(e + s) + s * s / (e + s); },
      [](double s) {
        const double w = e + s;
        return 2.0 * std::log(w) + 2.0 * s / w + (2.0 * s * w - s * s) / (w * w);
      });
}

YoungFunction YoungFunction::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto numbers = [&]() {
    std::vector<double> out;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) {
        throw Error(ErrorCode::config, "bad number '" + item + "' in Young function '" + text + "'");
      }
      out.push_back(v);
    }
    return out;
  };
  if (kind == "power") {
    const auto v = numbers();
    if (v.size() != 1) throw Error(ErrorCode::config, "power Young function takes one argument: " + text);
    return power(v[0]);
  }
  if (kind == "exp_beta") {
    const auto v = numbers();
    if (v.size() != 2) throw Error(ErrorCode::config, "exp_beta takes two arguments: " + text);
    return exp_beta(v[0], v[1]);
  }
  if (kind == "zygmund" && args.empty()) return zygmund();
  throw Error(ErrorCode::config, "unknown Young function '" + text + "'");
}

double YoungFunction::operator()(double s) const {
  if (s > domain_max_) return std::numeric_limits<double>::infinity();
  return eval_(s);
}

double YoungFunction::deriv(double s) const {
  if (s > domain_max_) return std::numeric_limits<double>::infinity();
  return deriv_(s);
}

double YoungFunction::second_deriv(double s) const {
  if (second_) return second_(s);
  const double h = 1e-5 * std::max(s, 1e-3);
  const double lo = std::max(0.0, s - h);
  return (deriv_(s + h) - deriv_(lo)) / (s + h - lo);
}

NFunction::NFunction(std::string label, Eval eval, YoungFunction lower, YoungFunction upper)
    : label_(std::move(label)), eval_(std::move(eval)), lower_(std::move(lower)), upper_(std::move(upper)) {}

NFunction NFunction::from_young(const YoungFunction& m) {
  return NFunction(
      m.label(), [m](double, const Point&, double s) { return m(s); }, m, m);
}

NFunction NFunction::variable_power(const ExponentField& p, double lo, double hi, int dim) {
  const double a = p.min_over(lo, hi, dim);
  const double b = p.max_over(lo, hi, dim);
  if (!(a > 1.0)) throw Error(ErrorCode::invalid_argument, "variable exponent must exceed 1");
  // lower: s^b/b below 1, continued by (s^a - 1)/a + 1/b; upper symmetric.
  // Both continuations match slope 1 at s = 1, so they stay convex.
  YoungFunction lower(
      "variable_power_lower",
      [a, b](double s) { return s <= 1.0 ? std::pow(s, b) / b : (std::pow(s, a) - 1.0) / a + 1.0 / b; },
      [a, b](double s) { return s <= 1.0 ? std::pow(s, b - 1.0) : std::pow(s, a - 1.0); },
      [a, b](double s) { return s <= 1.0 ? (b - 1.0) * std::pow(s, b - 2.0) : (a - 1.0) * std::pow(s, a - 2.0); });
  YoungFunction upper(
      "variable_power_upper",
      [a, b](double s) { return s <= 1.0 ? std::pow(s, a) / a : (std::pow(s, b) - 1.0) / b + 1.0 / a; },
      [a, b](double s) { return s <= 1.0 ? std::pow(s, a - 1.0) : std::pow(s, b - 1.0); },
      [a, b](double s) { return s <= 1.0 ? (a - 1.0) * std::pow(s, a - 2.0) : (b - 1.0) * std::pow(s, b - 2.0); });
  return NFunction(
      "variable_power",
      [p](double t, const Point& x, double s) {
        const double e = p(t, x);
        return std::pow(s, e) / e;
      },
      lower, upper);
}

NFunction NFunction::double_phase(double p, double q, std::function<double(double, const Point&)> a,
                                  double a_max) {
  if (!(p > 1.0) || q < p) throw Error(ErrorCode::invalid_argument, "double phase needs 1 < p <= q");
  YoungFunction lower = YoungFunction::power(p);
  YoungFunction upper(
      "double_phase_upper", [p, q, a_max](double s) { return std::pow(s, p) / p + a_max * std::pow(s, q) / q; },
      [p, q, a_max](double s) { return std::pow(s, p - 1.0) + a_max * std::pow(s, q - 1.0); },
      [p, q, a_max](double s) {
        return (p - 1.0) * std::pow(s, p - 2.0) + a_max * (q - 1.0) * std::pow(s, q - 2.0);
      });
  return NFunction(
      "double_phase",
      [p, q, a](double t, const Point& x, double s) { return std::pow(s, p) / p + a(t, x) * std::pow(s, q) / q; },
      lower, upper);
}

bool AxiomReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; });
}

const AxiomCheck& AxiomReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorCode::invalid_argument, "no axiom check named " + name);
}

AxiomReport check_young_axioms(const YoungFunction& m, int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw Error(ErrorCode::invalid_argument, "sample_count must be >= 1");
  BoxSampler rng(SampleBox{}, seed);
  const double top = std::min(1e3, m.domain_max());

  AxiomCheck positivity{"positivity", std::abs(m(0.0)) <= 1e-15, m(0.0), {0.0}};
  positivity.worst = std::numeric_limits<double>::infinity();
  AxiomCheck convexity{"convexity", true, std::numeric_limits<double>::infinity(), {}};
  AxiomCheck derivative{"derivative", true, 0.0, {}};

  for (int i = 0; i < sample_count; ++i) {
    const double s = rng.log_uniform(1e-3, top);
    const double v = m(s);
    if (v < positivity.worst) positivity = {"positivity", positivity.passed && v > 0.0, v, {s}};
    if (!(v > 0.0)) positivity.passed = false;

    double a = rng.log_uniform(1e-3, top);
    double c = rng.log_uniform(1e-3, top);
    if (a > c) std::swap(a, c);
    const double b = 0.5 * (a + c);
    const double ma = m(a), mb = m(b), mc = m(c);
    if (std::isfinite(ma) && std::isfinite(mb) && std::isfinite(mc)) {
      // scale-free second difference; exact arithmetic would give >= 0
      const double d = (ma - 2.0 * mb + mc) / (std::abs(ma) + std::abs(mc) + 1e-300);
      if (d < convexity.worst) convexity.worst = d, convexity.witness = {a, b, c};
      if (d < -1e-10) convexity.passed = false;
    }

    // step shrinks where m' varies on a scale shorter than s (exp-type growth)
    const double curvature = m.second_deriv(s);
    const double scale = curvature > 0.0 && std::isfinite(curvature) ? std::min(s, m.deriv(s) / curvature) : s;
    const double h = 1e-5 * scale;
    const double fd = (m(s + h) - m(s - h)) / (2.0 * h);
    const double an = m.deriv(s);
    if (std::isfinite(fd) && std::isfinite(an) && s + h <= m.domain_max()) {
      const double rel = std::abs(fd - an) / std::max(std::abs(an), 1e-300);
      if (rel > derivative.worst) derivative.worst = rel, derivative.witness = {s};
      if (rel > 1e-6) derivative.passed = false;
    }
  }

  const double ratio = (m(top) / top) / m(1.0);
  AxiomCheck superlinearity{"superlinearity", !(ratio < 10.0), ratio, {1.0, top}};

  return AxiomReport{{positivity, convexity, superlinearity, derivative}};
}

AxiomReport check_nfunction_bounds(const NFunction& M, int sample_count, const SampleBox& box,
                                   std::uint64_t seed) {
  if (sample_count < 1) throw Error(ErrorCode::invalid_argument, "sample_count must be >= 1");
  BoxSampler rng(box, seed);
  const double top = std::max(box.radius, 10.0);
  AxiomCheck lower{"lower_bound", true, std::numeric_limits<double>::infinity(), {}};
  AxiomCheck upper{"upper_bound", true, std::numeric_limits<double>::infinity(), {}};
  AxiomCheck convexity{"convexity", true, std::numeric_limits<double>::infinity(), {}};
  for (int i = 0; i < sample_count; ++i) {
    const double t = rng.time();
    const Point x = rng.point();
    const double s = rng.log_uniform(1e-3, top);
    const double v = M(t, x, s);
    const double slack = 1e-12 * (1.0 + std::abs(v));
    const double gl = v - M.lower()(s);
    const double gu = M.upper()(s) - v;
    if (gl < lower.worst) lower.worst = gl, lower.witness = {t, x[0], x[1], s};
    if (gu < upper.worst) upper.worst = gu, upper.witness = {t, x[0], x[1], s};
    if (gl < -slack) lower.passed = false;
    if (gu < -slack) upper.passed = false;

    double a = rng.log_uniform(1e-3, top);
    double c = rng.log_uniform(1e-3, top);
    if (a > c) std::swap(a, c);
    const double b = 0.5 * (a + c);
    const double ma = M(t, x, a), mb = M(t, x, b), mc = M(t, x, c);
    const double d = (ma - 2.0 * mb + mc) / (std::abs(ma) + std::abs(mc) + 1e-300);
    if (d < convexity.worst) convexity.worst = d, convexity.witness = {t, x[0], x[1], a, c};
    if (d < -1e-10) convexity.passed = false;
  }
  return AxiomReport{{lower, upper, convexity}};
}

double theta_ratio_diagnostic(const NFunction& M, const SampleBox& box, double delta, double r,
                              int samples, std::uint64_t seed) {
  BoxSampler rng(box, seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = rng.time();
    const Point x = rng.point();
    Point y = x;
    for (int a = 0; a < box.dim; ++a) {
      y[a] = std::clamp(x[a] + rng.uniform(-delta, delta) / std::sqrt(static_cast<double>(box.dim)), box.lo, box.hi);
    }
    const double den = M(t, y, r);
    if (den > 0.0) worst = std::max(worst, M(t, x, r) / den);
  }
  return worst;
}

}  // namespace muslx
