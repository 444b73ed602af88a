#pragma once

#include <muslx/exponent.hpp>
#include <muslx/sampling.hpp>
#include <muslx/types.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace muslx {

/// Constants (B, beta) of the growth bound m(s) <= K exp(B s^{1+beta}).
struct GrowthParams {
  double B = 1.0;
  double beta = 0.5;
};

/// Convex superlinear m : [0, inf) -> [0, inf] with m(0) = 0.
///
/// A finite `domain_max` marks functions that are only known on a bounded
/// range (table-backed conjugates); evaluation beyond it returns +inf.
class YoungFunction {
 public:
  using Scalar = std::function<double(double)>;

  /// Rejects functions that fail m(0) = 0 or are not positive on a few probe
  /// points.
  YoungFunction(std::string label, Scalar eval, Scalar deriv, Scalar second = {},
                std::optional<GrowthParams> growth = std::nullopt,
                double domain_max = std::numeric_limits<double>::infinity());

  /// s^p / p, p > 1.
  static YoungFunction power(double p);
  /// exp(B s^{1+beta}) - 1.
  static YoungFunction exp_beta(double B, double beta);
  /// s^2 log(e + s).
  static YoungFunction zygmund();
  /// "power:p", "exp_beta:B,beta" or "zygmund".
  static YoungFunction parse(const std::string& text);

  double operator()(double s) const;
  double deriv(double s) const;
  /// Analytic when supplied, central difference otherwise.
  double second_deriv(double s) const;

  const std::string& label() const { return label_; }
  const std::optional<GrowthParams>& growth() const { return growth_; }
  double domain_max() const { return domain_max_; }

 private:
  std::string label_;
  Scalar eval_;
  Scalar deriv_;
  Scalar second_;
  std::optional<GrowthParams> growth_;
  double domain_max_;
};

/// Isotropic N-function M(t, x, |xi|) with Young bounds lower <= M <= upper.
class NFunction {
 public:
  using Eval = std::function<double(double, const Point&, double)>;

  NFunction(std::string label, Eval eval, YoungFunction lower, YoungFunction upper);

  /// M = m everywhere.
  static NFunction from_young(const YoungFunction& m);
  /// |xi|^{p(t,x)} / p(t,x) with p bounded over [lo, hi]^dim.
  static NFunction variable_power(const ExponentField& p, double lo, double hi, int dim);
  /// |xi|^p / p + a(t,x) |xi|^q / q, 0 <= a <= a_max.
  static NFunction double_phase(double p, double q, std::function<double(double, const Point&)> a,
                                double a_max);

  double operator()(double t, const Point& x, double s) const { return eval_(t, x, s); }
  const std::string& label() const { return label_; }
  const YoungFunction& lower() const { return lower_; }
  const YoungFunction& upper() const { return upper_; }

 private:
  std::string label_;
  Eval eval_;
  YoungFunction lower_;
  YoungFunction upper_;
};

struct AxiomCheck {
  std::string name;
  bool passed = true;
  double worst = 0.0;              // worst observed value of the checked quantity
  std::vector<double> witness;     // arguments producing `worst`
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;

  bool all_passed() const;
  const AxiomCheck& get(const std::string& name) const;
};

/// Sampled Young axioms: "positivity", "convexity", "superlinearity"
/// (finite proxy: m(s)/s grows by 10x between s = 1 and s = 1e3) and
/// "derivative" (analytic m' against central differences on [1e-3, 1e3]).
AxiomReport check_young_axioms(const YoungFunction& m, int sample_count, std::uint64_t seed = 1);

/// Sampled "lower_bound", "upper_bound" and "convexity" in s.
AxiomReport check_nfunction_bounds(const NFunction& M, int sample_count, const SampleBox& box,
                                   std::uint64_t seed = 1);

/// Largest sampled ratio M(t,x,r) / M(t,y,r) over |x - y| <= delta. A
/// diagnostic for the spatial-regularity condition, not a certificate.
double theta_ratio_diagnostic(const NFunction& M, const SampleBox& box, double delta, double r,
                              int samples, std::uint64_t seed = 1);

}  // namespace muslx
