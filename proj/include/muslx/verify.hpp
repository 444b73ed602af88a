#pragma once

#include <muslx/grid.hpp>
#include <muslx/noise.hpp>
#include <muslx/solver.hpp>
#include <muslx/truncation.hpp>
#include <muslx/young.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace muslx {

/// Bias constant of the expectation gate, calibrated on the linear OU case by
/// ou_expectation_bias (2.73 at dt = 1e-3) and rounded up.
inline constexpr double kDefaultBiasConstant = 3.0;

struct EnergyOptions {
  double c_bias = kDefaultBiasConstant;
  double stderr_factor = 3.0;
  double newton_tol = NewtonOptions{}.tol;
};

struct EnergyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // lhs - rhs
  double mc_stderr = 0.0;
  int paths = 0;
  double allowance = 0.0;  // stderr_factor * stderr + c_bias * dt + Newton slack
  bool passed = false;
  /// Residual once the scheme's own O(dt) terms are moved to the right; it
  /// only carries Newton error.
  double discrete_residual = 0.0;
  std::vector<std::pair<std::string, double>> breakdown;
};

/// Monte Carlo means of 1/2 E||u(t)||^2 - 1/2 E||u_0||^2 (lhs) and
/// -E int <A, grad u> + 1/2 E int ||h||_HS^2 (rhs) from the ledgers.
EnergyReport energy_residual_expectation(std::span<const PathResult> ensemble, double t_check,
                                         const EnergyOptions& options = {});

/// Single-path truncated identity
///   int G_k(u(t)) - int G_k(u_0) = -int <A, grad T_k(u)> + int <T_k(u), h dW>
///                                   + 1/2 int <T_k'(u), sum_j |h e_j|^2 dbeta_j^2>,
/// the last term through the realized increments. Needs a stored trajectory.
/// `passed` only reflects finiteness; the residual is O(dt).
EnergyReport energy_residual_truncated_pathwise(const PathResult& path, const SolverConfig& config,
                                                const TruncationFamily& k, const WienerDraw& draw);

struct IsometryReport {
  double estimate = 0.0;  // MC mean of ||sum_j int h_j dbeta_j||^2
  double mc_stderr = 0.0;
  double exact = 0.0;     // int_0^T ||h||_HS^2 dt
  int paths = 0;
  bool passed = false;
};

/// Integrals over `steps` left-point increments of (0, T).
IsometryReport ito_isometry_check(const NoiseModel& h, const Domain& domain, double T, int steps, int paths,
                                  std::uint64_t seed);

struct ModularConvergenceReport {
  std::vector<double> lambdas;
  std::vector<std::vector<double>> table;  // table[i][n] = modular((f_n - f) / lambdas[i])
  /// Smallest lambda whose second half of the sequence is non-increasing,
  /// at most 1e-3, and ends at 0 or at most half its starting value.
  std::optional<double> smallest_lambda;
};

ModularConvergenceReport modular_convergence_check(std::span<const GridFunction> sequence,
                                                   const GridFunction& limit, const NFunction& M,
                                                   std::span<const double> lambda_grid);

struct GaussianModularRow {
  double lambda = 0.0;
  bool diverged = false;  // overflow at this resolution
  double estimate = 0.0;  // first `paths` paths
  double mc_stderr = 0.0;
  double doubled = 0.0;   // all 2 * paths paths
  double relative_change = 0.0;
  bool stable = false;    // relative_change <= 0.2
};

struct GaussianModularReport {
  std::vector<GaussianModularRow> rows;
  int paths = 0;
  bool passed() const;
};

/// E int int m(|int_0^t h dW| / lambda) with the stochastic integral on a
/// dt-grid and the trapezoid rule in time. A sampled diagnostic, not a proof.
GaussianModularReport gaussian_modular_finiteness(const NoiseModel& h, const Domain& domain, const YoungFunction& m,
                                                  std::span<const double> lambdas, double T, double dt, int paths,
                                                  std::uint64_t seed);

struct PiecewiseReport {
  double max_gap = 0.0;  // sup over steps of the L^2 gap
  int windows = 0;
  bool passed = false;   // max_gap <= 1e-12
};

/// Whole-horizon solve with config.flux against a chain of window solves,
/// window i using piece_fluxes[i] (config.flux when empty), restarted from
/// the previous window's end state with the same draws.
PiecewiseReport piecewise_consistency(const SolverConfig& config, std::span<const Flux> piece_fluxes = {},
                                      std::uint64_t path_index = 0);

/// a0^2 exp(-2 mu t) + sigma^2 (1 - exp(-2 mu t)) / (2 mu).
double ou_second_moment(double a0, double sigma, double mu, double t);
/// E a_M^2 for a_{m+1} = (a_m + sigma dbeta_m) / (1 + mu dt).
double ou_recurrence_second_moment(double a0, double sigma, double mu, double dt, int steps);
/// Expected residual of the expectation identity for that recurrence.
double ou_expectation_bias(double a0, double sigma, double mu, double dt, int steps);

}  // namespace muslx
