#pragma once

#include <muslx/flux.hpp>
#include <muslx/grid.hpp>
#include <muslx/noise.hpp>
#include <muslx/wiener.hpp>
#include <muslx/young.hpp>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace muslx {

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int max_halvings = 30;
};

struct StepStats {
  int iterations = 0;
  double residual = 0.0;  // L^2 norm of the strong residual at exit
};

/// Backward Euler solve of u - dt div A(t_next, x, grad u) = rhs. Keeps the
/// sparsity analysis of the Newton matrix between calls, so one stepper
/// should serve a whole path. Not thread-safe.
class ImplicitStepper {
 public:
  ImplicitStepper(const Domain& domain, NewtonOptions options);
  ~ImplicitStepper();
  ImplicitStepper(ImplicitStepper&&) noexcept;
  ImplicitStepper& operator=(ImplicitStepper&&) noexcept;

  /// Overwrites `u` (initial guess on entry) with the solution. Convergence
  /// means residual <= tol * (1 + reference_norm).
  StepStats solve(const Flux& A, double t_next, double dt, std::span<const double> rhs, double reference_norm,
                  std::vector<double>& u);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GridFunction step_implicit(const GridFunction& u_prev, double t_next, double dt, const Flux& A,
                           const GridFunction& forcing, const NewtonOptions& options = {});

/// Weak residual <u, v> + dt <A(grad u), grad v> - <rhs, v>.
double weak_residual(const GridFunction& u, const GridFunction& rhs, double t_next, double dt, const Flux& A,
                     const GridFunction& v);

struct SolverConfig {
  Domain domain{1, 64};
  Flux flux = linear_flux();
  NoiseModel noise = NoiseModel::zero();
  std::optional<GridFunction> initial;  // zero when absent
  double horizon = 1.0;                 // length of the solved window
  double dt = 1e-3;
  double eps = 0.0;
  std::optional<YoungFunction> eps_young;  // m in the eps-regularization
  NewtonOptions newton;
  int paths = 1;
  std::uint64_t seed = 0;
  /// Global index of the first step; the window starts at t = start_step * dt.
  std::int64_t start_step = 0;
  bool store_trajectory = false;

  int steps() const;
  double start_time() const { return static_cast<double>(start_step) * dt; }
  GridFunction initial_state() const;
  Flux effective_flux() const;
  /// Throws invalid_argument or misaligned_breakpoint.
  void validate() const;
};

/// Row m describes the state after step m; accumulators start at 0 on row 0.
struct LedgerRow {
  std::int64_t step = 0;
  double t = 0.0;
  double norm_sq = 0.0;
  double dissipation_acc = 0.0;  // sum dt <A(grad u^{m+1}), grad u^{m+1}>
  double hs_acc = 0.0;           // sum dt ||h(t_m, u^m)||_HS^2
  double stoch_acc = 0.0;        // sum <u^m, xi_m>
  double numdiss_acc = 0.0;      // sum 1/2 ||u^{m+1} - u^m - xi_m||^2
  double qv_acc = 0.0;           // sum ||xi_m||^2
};

struct PathResult {
  explicit PathResult(const Domain& domain) : initial(domain), final_state(domain) {}

  std::uint64_t path_index = 0;
  double dt = 0.0;
  std::vector<LedgerRow> ledger;
  std::vector<GridFunction> trajectory;  // u^0..u^M when stored
  GridFunction initial;
  GridFunction final_state;
  int newton_iterations = 0;
  double max_newton_residual = 0.0;
};

/// One Euler-Maruyama path driven by `draw`. With `frozen` nonempty the noise
/// at step m is h(t_m, frozen[m]) instead of h(t_m, u^m).
PathResult solve_with_draw(const SolverConfig& config, const WienerDraw& draw,
                           std::span<const GridFunction> frozen = {});
WienerDraw draw_for(const SolverConfig& config, std::uint64_t path_index);
PathResult solve_path(const SolverConfig& config, std::uint64_t path_index);
/// Paths 0..paths-1, in index order whatever the thread count.
std::vector<PathResult> solve_ensemble(const SolverConfig& config);

struct FixedPointOptions {
  double alpha = 10.0;
  double tol = 1e-8;
  int max_iter = 50;
};

struct FixedPointResult {
  explicit FixedPointResult(const Domain& domain) : path(domain) {}

  PathResult path;
  int iterations = 0;
  /// defects[k] = sup_m exp(-alpha (t_m - t_0)) ||S_{k+1}(t_m) - S_k(t_m)||.
  std::vector<double> defects;
  /// Largest defects[k] / defects[k-1] over defects above roundoff (0 if none).
  double max_ratio = 0.0;
};

/// Picard iteration on whole paths with one shared draw, starting from the
/// constant path S_0 = u^0. `iterations` is the k whose iterate S_k already
/// moved by at most tol; the returned path is S_{k+1}.
FixedPointResult solve_multiplicative(const SolverConfig& config, std::uint64_t path_index = 0,
                                      const FixedPointOptions& options = {});

struct CascadeRow {
  double value = 0.0;
  std::optional<double> lhs;  // MC mean of sup_m ||u_i - u_{i-1}||^2
  std::optional<double> lhs_stderr;
  std::optional<double> rhs;  // int ||h^{N_{i-1}} - h^{N_i}||_HS^2 (modes dial)
  std::optional<double> ratio;
};

struct CascadeTable {
  std::string dial;
  std::vector<CascadeRow> rows;

  void write_csv(std::ostream& out) const;
};

/// eps_list non-increasing; needs config.eps_young whenever some eps > 0.
CascadeTable epsilon_cascade(const SolverConfig& config, std::span<const double> eps_list);
/// N_list non-decreasing, each N <= config.noise.modes().
CascadeTable noise_mode_cascade(const SolverConfig& config, std::span<const int> modes);

}  // namespace muslx
