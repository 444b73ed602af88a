#pragma once

#include <muslx/solver.hpp>
#include <muslx/verify.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace muslx {

/// Exit statuses shared by every subcommand.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_runtime = 3 };

/// Parsed experiment description. `raw` keeps the JSON for the report.
struct ExperimentConfig {
  SolverConfig solver;
  /// Flux restricted to each time piece of a piecewise exponent.
  std::vector<Flux> piece_fluxes;
  /// Per-mode amplitudes when the noise is a diagonal sine-mode model.
  std::vector<double> noise_amplitudes;
  bool fixed_point = false;
  FixedPointOptions fixed_point_options;
  nlohmann::json checks = nlohmann::json::object();
  std::filesystem::path output_dir = "out";
  bool write_trajectory = false;
  int ledger_stride = 0;  // 0: every step up to 32 paths, endpoints only beyond
  nlohmann::json raw;
};

/// Throws Error(config) naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

struct CliOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<std::filesystem::path> out;
  bool quiet = false;
};

int run_command(const std::filesystem::path& config_path, const CliOptions& options, std::ostream& out,
                std::ostream& err);
/// dial is "eps" or "modes".
int cascade_command(const std::filesystem::path& config_path, const std::string& dial,
                    const std::vector<std::string>& values, const CliOptions& options, std::ostream& out,
                    std::ostream& err);
int conjugate_table_command(const std::string& young_name, const CliOptions& options, std::ostream& out,
                            std::ostream& err);
/// Re-runs the energy check on a directory written by run_command.
int verify_command(const std::filesystem::path& run_dir, const CliOptions& options, std::ostream& out,
                   std::ostream& err);

/// Node coordinates followed by the value, one node per line.
void write_field_csv(const GridFunction& u, std::ostream& out);
GridFunction read_field_csv(const Domain& domain, std::istream& in);

}  // namespace muslx
