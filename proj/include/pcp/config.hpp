#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcp/cpapr.hpp"
#include "pcp/gcp.hpp"
#include "pcp/synth.hpp"

namespace pcp {

enum class RunMethod { kCpapr, kGcp, kCgc, kSweep };

std::string_view to_string(RunMethod m);
RunMethod parse_run_method(std::string_view name);

/// Everything needed to reproduce one experiment.
///
/// Text form is one `key = value` pair per line; '#' starts a comment and
/// list values are whitespace separated. Keys:
///
///   tensor                     FROSTT file (otherwise problem.* is used)
///   problem.shape              e.g. "50 50 50"
///   problem.rank, problem.nnz, problem.density, problem.seed
///   rank                       decomposition rank (default problem.rank)
///   method                     cpapr | gcp | cgc | sweep
///   starts                     random starts per set (or per sweep pair)
///   seed                       base seed for guesses and solver streams
///   cycles                     CGC cycles (method = cgc)
///   sweep.W, sweep.j           constant-work budget and stochastic budgets
///   baseline.cpapr_starts      extra CPAPR-only set for sweeps
///   baseline.gcp_starts        extra GCP-only set for sweeps
///   report.eps, report.t, report.tau
///   output, threads
///   cpapr.<field>, gcp.<field>                  solver options
///   baseline.cpapr.<field>, baseline.gcp.<field>
///
/// Solver option fields are the member names of CpaprOptions and
/// GcpOptions (checkpoint_rates is a list, exact is true/false).
struct ExperimentConfig {
  std::filesystem::path tensor;
  ProblemSpec problem;
  std::size_t rank = 0;
  RunMethod method = RunMethod::kCpapr;
  std::size_t starts = 10;
  std::uint64_t seed = 1;
  std::size_t cycles = 1;

  long long total_work = 100;
  std::vector<long long> j_values;

  std::size_t baseline_cpapr_starts = 0;
  std::size_t baseline_gcp_starts = 0;

  std::vector<double> report_eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> report_t;  // empty: 0, 0.01, ..., 1
  std::vector<double> report_tau = {0.85, 0.95};

  std::filesystem::path output = "pcp-out";
  std::size_t threads = 1;

  CpaprOptions cpapr;
  GcpOptions gcp;
  CpaprOptions baseline_cpapr = run_to_tolerance_cpapr();
  GcpOptions baseline_gcp = run_to_tolerance_gcp();

  /// Baseline defaults: each method run to its smallest tolerance.
  static CpaprOptions run_to_tolerance_cpapr();
  static GcpOptions run_to_tolerance_gcp();

  /// Decomposition rank, falling back to the problem rank.
  std::size_t effective_rank() const { return rank != 0 ? rank : problem.rank; }

  /// Thresholds for Psi curves: report_t or the default grid.
  std::vector<double> t_grid() const;

  /// Throws InvalidArgument when the configuration is inconsistent.
  void validate() const;
};

/// Applies one `key = value` setting. Throws InvalidArgument on unknown keys
/// or malformed values.
void apply_setting(ExperimentConfig& cfg, std::string_view key,
                   std::string_view value);

/// Parses `key=value` (as given on a command line) and applies it.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Throws ParseError with the offending line.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& cfg);

/// Stable 16-hex-digit digest of the options of one solver.
std::string options_digest(const CpaprOptions& o);
std::string options_digest(const GcpOptions& o);

}  // namespace pcp
