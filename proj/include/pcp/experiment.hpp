#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "pcp/config.hpp"
#include "pcp/kruskal.hpp"
#include "pcp/metrics.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp {

/// Input of an experiment: the tensor and, for synthetic problems, the
/// model it was sampled from.
struct ExperimentData {
  SparseCountTensor tensor;
  std::optional<KruskalModel> truth;
};

/// Reads cfg.tensor, or generates the synthetic problem from cfg.problem
/// with a stream seeded by problem.seed.
ExperimentData load_data(const ExperimentConfig& cfg);

/// Result sets of a multi-start experiment. The primary set is the one named
/// by cfg.method (G for gcp, C for cpapr, H for cgc and sweep); sweeps may add
/// CPAPR-only and GCP-only baselines. Union order, and hence the tie-break
/// order, is G, C, H.
struct ExperimentResults {
  ResultSet gcp{"G", {}};
  ResultSet cpapr{"C", {}};
  ResultSet hybrid{"H", {}};

  /// Non-empty sets in union order.
  std::vector<const ResultSet*> sets() const;
};

/// Which family of starting points a start belongs to. The primary set of
/// every method shares one family, so e.g. the j = 0 column of a sweep uses
/// the same guesses and seeds as a plain cpapr run with the same base seed.
enum class StartFamily : std::uint64_t { kPrimary = 0, kBaselineCpapr = 1, kBaselineGcp = 2 };

/// Seed of start `n` of a family; it determines the initial guess and every
/// solver stream of that start.
std::uint64_t start_seed(std::uint64_t base_seed, StartFamily family, std::size_t n);

/// Initial guess of the start with the given seed: create_guess scaled to
/// the tensor's total count.
KruskalModel start_guess(const SparseCountTensor& x, std::size_t rank,
                         std::uint64_t run_seed);

/// Runs every start of the experiment on up to cfg.threads workers (0 means
/// one per hardware thread). Records are ordered by their position in the
/// experiment, never by completion, so results do not depend on the worker
/// count. Each record's NLL is recomputed exactly. When `out_dir` is given,
/// each finished start is persisted immediately (its model file plus a line
/// in journal.log) so partial results survive an interrupted run.
ExperimentResults run_multistart(const ExperimentConfig& cfg,
                                 const SparseCountTensor& x,
                                 const std::filesystem::path& out_dir = {});

/// Writes records.csv (the index), models/<run_id>.txt and wall_times.txt.
/// records.csv is a deterministic function of the results; wall times are
/// kept out of it.
void save_results(const std::filesystem::path& dir, const ExperimentResults& r);

/// Inverse of save_results. Throws IoError, ParseError.
ExperimentResults load_results(const std::filesystem::path& dir);

}  // namespace pcp
