#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pcp/cpapr.hpp"
#include "pcp/gcp.hpp"
#include "pcp/kruskal.hpp"
#include "pcp/rng.hpp"
#include "pcp/sparse_tensor.hpp"
#include "pcp/trace.hpp"

namespace pcp {

inline constexpr std::string_view kCpaprMu = "cpapr-mu";
inline constexpr std::string_view kGcpAdam = "gcp-adam";

using SolverOptions = std::variant<CpaprOptions, GcpOptions>;

/// Uniform entry point over the registered Poisson CP solvers.
/// `method` is "cpapr-mu" or "gcp-adam"; the options alternative must match.
/// The deterministic solver ignores `rng`. Throws UnknownMethod,
/// OptionsTypeMismatch, plus whatever the solver throws.
SolveTrace cp_poisson(const SparseCountTensor& x, std::size_t rank,
                      const KruskalModel& init, std::string_view method,
                      const SolverOptions& opts, Rng& rng);

struct CycleSpec {
  std::string s_method = std::string(kGcpAdam);
  std::string d_method = std::string(kCpaprMu);
  GcpOptions s_opts;    // s_opts.max_epochs is the stochastic budget j
  CpaprOptions d_opts;  // d_opts.max_outer_iters is the deterministic budget k

  std::size_t stochastic_budget() const { return s_opts.max_epochs; }
  std::size_t deterministic_budget() const { return d_opts.max_outer_iters; }
};

/// Called between cycles with the index of the cycle that just finished,
/// the trace so far, and the strategy, which it may edit for later cycles.
using CyclePolicy =
    std::function<void(std::size_t cycle, const SolveTrace& so_far,
                       std::vector<CycleSpec>& cycles)>;

struct Strategy {
  std::vector<CycleSpec> cycles;
  /// Empty means a static policy: the cycles run exactly as prescribed.
  CyclePolicy policy;
};

/// Seed for the given stage of the given cycle of a run; the stochastic
/// stage of the first cycle is what a standalone stochastic run from the
/// same run seed uses, so the two are directly comparable.
std::uint64_t stage_seed(std::uint64_t run_seed, std::size_t cycle,
                         Stage stage);

/// Cyclic GCP-CPAPR. For each cycle the stochastic method runs from the
/// current model, then the deterministic method refines its output. The
/// returned trace concatenates both stages of every cycle (work units made
/// cumulative, entries tagged with cycle and stage), records each stage in
/// `stages`, and carries the model of the last deterministic stage.
/// `converged` reflects the final stage. Throws BudgetOutOfRange when
/// `num_cycles` differs from the strategy length or is zero.
SolveTrace cgc(const SparseCountTensor& x, std::size_t rank,
               std::size_t num_cycles, Strategy strat,
               const KruskalModel& init, std::uint64_t run_seed);

/// Single-cycle strategy spending j stochastic epochs and W - j
/// deterministic iterations. Throws BudgetOutOfRange unless 0 <= j <= W.
Strategy constant_work_strategy(long long total_work, long long stochastic,
                                const GcpOptions& s_opts = {},
                                const CpaprOptions& d_opts = {});

}  // namespace pcp
