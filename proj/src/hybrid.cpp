#include "pcp/hybrid.hpp"

#include "pcp/error.hpp"

namespace pcp {

SolveTrace cp_poisson(const SparseCountTensor& x, std::size_t rank,
                      const KruskalModel& init, std::string_view method,
                      const SolverOptions& opts, Rng& rng) {
  if (method == kCpaprMu) {
    const auto* o = std::get_if<CpaprOptions>(&opts);
    if (o == nullptr) {
      fail(ErrorKind::kOptionsTypeMismatch, "cpapr-mu expects CpaprOptions");
    }
    return cpapr_mu(x, rank, init, *o);
  }
  if (method == kGcpAdam) {
    const auto* o = std::get_if<GcpOptions>(&opts);
    if (o == nullptr) {
      fail(ErrorKind::kOptionsTypeMismatch, "gcp-adam expects GcpOptions");
    }
    return gcp_adam(x, rank, init, *o, rng);
  }
  fail(ErrorKind::kUnknownMethod, "unknown method '" + std::string(method) + "'");
}

std::uint64_t stage_seed(std::uint64_t run_seed, std::size_t cycle,
                         Stage stage) {
  return derive_seed(run_seed, {cycle, static_cast<std::uint64_t>(stage)});
}

namespace {

void append_stage(SolveTrace& total, SolveTrace part, std::size_t cycle,
                  Stage stage, const std::string& method,
                  const KruskalModel& initial) {
  const std::size_t offset = total.work_units;
  for (TraceEntry e : part.entries) {
    e.work_units += offset;
    e.cycle = cycle;
    e.stage = stage;
    total.entries.push_back(e);
  }
  for (auto& c : part.checkpoints) {
    c.work_units += offset;
    total.checkpoints.push_back(std::move(c));
  }
  total.work_units += part.work_units;
  total.converged = part.converged;
  total.stages.push_back({cycle, stage, method, part.work_units,
                          part.converged, initial, part.model});
  total.model = std::move(part.model);
}

}  // namespace

SolveTrace cgc(const SparseCountTensor& x, std::size_t rank,
               std::size_t num_cycles, Strategy strat,
               const KruskalModel& init, std::uint64_t run_seed) {
  if (num_cycles == 0 || num_cycles != strat.cycles.size()) {
    fail(ErrorKind::kBudgetOutOfRange,
         "cycle count " + std::to_string(num_cycles) +
             " does not match a strategy of length " +
             std::to_string(strat.cycles.size()));
  }
  SolveTrace total;
  total.model = init;
  for (std::size_t l = 0; l < num_cycles; ++l) {
    const CycleSpec spec = strat.cycles[l];

    Rng s_rng(stage_seed(run_seed, l, Stage::kStochastic));
    const KruskalModel s_init = total.model;
    SolveTrace s = cp_poisson(x, rank, s_init, spec.s_method,
                              SolverOptions(spec.s_opts),
                              s_rng);
    append_stage(total, std::move(s), l, Stage::kStochastic, spec.s_method, s_init);

    Rng d_rng(stage_seed(run_seed, l, Stage::kDeterministic));
    const KruskalModel d_init = total.model;
    SolveTrace det = cp_poisson(
        x, rank, d_init, spec.d_method,
        SolverOptions(spec.d_opts), d_rng);
    append_stage(total, std::move(det), l, Stage::kDeterministic, spec.d_method,
                 d_init);

    if (strat.policy && l + 1 < num_cycles) strat.policy(l, total, strat.cycles);
  }
  return total;
}

Strategy constant_work_strategy(long long total_work, long long stochastic,
                                const GcpOptions& s_opts,
                                const CpaprOptions& d_opts) {
  if (total_work < 0 || stochastic < 0 || stochastic > total_work) {
    fail(ErrorKind::kBudgetOutOfRange,
         "need 0 <= j <= W, got j=" + std::to_string(stochastic) +
             ", W=" + std::to_string(total_work));
  }
  CycleSpec spec;
  spec.s_opts = s_opts;
  spec.d_opts = d_opts;
  spec.s_opts.max_epochs = static_cast<std::size_t>(stochastic);
  spec.d_opts.max_outer_iters = static_cast<std::size_t>(total_work - stochastic);
  Strategy strat;
  strat.cycles.push_back(std::move(spec));
  return strat;
}

}  // namespace pcp
