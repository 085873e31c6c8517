#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pcp/kruskal.hpp"

namespace pcp {

enum class Stage { kNone, kStochastic, kDeterministic };

std::string_view to_string(Stage stage);

/// One progress record. CPAPR-MU writes one per outer iteration (plus the
/// starting point), GCP-Adam one per epoch (plus the starting point).
struct TraceEntry {
  std::size_t work_units = 0;  // cumulative within the owning trace
  double nll = 0.0;
  bool nll_is_estimate = false;
  double kkt_violation = -1.0;  // negative when not computed
  double learning_rate = 0.0;   // zero for deterministic solvers
  double seconds = 0.0;         // wall time since the solve started
  std::size_t cycle = 0;
  Stage stage = Stage::kNone;
};

/// Snapshot of a stochastic run: the model that was current when the
/// learning rate dropped below `learning_rate` (or at termination).
struct Checkpoint {
  double learning_rate = 0.0;
  std::size_t work_units = 0;
  KruskalModel model;
};

/// One stage of a hybrid run.
struct StageRecord {
  std::size_t cycle = 0;
  Stage stage = Stage::kNone;
  std::string method;
  std::size_t work_units = 0;
  bool converged = false;
  KruskalModel initial;
  KruskalModel final;
};

struct SolveTrace {
  std::vector<TraceEntry> entries;
  bool converged = false;
  std::size_t work_units = 0;
  KruskalModel model;
  std::vector<Checkpoint> checkpoints;
  std::vector<StageRecord> stages;
};

/// True when both traces carry the same model, work, convergence flag,
/// checkpoints and per-entry numbers; wall times are ignored.
bool same_numerics(const SolveTrace& a, const SolveTrace& b);

}  // namespace pcp
