#include "pcp/trace.hpp"

namespace pcp {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kNone: return "none";
    case Stage::kStochastic: return "stochastic";
    case Stage::kDeterministic: return "deterministic";
  }
  return "none";
}

bool same_numerics(const SolveTrace& a, const SolveTrace& b) {
  if (a.model != b.model || a.converged != b.converged ||
      a.work_units != b.work_units || a.entries.size() != b.entries.size() ||
      a.checkpoints.size() != b.checkpoints.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    if (x.work_units != y.work_units || x.nll != y.nll ||
        x.nll_is_estimate != y.nll_is_estimate ||
        x.kkt_violation != y.kkt_violation ||
        x.learning_rate != y.learning_rate) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    if (a.checkpoints[i].learning_rate != b.checkpoints[i].learning_rate ||
        a.checkpoints[i].work_units != b.checkpoints[i].work_units ||
        a.checkpoints[i].model != b.checkpoints[i].model) {
      return false;
    }
  }
  return true;
}

}  // namespace pcp
