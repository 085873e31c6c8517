#pragma once

#include <cstddef>
#include <vector>

#include "pcp/kruskal.hpp"
#include "pcp/objective.hpp"
#include "pcp/rng.hpp"
#include "pcp/sparse_tensor.hpp"
#include "pcp/trace.hpp"

namespace pcp {

struct GcpOptions {
  double alpha0 = 1e-3;
  double alpha_final = 1e-15;
  /// Learning-rate factor applied after an epoch that failed to improve the
  /// estimated objective.
  double decay = 0.1;
  std::size_t iters_per_epoch = 100;
  /// Gradient sample sizes per stratum; 0 selects min(nnz, 1000) nonzeros
  /// and as many zeros.
  std::size_t samples_nonzero = 0;
  std::size_t samples_zero = 0;
  /// Objective-estimate sample sizes; 0 selects min(nnz, 10000) nonzeros and
  /// as many zeros. Drawn once per solve.
  std::size_t fit_samples_nonzero = 0;
  std::size_t fit_samples_zero = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Epoch budget; one CGC work unit per epoch.
  std::size_t max_epochs = 1000;
  std::vector<double> checkpoint_rates = {1e-3, 1e-9, 1e-15};
  /// Guard in log(max(m, eps)) and x / max(m, eps).
  double eps = 1e-10;
  /// Use every tensor entry (unit weights) for gradients and estimates
  /// instead of sampling. Only for small tensors.
  bool exact = false;

  /// Throws InvalidArgument when the invariants
  /// 0 < alpha_final <= alpha0, 0 < decay < 1, iters_per_epoch > 0 fail.
  void validate() const;
};

/// Stratified sample: s_nz nonzeros drawn uniformly with replacement
/// (weight nnz / s_nz each) and s_z zero positions drawn by uniform rejection
/// against the nonzero set (weight num_zeros / s_z each).
/// Throws EmptySample (both sizes zero, or nonzeros requested from an empty
/// tensor) and DegenerateTensor (zeros requested but none exist).
SampleSet sample_stratified(const SparseCountTensor& x, std::size_t s_nz,
                            std::size_t s_z, Rng& rng);

/// Stochastic all-at-once fit with Adam.
///
/// Epochs of iters_per_epoch Adam steps on stratified-sample gradients, each
/// step followed by projection onto the non-negative orthant. After every
/// epoch the objective is estimated on a fixed sample; if it got worse the
/// epoch is undone (model and Adam state) and the learning rate is multiplied
/// by `decay`. The run ends when the rate drops below alpha_final
/// (converged = true) or the epoch budget is spent. Whenever the rate drops
/// below a checkpoint rate the current model is snapshotted.
///
/// During the solve the weights are spread evenly over the factors and held
/// at 1; the returned model is one-norm normalized. A zero budget returns
/// `init` untouched. Throws ShapeMismatch, RankMismatch,
/// NonFiniteEncountered.
SolveTrace gcp_adam(const SparseCountTensor& x, std::size_t rank,
                    const KruskalModel& init, const GcpOptions& opts,
                    Rng& rng);

}  // namespace pcp
