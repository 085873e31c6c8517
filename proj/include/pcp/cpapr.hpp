#pragma once

#include <cstddef>

#include "pcp/kruskal.hpp"
#include "pcp/sparse_tensor.hpp"
#include "pcp/trace.hpp"

namespace pcp {

struct CpaprOptions {
  /// Outer iterations (one sweep over all modes); one CGC work unit each.
  std::size_t max_outer_iters = 1000;
  /// Multiplicative updates per mode subproblem.
  std::size_t max_inner_iters = 10;
  /// Stop once every mode subproblem has KKT violation <= kkt_tol.
  double kkt_tol = 1e-4;
  /// Guard in x / max(m, eps).
  double eps = 1e-10;
  /// Offset added to inadmissible zeros.
  double kappa = 1e-2;
  /// Entries below this count as zero for the inadmissible-zero test.
  double kappa_tol = 1e-10;

  /// Throws InvalidArgument on non-positive tolerances or negative offsets.
  void validate() const;
};

/// Alternating Poisson regression with multiplicative updates.
///
/// Each outer iteration visits modes 1..d in order. For mode k the weights
/// are pushed into factor k (B = A_k diag(lambda)); entries of B that are
/// (near) zero while the previous iteration's Phi exceeded 1 are raised by
/// kappa; then up to max_inner_iters updates B <- B .* Phi are applied, where
/// Phi = mttkrp_masked(X, M, k, x / max(m, eps)). Because the other factors
/// are kept with unit one-norm columns, 1 - Phi is the subproblem gradient
/// and min(B, 1 - Phi) its KKT residual. Finally the columns of B are
/// renormalized into lambda.
///
/// A zero budget returns `init` untouched with converged = false. The trace
/// has one entry for the starting point and one per outer iteration, each
/// holding the exact NLL. Throws ShapeMismatch, RankMismatch,
/// NonFiniteEncountered.
SolveTrace cpapr_mu(const SparseCountTensor& x, std::size_t rank,
                    const KruskalModel& init, const CpaprOptions& opts);

/// KKT residual of the mode-`mode` subproblem,
///   max_{i,r} |min(B(i,r), grad_B f(i,r))|,
/// evaluated with the model in mode form (other factors at unit one-norm
/// columns, all scale in B). Zero exactly at a KKT point; independent of how
/// the scale of `m` is distributed. Throws ShapeMismatch.
double kkt_violation(const SparseCountTensor& x, const KruskalModel& m,
                     std::size_t mode, double eps = 1e-10);

}  // namespace pcp
