#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pcp/kruskal.hpp"
#include "pcp/matrix.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp {

/// Guard applied as max(m, eps) inside logarithms and divisions.
inline constexpr double kDefaultLogEps = 1e-10;

/// Poisson negative log-likelihood sum(m - x log m), without the constant
/// sum(log x!) term.
struct NllValue {
  double value = 0.0;
  /// Number of zero entries whose contribution (just m) was folded in
  /// analytically through the factored total sum.
  std::uint64_t n_entries_implicit = 0;
};

struct NllGradient {
  std::vector<Matrix> factors;
  std::vector<double> weights;
};

/// Sampled tensor entries with inverse-probability weights, stored flat:
/// entry s has subscripts subs[s*ndims .. s*ndims+ndims). Nonzero-stratum
/// entries come first and carry their true counts; zero-stratum entries
/// follow with count 0.
struct SampleSet {
  std::size_t ndims = 0;
  std::vector<std::size_t> subs;
  std::vector<Count> counts;
  std::vector<double> weights;
  std::size_t num_nonzero = 0;
  std::size_t num_zero = 0;

  std::size_t size() const noexcept { return counts.size(); }
  std::span<const std::size_t> index(std::size_t s) const {
    return {subs.data() + s * ndims, ndims};
  }
  void push(std::span<const std::size_t> idx, Count count, double weight) {
    subs.insert(subs.end(), idx.begin(), idx.end());
    counts.push_back(count);
    weights.push_back(weight);
  }
};

/// Throws ShapeMismatch.
NllValue poisson_nll(const SparseCountTensor& x, const KruskalModel& m,
                     double eps = kDefaultLogEps);

/// Gradient of poisson_nll with respect to every factor entry and weight.
/// The data term uses x / max(m, eps), matching the guarded objective away
/// from the guard. Throws ShapeMismatch.
NllGradient poisson_nll_gradient(const SparseCountTensor& x,
                                 const KruskalModel& m,
                                 double eps = kDefaultLogEps);

/// sum_s w_s (m_s - x_s log max(m_s, eps)); unbiased for poisson_nll when
/// the sample is stratified with inverse-probability weights.
/// Throws EmptySample.
double stochastic_nll_estimate(const SparseCountTensor& x,
                               const KruskalModel& m, const SampleSet& sample,
                               double eps = kDefaultLogEps);

/// Every entry of `x` (zeros included) with unit weight. Only sensible for
/// small tensors; used for exact-gradient runs and tests.
SampleSet enumerate_all_entries(const SparseCountTensor& x);

}  // namespace pcp
