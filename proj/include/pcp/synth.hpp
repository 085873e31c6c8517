#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "pcp/kruskal.hpp"
#include "pcp/rng.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp {

struct ProblemSpec {
  Shape shape;
  std::size_t rank = 1;
  /// Desired number of nonzeros; if zero, `density` is used instead.
  std::size_t target_nnz = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
};

struct Problem {
  KruskalModel truth;
  SparseCountTensor data;
};

/// Random initial guess: uniform (0, 1) factor entries with one-norm
/// normalized columns and equal weights summing to `total` (so the model
/// sums to `total` over the whole tensor).
KruskalModel create_guess(const Shape& shape, std::size_t rank, Rng& rng,
                          double total = 1.0);

/// Low-rank Poisson problem. The truth has one-norm normalized factor
/// columns with uniform entries, a random 20% of each column boosted
/// tenfold so components are distinguishable, and weights drawn uniformly
/// from [0.5, 1.5) and scaled so the expected number of nonzeros of the
/// sampled tensor matches the target. Data are drawn by first sampling the
/// total count N ~ Poisson(sum of the model), then N multinomial index draws
/// (component by weight, then one index per mode by column). Throws
/// InvalidArgument, DensityUnachievable.
Problem create_problem(const ProblemSpec& spec, Rng& rng);

/// Draws a count tensor with independent Poisson(m_idx) entries from
/// `model` using the total-count-then-multinomial decomposition.
SparseCountTensor sample_poisson_tensor(const KruskalModel& model, Rng& rng);

}  // namespace pcp
