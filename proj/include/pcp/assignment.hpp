#pragma once

#include <cstddef>
#include <vector>

#include "pcp/matrix.hpp"

namespace pcp {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
/// with row/column potentials, O(n^3)). Returns `col_of_row` with
/// col_of_row[i] = column matched to row i.
std::vector<std::size_t> min_cost_assignment(const Matrix& cost);

/// Maximum-weight perfect assignment; same return convention.
std::vector<std::size_t> max_weight_assignment(const Matrix& weight);

}  // namespace pcp
