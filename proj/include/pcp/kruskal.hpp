#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcp/matrix.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp {

/// Rank-R CP model [[lambda; A_1, ..., A_d]] of Poisson parameters.
///
/// The constructor checks that all factors share the column count R, that
/// weights has length R, and that every entry is finite and non-negative.
/// Solvers mutate models in place through the non-const accessors and are
/// responsible for keeping entries feasible.
class KruskalModel {
 public:
  KruskalModel() = default;
  KruskalModel(std::vector<double> weights, std::vector<Matrix> factors);

  /// Model of the given shape and rank with every entry set to `fill` and
  /// unit weights.
  static KruskalModel constant(const Shape& shape, std::size_t rank,
                               double fill = 1.0);

  std::size_t rank() const noexcept { return weights_.size(); }
  std::size_t ndims() const noexcept { return factors_.size(); }
  Shape shape() const;

  std::vector<double>& weights() noexcept { return weights_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  Matrix& factor(std::size_t k) { return factors_[k]; }
  const Matrix& factor(std::size_t k) const { return factors_[k]; }
  const std::vector<Matrix>& factors() const noexcept { return factors_; }

  bool operator==(const KruskalModel&) const = default;

 private:
  std::vector<double> weights_;
  std::vector<Matrix> factors_;
};

enum class Norm { kOne, kTwo };

/// Throws ShapeMismatch unless the model dimensions equal the tensor shape.
void check_compatible(const SparseCountTensor& x, const KruskalModel& m);

/// m_idx = sum_r lambda_r prod_k A_k(i_k, r). Throws IndexOutOfBounds.
double model_entry(const KruskalModel& m, std::span<const std::size_t> idx);

/// Sum of the model over every entry of its shape, computed from column sums
/// without materializing the dense tensor.
double model_total_sum(const KruskalModel& m);

/// Model value at each stored nonzero of `x`, in storage order.
std::vector<double> model_at_nonzeros(const SparseCountTensor& x,
                                      const KruskalModel& m);

/// result(i, r) = sum over nonzeros n with i_mode = i of
///   values[n] * prod_{j != mode} A_j(i_j, r).
/// The weights are not applied. Throws LengthMismatch, ShapeMismatch.
Matrix mttkrp_masked(const SparseCountTensor& x, const KruskalModel& m,
                     std::size_t mode, std::span<const double> values);

std::vector<double> column_norms(const Matrix& a, Norm norm);

/// Rescales every factor column to unit norm, absorbing the scale into the
/// weights. Zero columns are left untouched and their weight becomes 0.
KruskalModel normalize_columns(KruskalModel m, Norm norm);

/// Normalizes every factor except `mode` to unit one-norm columns and
/// absorbs all scale (including the weights) into factor `mode`; the
/// weights become 1. The represented tensor is unchanged.
KruskalModel absorb_into_mode(KruskalModel m, std::size_t mode);

}  // namespace pcp
