#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pcp {

using Count = std::int64_t;
using Shape = std::vector<std::size_t>;

/// d-way tensor of non-negative integer counts in coordinate form.
///
/// Subscripts are 0-based and stored contiguously (nnz x d), sorted
/// lexicographically; there are no duplicates and every stored count is
/// strictly positive. Instances are only built through make_sparse, so the
/// invariants hold for every live object.
class SparseCountTensor {
 public:
  SparseCountTensor() = default;

  std::size_t ndims() const noexcept { return shape_.size(); }
  std::size_t size(std::size_t mode) const { return shape_[mode]; }
  const Shape& shape() const noexcept { return shape_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  /// Number of entries (stored and implicit).
  std::uint64_t numel() const noexcept;
  /// Number of implicit zero entries.
  std::uint64_t num_zeros() const noexcept { return numel() - nnz(); }
  /// Sum of all counts.
  Count total_count() const noexcept;

  std::span<const std::size_t> subscripts(std::size_t n) const {
    return {subs_.data() + n * ndims(), ndims()};
  }
  std::size_t subscript(std::size_t n, std::size_t mode) const {
    return subs_[n * ndims() + mode];
  }
  Count value(std::size_t n) const { return values_[n]; }
  std::span<const Count> values() const noexcept { return values_; }

  /// Position of `idx` among the stored nonzeros, if present.
  std::optional<std::size_t> find(std::span<const std::size_t> idx) const;

  bool operator==(const SparseCountTensor&) const = default;

 private:
  friend SparseCountTensor make_sparse(Shape shape,
                                       std::vector<std::size_t> flat_subs,
                                       std::vector<Count> values);

  Shape shape_;
  std::vector<std::size_t> subs_;
  std::vector<Count> values_;
};

/// Builds a canonical tensor from 0-based subscripts given row-major as
/// nnz x d. Throws IndexOutOfBounds, DuplicateCoordinate, NonPositiveValue,
/// LengthMismatch, or InvalidArgument (zero-length mode, empty shape).
SparseCountTensor make_sparse(Shape shape, std::vector<std::size_t> flat_subs,
                              std::vector<Count> values);

SparseCountTensor make_sparse(
    Shape shape, const std::vector<std::vector<std::size_t>>& coords,
    const std::vector<Count>& values);

}  // namespace pcp
