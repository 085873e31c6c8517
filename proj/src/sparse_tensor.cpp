#include "pcp/sparse_tensor.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pcp/error.hpp"

namespace pcp {

namespace {

std::string format_index(std::span<const std::size_t> idx) {
  std::string s = "(";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k > 0) s += ",";
    s += std::to_string(idx[k] + 1);
  }
  return s + ")";
}

}  // namespace

std::uint64_t SparseCountTensor::numel() const noexcept {
  std::uint64_t n = 1;
  for (std::size_t s : shape_) n *= s;
  return n;
}

Count SparseCountTensor::total_count() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), Count{0});
}

std::optional<std::size_t> SparseCountTensor::find(
    std::span<const std::size_t> idx) const {
  const std::size_t d = ndims();
  std::size_t lo = 0;
  std::size_t hi = nnz();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto s = subscripts(mid);
    if (std::lexicographical_compare(s.begin(), s.end(), idx.begin(),
                                     idx.begin() + d)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < nnz() && std::equal(idx.begin(), idx.begin() + d,
                               subscripts(lo).begin())) {
    return lo;
  }
  return std::nullopt;
}

SparseCountTensor make_sparse(Shape shape, std::vector<std::size_t> flat_subs,
                              std::vector<Count> values) {
  const std::size_t d = shape.size();
  if (d == 0) fail(ErrorKind::kInvalidArgument, "tensor must have >= 1 mode");
  for (std::size_t s : shape) {
    if (s == 0) fail(ErrorKind::kInvalidArgument, "mode sizes must be positive");
  }
  const std::size_t nnz = values.size();
  if (flat_subs.size() != nnz * d) {
    fail(ErrorKind::kLengthMismatch,
         "subscript count does not match number of values");
  }
  for (std::size_t n = 0; n < nnz; ++n) {
    const std::span<const std::size_t> idx(flat_subs.data() + n * d, d);
    for (std::size_t k = 0; k < d; ++k) {
      if (idx[k] >= shape[k]) {
        fail(ErrorKind::kIndexOutOfBounds,
             "index " + format_index(idx) + " outside mode " +
                 std::to_string(k + 1) + " of size " +
                 std::to_string(shape[k]));
      }
    }
    if (values[n] <= 0) {
      fail(ErrorKind::kNonPositiveValue,
           "count " + std::to_string(values[n]) + " at " + format_index(idx));
    }
  }

  std::vector<std::size_t> perm(nnz);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const auto key = [&](std::size_t n) {
    return std::span<const std::size_t>(flat_subs.data() + n * d, d);
  };
  const bool sorted = std::is_sorted(
      perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        const auto ka = key(a);
        const auto kb = key(b);
        return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(),
                                            kb.end());
      });
  if (!sorted) {
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) {
                       const auto ka = key(a);
                       const auto kb = key(b);
                       return std::lexicographical_compare(
                           ka.begin(), ka.end(), kb.begin(), kb.end());
                     });
  }

  SparseCountTensor t;
  t.shape_ = std::move(shape);
  t.subs_.resize(nnz * d);
  t.values_.resize(nnz);
  for (std::size_t n = 0; n < nnz; ++n) {
    const auto src = key(perm[n]);
    std::copy(src.begin(), src.end(), t.subs_.begin() + n * d);
    t.values_[n] = values[perm[n]];
    if (n > 0 && std::equal(src.begin(), src.end(),
                            t.subs_.begin() + (n - 1) * d)) {
      fail(ErrorKind::kDuplicateCoordinate,
           "duplicate coordinate " + format_index(src));
    }
  }
  return t;
}

SparseCountTensor make_sparse(
    Shape shape, const std::vector<std::vector<std::size_t>>& coords,
    const std::vector<Count>& values) {
  if (coords.size() != values.size()) {
    fail(ErrorKind::kLengthMismatch, "coords and values differ in length");
  }
  std::vector<std::size_t> flat;
  flat.reserve(coords.size() * shape.size());
  for (const auto& c : coords) {
    if (c.size() != shape.size()) {
      fail(ErrorKind::kLengthMismatch,
           "coordinate arity does not match tensor order");
    }
    flat.insert(flat.end(), c.begin(), c.end());
  }
  return make_sparse(std::move(shape), std::move(flat), values);
}

}  // namespace pcp
