#include "pcp/kruskal.hpp"

#include <cmath>
#include <string>

#include "pcp/error.hpp"

namespace pcp {

KruskalModel::KruskalModel(std::vector<double> weights,
                           std::vector<Matrix> factors)
    : weights_(std::move(weights)), factors_(std::move(factors)) {
  const std::size_t r = weights_.size();
  if (factors_.empty()) fail(ErrorKind::kInvalidModel, "model has no factors");
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (factors_[k].cols() != r) {
      fail(ErrorKind::kInvalidModel,
           "factor " + std::to_string(k + 1) + " has " +
               std::to_string(factors_[k].cols()) + " columns, expected " +
               std::to_string(r));
    }
    for (double v : factors_[k].data()) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        fail(ErrorKind::kInvalidModel,
             "factor " + std::to_string(k + 1) +
                 " has a negative or non-finite entry");
      }
    }
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorKind::kInvalidModel, "negative or non-finite weight");
    }
  }
}

KruskalModel KruskalModel::constant(const Shape& shape, std::size_t rank,
                                    double fill) {
  std::vector<Matrix> factors;
  factors.reserve(shape.size());
  for (std::size_t s : shape) factors.emplace_back(s, rank, fill);
  return KruskalModel(std::vector<double>(rank, 1.0), std::move(factors));
}

Shape KruskalModel::shape() const {
  Shape s;
  s.reserve(factors_.size());
  for (const auto& f : factors_) s.push_back(f.rows());
  return s;
}

void check_compatible(const SparseCountTensor& x, const KruskalModel& m) {
  if (x.ndims() != m.ndims()) {
    fail(ErrorKind::kShapeMismatch,
         "tensor has " + std::to_string(x.ndims()) + " modes, model has " +
             std::to_string(m.ndims()));
  }
  for (std::size_t k = 0; k < x.ndims(); ++k) {
    if (x.size(k) != m.factor(k).rows()) {
      fail(ErrorKind::kShapeMismatch,
           "mode " + std::to_string(k + 1) + ": tensor size " +
               std::to_string(x.size(k)) + ", factor rows " +
               std::to_string(m.factor(k).rows()));
    }
  }
}

double model_entry(const KruskalModel& m, std::span<const std::size_t> idx) {
  if (idx.size() != m.ndims()) {
    fail(ErrorKind::kIndexOutOfBounds, "index arity does not match model");
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= m.factor(k).rows()) {
      fail(ErrorKind::kIndexOutOfBounds,
           "index outside mode " + std::to_string(k + 1));
    }
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < m.rank(); ++r) {
    double p = m.weights()[r];
    for (std::size_t k = 0; k < idx.size(); ++k) p *= m.factor(k)(idx[k], r);
    sum += p;
  }
  return sum;
}

double model_total_sum(const KruskalModel& m) {
  double total = 0.0;
  for (std::size_t r = 0; r < m.rank(); ++r) {
    double p = m.weights()[r];
    for (std::size_t k = 0; k < m.ndims(); ++k) {
      const Matrix& a = m.factor(k);
      double colsum = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) colsum += a(i, r);
      p *= colsum;
    }
    total += p;
  }
  return total;
}

std::vector<double> model_at_nonzeros(const SparseCountTensor& x,
                                      const KruskalModel& m) {
  check_compatible(x, m);
  const std::size_t d = x.ndims();
  const std::size_t rank = m.rank();
  std::vector<double> out(x.nnz());
  std::vector<double> prod(rank);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto idx = x.subscripts(n);
    for (std::size_t r = 0; r < rank; ++r) prod[r] = m.weights()[r];
    for (std::size_t k = 0; k < d; ++k) {
      const auto row = m.factor(k).row(idx[k]);
      for (std::size_t r = 0; r < rank; ++r) prod[r] *= row[r];
    }
    double sum = 0.0;
    for (std::size_t r = 0; r < rank; ++r) sum += prod[r];
    out[n] = sum;
  }
  return out;
}

Matrix mttkrp_masked(const SparseCountTensor& x, const KruskalModel& m,
                     std::size_t mode, std::span<const double> values) {
  check_compatible(x, m);
  if (values.size() != x.nnz()) {
    fail(ErrorKind::kLengthMismatch,
         "expected " + std::to_string(x.nnz()) + " values, got " +
             std::to_string(values.size()));
  }
  if (mode >= x.ndims()) {
    fail(ErrorKind::kInvalidArgument, "mode " + std::to_string(mode) +
                                          " out of range");
  }
  const std::size_t d = x.ndims();
  const std::size_t rank = m.rank();
  Matrix out(x.size(mode), rank);
  std::vector<double> prod(rank);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto idx = x.subscripts(n);
    for (std::size_t r = 0; r < rank; ++r) prod[r] = values[n];
    for (std::size_t k = 0; k < d; ++k) {
      if (k == mode) continue;
      const auto row = m.factor(k).row(idx[k]);
      for (std::size_t r = 0; r < rank; ++r) prod[r] *= row[r];
    }
    auto dst = out.row(idx[mode]);
    for (std::size_t r = 0; r < rank; ++r) dst[r] += prod[r];
  }
  return out;
}

std::vector<double> column_norms(const Matrix& a, Norm norm) {
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    for (std::size_t r = 0; r < a.cols(); ++r) {
      out[r] += norm == Norm::kOne ? std::abs(row[r]) : row[r] * row[r];
    }
  }
  if (norm == Norm::kTwo) {
    for (double& v : out) v = std::sqrt(v);
  }
  return out;
}

KruskalModel normalize_columns(KruskalModel m, Norm norm) {
  for (std::size_t k = 0; k < m.ndims(); ++k) {
    Matrix& a = m.factor(k);
    const auto norms = column_norms(a, norm);
    for (std::size_t r = 0; r < m.rank(); ++r) {
      if (norms[r] == 0.0) {
        m.weights()[r] = 0.0;
        continue;
      }
      m.weights()[r] *= norms[r];
      const double inv = 1.0 / norms[r];
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, r) *= inv;
    }
  }
  return m;
}

KruskalModel absorb_into_mode(KruskalModel m, std::size_t mode) {
  for (std::size_t k = 0; k < m.ndims(); ++k) {
    if (k == mode) continue;
    Matrix& a = m.factor(k);
    const auto norms = column_norms(a, Norm::kOne);
    for (std::size_t r = 0; r < m.rank(); ++r) {
      if (norms[r] == 0.0) {
        m.weights()[r] = 0.0;
        continue;
      }
      m.weights()[r] *= norms[r];
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, r) /= norms[r];
    }
  }
  Matrix& b = m.factor(mode);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    auto row = b.row(i);
    for (std::size_t r = 0; r < m.rank(); ++r) row[r] *= m.weights()[r];
  }
  for (double& w : m.weights()) w = 1.0;
  return m;
}

}  // namespace pcp
