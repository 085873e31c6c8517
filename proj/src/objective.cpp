#include "pcp/objective.hpp"

#include <algorithm>
#include <cmath>

#include "pcp/error.hpp"

namespace pcp {

NllValue poisson_nll(const SparseCountTensor& x, const KruskalModel& m,
                     double eps) {
  check_compatible(x, m);
  const auto mvals = model_at_nonzeros(x, m);
  double log_term = 0.0;
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    log_term += static_cast<double>(x.value(n)) * std::log(std::max(mvals[n], eps));
  }
  return {model_total_sum(m) - log_term, x.num_zeros()};
}

NllGradient poisson_nll_gradient(const SparseCountTensor& x,
                                 const KruskalModel& m, double eps) {
  check_compatible(x, m);
  const std::size_t d = m.ndims();
  const std::size_t rank = m.rank();

  std::vector<std::vector<double>> colsums(d);
  for (std::size_t k = 0; k < d; ++k) colsums[k] = column_norms(m.factor(k), Norm::kOne);

  const auto mvals = model_at_nonzeros(x, m);
  std::vector<double> ratio(x.nnz());
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    ratio[n] = static_cast<double>(x.value(n)) / std::max(mvals[n], eps);
  }

  NllGradient g;
  g.factors.reserve(d);
  for (std::size_t k = 0; k < d; ++k) {
    Matrix phi = mttkrp_masked(x, m, k, ratio);
    Matrix grad(m.factor(k).rows(), rank);
    for (std::size_t r = 0; r < rank; ++r) {
      double others = m.weights()[r];
      for (std::size_t j = 0; j < d; ++j) {
        if (j != k) others *= colsums[j][r];
      }
      for (std::size_t i = 0; i < grad.rows(); ++i) {
        grad(i, r) = others - m.weights()[r] * phi(i, r);
      }
    }
    g.factors.push_back(std::move(grad));
  }

  g.weights.assign(rank, 0.0);
  for (std::size_t r = 0; r < rank; ++r) {
    double p = 1.0;
    for (std::size_t k = 0; k < d; ++k) p *= colsums[k][r];
    g.weights[r] = p;
  }
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto idx = x.subscripts(n);
    for (std::size_t r = 0; r < rank; ++r) {
      double p = ratio[n];
      for (std::size_t k = 0; k < d; ++k) p *= m.factor(k)(idx[k], r);
      g.weights[r] -= p;
    }
  }
  return g;
}

double stochastic_nll_estimate(const SparseCountTensor& x,
                               const KruskalModel& m, const SampleSet& sample,
                               double eps) {
  check_compatible(x, m);
  if (sample.size() == 0) fail(ErrorKind::kEmptySample, "sample has no entries");
  double total = 0.0;
  for (std::size_t s = 0; s < sample.size(); ++s) {
    const double mv = model_entry(m, sample.index(s));
    double loss = mv;
    if (sample.counts[s] != 0) {
      loss -= static_cast<double>(sample.counts[s]) * std::log(std::max(mv, eps));
    }
    total += sample.weights[s] * loss;
  }
  return total;
}

SampleSet enumerate_all_entries(const SparseCountTensor& x) {
  const std::size_t d = x.ndims();
  SampleSet s;
  s.ndims = d;
  SampleSet zeros;
  zeros.ndims = d;
  std::vector<std::size_t> idx(d, 0);
  const std::uint64_t total = x.numel();
  for (std::uint64_t e = 0; e < total; ++e) {
    if (const auto pos = x.find(idx)) {
      s.push(idx, x.value(*pos), 1.0);
    } else {
      zeros.push(idx, 0, 1.0);
    }
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < x.size(k)) break;
      idx[k] = 0;
    }
  }
  s.num_nonzero = s.size();
  s.num_zero = zeros.size();
  s.subs.insert(s.subs.end(), zeros.subs.begin(), zeros.subs.end());
  s.counts.insert(s.counts.end(), zeros.counts.begin(), zeros.counts.end());
  s.weights.insert(s.weights.end(), zeros.weights.begin(), zeros.weights.end());
  return s;
}

}  // namespace pcp
