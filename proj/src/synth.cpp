#include "pcp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcp/error.hpp"

namespace pcp {

namespace {

// Exact enumeration of the expected nonzero count is used up to this many
// entries; beyond it a uniform Monte-Carlo estimate over entries is used.
constexpr std::uint64_t kExactEnumerationLimit = 20'000'000;
constexpr std::size_t kMonteCarloEntries = 200'000;

void check_shape(const Shape& shape, std::size_t rank) {
  if (shape.empty()) fail(ErrorKind::kInvalidArgument, "shape is empty");
  for (std::size_t s : shape) {
    if (s == 0) fail(ErrorKind::kInvalidArgument, "mode sizes must be positive");
  }
  if (rank == 0) fail(ErrorKind::kInvalidArgument, "rank must be positive");
}

std::uint64_t numel_of(const Shape& shape) {
  std::uint64_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

// Model values (for a model summing to 1) at the entries used to estimate
// the expected number of nonzeros, plus the number of entries each value
// stands for.
struct ProbabilityProfile {
  std::vector<double> p;
  double multiplicity = 1.0;
};

ProbabilityProfile probability_profile(const KruskalModel& unit, Rng& rng) {
  const Shape shape = unit.shape();
  const std::uint64_t numel = numel_of(shape);
  const std::size_t d = shape.size();
  ProbabilityProfile prof;
  std::vector<std::size_t> idx(d, 0);
  if (numel <= kExactEnumerationLimit) {
    prof.p.reserve(numel);
    for (std::uint64_t e = 0; e < numel; ++e) {
      prof.p.push_back(model_entry(unit, idx));
      for (std::size_t k = d; k-- > 0;) {
        if (++idx[k] < shape[k]) break;
        idx[k] = 0;
      }
    }
    return prof;
  }
  prof.p.reserve(kMonteCarloEntries);
  for (std::size_t s = 0; s < kMonteCarloEntries; ++s) {
    for (std::size_t k = 0; k < d; ++k) idx[k] = rng.index(shape[k]);
    prof.p.push_back(model_entry(unit, idx));
  }
  prof.multiplicity = static_cast<double>(numel) / kMonteCarloEntries;
  return prof;
}

double expected_nnz(const ProbabilityProfile& prof, double total) {
  double sum = 0.0;
  for (double p : prof.p) sum += -std::expm1(-total * p);
  return sum * prof.multiplicity;
}

}  // namespace

KruskalModel create_guess(const Shape& shape, std::size_t rank, Rng& rng,
                          double total) {
  check_shape(shape, rank);
  std::vector<Matrix> factors;
  factors.reserve(shape.size());
  for (std::size_t s : shape) {
    Matrix a(s, rank);
    for (double& v : a.data()) v = rng.uniform_positive();
    factors.push_back(std::move(a));
  }
  KruskalModel m(std::vector<double>(rank, 1.0), std::move(factors));
  m = normalize_columns(std::move(m), Norm::kOne);
  for (double& w : m.weights()) w = total / static_cast<double>(rank);
  return m;
}

SparseCountTensor sample_poisson_tensor(const KruskalModel& model, Rng& rng) {
  const Shape shape = model.shape();
  const std::size_t d = shape.size();
  const std::size_t rank = model.rank();

  // Split the model into per-component index distributions.
  std::vector<double> component_mass(rank);
  std::vector<std::vector<std::discrete_distribution<std::size_t>>> rows(d);
  for (std::size_t r = 0; r < rank; ++r) {
    double mass = model.weights()[r];
    for (std::size_t k = 0; k < d; ++k) {
      const Matrix& a = model.factor(k);
      std::vector<double> col(a.rows());
      for (std::size_t i = 0; i < a.rows(); ++i) col[i] = a(i, r);
      const double colsum = std::accumulate(col.begin(), col.end(), 0.0);
      mass *= colsum;
      if (colsum == 0.0) col.assign(col.size(), 1.0);
      rows[k].emplace_back(col.begin(), col.end());
    }
    component_mass[r] = mass;
  }
  const double total = std::accumulate(component_mass.begin(),
                                       component_mass.end(), 0.0);
  if (total <= 0.0) return make_sparse(shape, std::vector<std::size_t>{}, {});

  const auto draws = std::poisson_distribution<long long>(total)(rng.engine());
  std::discrete_distribution<std::size_t> pick_component(component_mass.begin(),
                                                         component_mass.end());
  std::unordered_map<std::uint64_t, Count> counts;
  for (long long n = 0; n < draws; ++n) {
    const std::size_t r = pick_component(rng.engine());
    std::uint64_t linear = 0;
    for (std::size_t k = 0; k < d; ++k) {
      linear = linear * shape[k] + rows[k][r](rng.engine());
    }
    ++counts[linear];
  }

  std::vector<std::pair<std::uint64_t, Count>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> subs(sorted.size() * d);
  std::vector<Count> values(sorted.size());
  for (std::size_t n = 0; n < sorted.size(); ++n) {
    std::uint64_t linear = sorted[n].first;
    for (std::size_t k = d; k-- > 0;) {
      subs[n * d + k] = static_cast<std::size_t>(linear % shape[k]);
      linear /= shape[k];
    }
    values[n] = sorted[n].second;
  }
  return make_sparse(shape, std::move(subs), std::move(values));
}

Problem create_problem(const ProblemSpec& spec, Rng& rng) {
  check_shape(spec.shape, spec.rank);
  const std::uint64_t numel = numel_of(spec.shape);
  double target = static_cast<double>(spec.target_nnz);
  if (spec.target_nnz == 0) {
    if (!(spec.density > 0.0 && spec.density <= 1.0)) {
      fail(ErrorKind::kInvalidArgument, "density must lie in (0, 1]");
    }
    target = spec.density * static_cast<double>(numel);
  }
  if (target < 1.0) {
    fail(ErrorKind::kDensityUnachievable,
         "target implies fewer than one expected count");
  }
  if (target >= static_cast<double>(numel)) {
    fail(ErrorKind::kDensityUnachievable,
         "target of " + std::to_string(target) + " nonzeros needs a fully "
         "dense tensor of " + std::to_string(numel) + " entries");
  }

  const std::size_t d = spec.shape.size();
  std::vector<Matrix> factors;
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t rows = spec.shape[k];
    Matrix a(rows, spec.rank);
    const std::size_t boosted = std::max<std::size_t>(1, (rows + 4) / 5);
    std::vector<std::size_t> order(rows);
    for (std::size_t r = 0; r < spec.rank; ++r) {
      for (std::size_t i = 0; i < rows; ++i) a(i, r) = rng.uniform_positive();
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), rng.engine());
      for (std::size_t i = 0; i < boosted; ++i) a(order[i], r) *= 10.0;
    }
    factors.push_back(std::move(a));
  }
  std::vector<double> weights(spec.rank);
  for (double& w : weights) w = 0.5 + rng.uniform();
  KruskalModel truth = normalize_columns(
      KruskalModel(std::move(weights), std::move(factors)), Norm::kOne);
  const double wsum = std::accumulate(truth.weights().begin(),
                                      truth.weights().end(), 0.0);
  for (double& w : truth.weights()) w /= wsum;

  // Bisection on the total expected count T: E[nnz](T) is increasing.
  const ProbabilityProfile prof = probability_profile(truth, rng);
  double lo = 0.0;
  double hi = target;
  while (expected_nnz(prof, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e18) {
      fail(ErrorKind::kDensityUnachievable, "target nonzero count not reachable");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (expected_nnz(prof, mid) < target ? lo : hi) = mid;
  }
  for (double& w : truth.weights()) w *= hi;

  SparseCountTensor data = sample_poisson_tensor(truth, rng);
  return {std::move(truth), std::move(data)};
}

}  // namespace pcp
