#include "pcp/gcp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <utility>

#include "pcp/error.hpp"

namespace pcp {

namespace {

using Clock = std::chrono::steady_clock;

// Relative slack when comparing a decayed learning rate against a
// checkpoint or terminal rate; 1e-3 * 0.1^12 is not exactly 1e-15.
constexpr double kRateSlack = 1e-9;

bool at_or_above(double rate, double level) {
  return rate >= level * (1.0 - kRateSlack);
}

KruskalModel spread_weights(const KruskalModel& init) {
  KruskalModel u = normalize_columns(init, Norm::kTwo);
  const double inv_d = 1.0 / static_cast<double>(u.ndims());
  for (std::size_t r = 0; r < u.rank(); ++r) {
    const double s = std::pow(u.weights()[r], inv_d);
    for (std::size_t k = 0; k < u.ndims(); ++k) {
      Matrix& a = u.factor(k);
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, r) *= s;
    }
    u.weights()[r] = 1.0;
  }
  return u;
}

struct AdamState {
  std::vector<Matrix> first;
  std::vector<Matrix> second;
  std::size_t steps = 0;
};

// Gradient of the sampled objective with respect to every factor; weights
// are assumed to be all ones.
void sampled_gradient(const KruskalModel& u, const SampleSet& sample,
                      double eps, std::vector<Matrix>& grad,
                      std::vector<double>& scratch) {
  const std::size_t d = u.ndims();
  const std::size_t rank = u.rank();
  for (auto& g : grad) std::fill(g.data().begin(), g.data().end(), 0.0);
  scratch.resize(rank);
  for (std::size_t s = 0; s < sample.size(); ++s) {
    const auto idx = sample.index(s);
    double mval = 0.0;
    for (std::size_t r = 0; r < rank; ++r) {
      double p = 1.0;
      for (std::size_t k = 0; k < d; ++k) p *= u.factor(k)(idx[k], r);
      mval += p;
    }
    const double dl =
        sample.weights[s] *
        (1.0 - static_cast<double>(sample.counts[s]) / std::max(mval, eps));
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t r = 0; r < rank; ++r) scratch[r] = dl;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == k) continue;
        const auto row = u.factor(j).row(idx[j]);
        for (std::size_t r = 0; r < rank; ++r) scratch[r] *= row[r];
      }
      auto dst = grad[k].row(idx[k]);
      for (std::size_t r = 0; r < rank; ++r) dst[r] += scratch[r];
    }
  }
}

void adam_step(KruskalModel& u, const std::vector<Matrix>& grad,
               AdamState& state, double rate, const GcpOptions& opts) {
  ++state.steps;
  const double t = static_cast<double>(state.steps);
  const double c1 = 1.0 - std::pow(opts.beta1, t);
  const double c2 = 1.0 - std::pow(opts.beta2, t);
  for (std::size_t k = 0; k < u.ndims(); ++k) {
    const auto g = grad[k].data();
    const auto m1 = state.first[k].data();
    const auto m2 = state.second[k].data();
    const auto a = u.factor(k).data();
    for (std::size_t e = 0; e < a.size(); ++e) {
      m1[e] = opts.beta1 * m1[e] + (1.0 - opts.beta1) * g[e];
      m2[e] = opts.beta2 * m2[e] + (1.0 - opts.beta2) * g[e] * g[e];
      const double step = rate * (m1[e] / c1) / (std::sqrt(m2[e] / c2) + opts.adam_eps);
      a[e] = std::max(0.0, a[e] - step);
    }
  }
}

}  // namespace

void GcpOptions::validate() const {
  if (!(alpha_final > 0.0 && alpha_final <= alpha0)) {
    fail(ErrorKind::kInvalidArgument, "need 0 < alpha_final <= alpha0");
  }
  if (!(decay > 0.0 && decay < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "decay must lie in (0, 1)");
  }
  if (iters_per_epoch == 0) {
    fail(ErrorKind::kInvalidArgument, "iters_per_epoch must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0) || !(eps > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "eps values must be positive");
  }
}

SampleSet sample_stratified(const SparseCountTensor& x, std::size_t s_nz,
                            std::size_t s_z, Rng& rng) {
  if (s_nz == 0 && s_z == 0) {
    fail(ErrorKind::kEmptySample, "both strata have zero samples");
  }
  if (s_nz > 0 && x.nnz() == 0) {
    fail(ErrorKind::kEmptySample, "nonzero samples requested from an empty tensor");
  }
  if (s_z > 0 && x.num_zeros() == 0) {
    fail(ErrorKind::kDegenerateTensor, "tensor has no zero entries to sample");
  }
  const std::size_t d = x.ndims();
  SampleSet s;
  s.ndims = d;
  s.subs.reserve((s_nz + s_z) * d);
  s.counts.reserve(s_nz + s_z);
  s.weights.reserve(s_nz + s_z);

  if (s_nz > 0) {
    const double w = static_cast<double>(x.nnz()) / static_cast<double>(s_nz);
    for (std::size_t i = 0; i < s_nz; ++i) {
      const std::size_t n = rng.index(x.nnz());
      s.push(x.subscripts(n), x.value(n), w);
    }
  }
  if (s_z > 0) {
    const double w =
        static_cast<double>(x.num_zeros()) / static_cast<double>(s_z);
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < s_z; ++i) {
      do {
        for (std::size_t k = 0; k < d; ++k) idx[k] = rng.index(x.size(k));
      } while (x.find(idx).has_value());
      s.push(idx, 0, w);
    }
  }
  s.num_nonzero = s_nz;
  s.num_zero = s_z;
  return s;
}

SolveTrace gcp_adam(const SparseCountTensor& x, std::size_t rank,
                    const KruskalModel& init, const GcpOptions& opts,
                    Rng& rng) {
  opts.validate();
  check_compatible(x, init);
  if (init.rank() != rank) {
    fail(ErrorKind::kRankMismatch, "initial model has rank " +
                                       std::to_string(init.rank()) +
                                       ", requested " + std::to_string(rank));
  }
  const auto start = Clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  SolveTrace trace;
  if (opts.max_epochs == 0) {
    trace.model = init;
    return trace;
  }

  const auto stratum_sizes = [&](std::size_t want_nz, std::size_t want_z,
                                  std::size_t cap) {
    const std::size_t nz = want_nz ? want_nz : std::min<std::size_t>(x.nnz(), cap);
    std::size_t z = want_z ? want_z : nz;
    if (z == 0) z = static_cast<std::size_t>(std::min<std::uint64_t>(x.num_zeros(), cap));
    if (x.num_zeros() == 0) z = 0;
    return std::pair{nz, z};
  };
  const auto [s_nz, s_z] =
      stratum_sizes(opts.samples_nonzero, opts.samples_zero, 1000);
  const auto [f_nz, f_z] =
      stratum_sizes(opts.fit_samples_nonzero, opts.fit_samples_zero, 10000);

  const SampleSet full = opts.exact ? enumerate_all_entries(x) : SampleSet{};
  const SampleSet fit_sample =
      opts.exact ? full : sample_stratified(x, f_nz, f_z, rng);

  KruskalModel u = spread_weights(init);
  const std::size_t d = u.ndims();
  AdamState adam;
  std::vector<Matrix> grad;
  for (std::size_t k = 0; k < d; ++k) {
    adam.first.emplace_back(u.factor(k).rows(), rank);
    adam.second.emplace_back(u.factor(k).rows(), rank);
    grad.emplace_back(u.factor(k).rows(), rank);
  }
  std::vector<double> scratch;

  double rate = opts.alpha0;
  double best = stochastic_nll_estimate(x, u, fit_sample, opts.eps);
  trace.entries.push_back({0, best, !opts.exact, -1.0, rate, elapsed()});

  for (std::size_t epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    const KruskalModel saved_model = u;
    const AdamState saved_adam = adam;
    for (std::size_t it = 0; it < opts.iters_per_epoch; ++it) {
      if (opts.exact) {
        sampled_gradient(u, full, opts.eps, grad, scratch);
      } else {
        const SampleSet sample = sample_stratified(x, s_nz, s_z, rng);
        sampled_gradient(u, sample, opts.eps, grad, scratch);
      }
      adam_step(u, grad, adam, rate, opts);
    }
    const double estimate = stochastic_nll_estimate(x, u, fit_sample, opts.eps);
    if (!std::isfinite(estimate)) {
      fail(ErrorKind::kNonFiniteEncountered,
           "objective estimate became non-finite in epoch " +
               std::to_string(epoch));
    }
    const bool failed = estimate > best;
    if (failed) {
      u = saved_model;
      adam = saved_adam;
    } else {
      best = estimate;
    }
    trace.work_units = epoch;
    trace.entries.push_back({epoch, best, !opts.exact, -1.0, rate, elapsed()});

    if (failed) {
      const double next = rate * opts.decay;
      for (double level : opts.checkpoint_rates) {
        if (at_or_above(rate, level) && !at_or_above(next, level)) {
          trace.checkpoints.push_back(
              {level, epoch, normalize_columns(u, Norm::kOne)});
        }
      }
      rate = next;
      if (!at_or_above(rate, opts.alpha_final)) {
        trace.converged = true;
        break;
      }
    }
  }
  trace.model = normalize_columns(std::move(u), Norm::kOne);
  return trace;
}

}  // namespace pcp
