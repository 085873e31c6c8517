#include "pcp/cpapr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "pcp/error.hpp"
#include "pcp/objective.hpp"

namespace pcp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Rows of the Khatri-Rao product of every factor but `mode`, one per
// nonzero: pi(n, r) = prod_{j != mode} A_j(i_j, r).
Matrix nonzero_khatri_rao(const SparseCountTensor& x, const KruskalModel& m,
                          std::size_t mode) {
  const std::size_t rank = m.rank();
  Matrix pi(x.nnz(), rank, 1.0);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto idx = x.subscripts(n);
    auto dst = pi.row(n);
    for (std::size_t k = 0; k < x.ndims(); ++k) {
      if (k == mode) continue;
      const auto row = m.factor(k).row(idx[k]);
      for (std::size_t r = 0; r < rank; ++r) dst[r] *= row[r];
    }
  }
  return pi;
}

// phi(i, r) = sum_{n: i_mode = i} x_n / max(m_n, eps) * pi(n, r), with
// m_n = sum_r b(i_mode, r) pi(n, r).
void compute_phi(const SparseCountTensor& x, std::size_t mode, const Matrix& b,
                 const Matrix& pi, double eps, Matrix& phi) {
  const std::size_t rank = b.cols();
  std::fill(phi.data().begin(), phi.data().end(), 0.0);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const std::size_t i = x.subscript(n, mode);
    const auto brow = b.row(i);
    const auto prow = pi.row(n);
    double mval = 0.0;
    for (std::size_t r = 0; r < rank; ++r) mval += brow[r] * prow[r];
    const double v = static_cast<double>(x.value(n)) / std::max(mval, eps);
    auto dst = phi.row(i);
    for (std::size_t r = 0; r < rank; ++r) dst[r] += v * prow[r];
  }
}

// NLL of the full model with factor `mode` replaced by b (other factors as in
// m, weights folded into b).
double subproblem_nll(const SparseCountTensor& x, std::size_t mode,
                      const KruskalModel& m, const Matrix& b, const Matrix& pi,
                      double eps) {
  const std::size_t rank = b.cols();
  std::vector<double> others(rank, 1.0);
  for (std::size_t j = 0; j < m.ndims(); ++j) {
    if (j == mode) continue;
    const auto sums = column_norms(m.factor(j), Norm::kOne);
    for (std::size_t r = 0; r < rank; ++r) others[r] *= sums[r];
  }
  const auto bsum = column_norms(b, Norm::kOne);
  double f = 0.0;
  for (std::size_t r = 0; r < rank; ++r) f += bsum[r] * others[r];
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const auto brow = b.row(x.subscript(n, mode));
    const auto prow = pi.row(n);
    double mval = 0.0;
    for (std::size_t r = 0; r < rank; ++r) mval += brow[r] * prow[r];
    f -= static_cast<double>(x.value(n)) * std::log(std::max(mval, eps));
  }
  return f;
}

double mu_kkt(const Matrix& b, const Matrix& phi) {
  double worst = 0.0;
  const auto bd = b.data();
  const auto pd = phi.data();
  for (std::size_t e = 0; e < bd.size(); ++e) {
    worst = std::max(worst, std::abs(std::min(bd[e], 1.0 - pd[e])));
  }
  return worst;
}

}  // namespace

void CpaprOptions::validate() const {
  if (!(kkt_tol > 0.0)) fail(ErrorKind::kInvalidArgument, "kkt_tol must be positive");
  if (!(eps > 0.0)) fail(ErrorKind::kInvalidArgument, "eps must be positive");
  if (!(kappa >= 0.0)) fail(ErrorKind::kInvalidArgument, "kappa must be non-negative");
  if (!(kappa_tol >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "kappa_tol must be non-negative");
  }
}

SolveTrace cpapr_mu(const SparseCountTensor& x, std::size_t rank,
                    const KruskalModel& init, const CpaprOptions& opts) {
  opts.validate();
  check_compatible(x, init);
  if (init.rank() != rank) {
    fail(ErrorKind::kRankMismatch, "initial model has rank " +
                                       std::to_string(init.rank()) +
                                       ", requested " + std::to_string(rank));
  }

  SolveTrace trace;
  const auto start = Clock::now();
  if (opts.max_outer_iters == 0) {
    trace.model = init;
    trace.entries.push_back({0, poisson_nll(x, init).value, false, -1.0, 0.0,
                             seconds_since(start)});
    return trace;
  }

  const std::size_t d = x.ndims();
  KruskalModel m = normalize_columns(init, Norm::kOne);
  trace.entries.push_back({0, poisson_nll(x, m).value, false, -1.0, 0.0,
                           seconds_since(start)});

  std::vector<Matrix> phi;
  phi.reserve(d);
  for (std::size_t k = 0; k < d; ++k) phi.emplace_back(x.size(k), rank);
  std::vector<double> mode_kkt(d, 0.0);

  for (std::size_t iter = 1; iter <= opts.max_outer_iters; ++iter) {
    bool converged = true;
    for (std::size_t k = 0; k < d; ++k) {
      Matrix& a = m.factor(k);
      bool shifted = false;
      Matrix unshifted;
      if (iter > 1) {
        const auto ad = a.data();
        const auto pd = phi[k].data();
        for (std::size_t e = 0; e < ad.size(); ++e) {
          if (pd[e] > 1.0 && ad[e] < opts.kappa_tol && opts.kappa > 0.0) {
            if (!shifted) unshifted = a;
            shifted = true;
            ad[e] += opts.kappa;
          }
        }
      }

      auto scale_rows = [&](Matrix& b) {
        for (std::size_t i = 0; i < b.rows(); ++i) {
          auto row = b.row(i);
          for (std::size_t r = 0; r < rank; ++r) row[r] *= m.weights()[r];
        }
      };
      scale_rows(a);

      const Matrix pi = nonzero_khatri_rao(x, m, k);
      auto run_inner = [&](Matrix& b) {
        bool first_ok = true;
        for (std::size_t inner = 0; inner < opts.max_inner_iters; ++inner) {
          compute_phi(x, k, b, pi, opts.eps, phi[k]);
          mode_kkt[k] = mu_kkt(b, phi[k]);
          if (mode_kkt[k] <= opts.kkt_tol) break;
          if (inner == 0) first_ok = false;
          const auto bd = b.data();
          const auto pd = phi[k].data();
          for (std::size_t e = 0; e < bd.size(); ++e) bd[e] *= pd[e];
        }
        return first_ok;
      };
      bool mode_ok = run_inner(a);
      if (shifted) {
        // Keep the shift only if it did not cost descent; otherwise redo the
        // inner iterations from the unshifted factor.
        scale_rows(unshifted);
        if (subproblem_nll(x, k, m, a, pi, opts.eps) >
            subproblem_nll(x, k, m, unshifted, pi, opts.eps)) {
          a = std::move(unshifted);
          mode_ok = run_inner(a);
        }
      }
      if (!mode_ok) converged = false;

      const auto sums = column_norms(a, Norm::kOne);
      for (std::size_t r = 0; r < rank; ++r) {
        m.weights()[r] = sums[r];
        if (sums[r] == 0.0) continue;
        for (std::size_t i = 0; i < a.rows(); ++i) a(i, r) /= sums[r];
      }
    }

    const double nll = poisson_nll(x, m).value;
    if (!std::isfinite(nll)) {
      fail(ErrorKind::kNonFiniteEncountered,
           "NLL became non-finite at outer iteration " + std::to_string(iter));
    }
    const double kkt = *std::max_element(mode_kkt.begin(), mode_kkt.end());
    trace.entries.push_back({iter, nll, false, kkt, 0.0, seconds_since(start)});
    trace.work_units = iter;
    if (converged) {
      trace.converged = true;
      break;
    }
  }
  trace.model = std::move(m);
  return trace;
}

double kkt_violation(const SparseCountTensor& x, const KruskalModel& m,
                     std::size_t mode, double eps) {
  check_compatible(x, m);
  if (mode >= m.ndims()) fail(ErrorKind::kInvalidArgument, "mode out of range");
  const KruskalModel form = absorb_into_mode(m, mode);
  const auto mvals = model_at_nonzeros(x, form);
  std::vector<double> ratio(x.nnz());
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    ratio[n] = static_cast<double>(x.value(n)) / std::max(mvals[n], eps);
  }
  const Matrix phi = mttkrp_masked(x, form, mode, ratio);
  const std::size_t rank = m.rank();
  std::vector<double> others(rank, 1.0);
  for (std::size_t j = 0; j < m.ndims(); ++j) {
    if (j == mode) continue;
    const auto sums = column_norms(form.factor(j), Norm::kOne);
    for (std::size_t r = 0; r < rank; ++r) others[r] *= sums[r];
  }
  const Matrix& b = form.factor(mode);
  double worst = 0.0;
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t r = 0; r < rank; ++r) {
      const double grad = others[r] - phi(i, r);
      worst = std::max(worst, std::abs(std::min(b(i, r), grad)));
    }
  }
  return worst;
}

}  // namespace pcp
