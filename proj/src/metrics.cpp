#include "pcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pcp/assignment.hpp"
#include "pcp/error.hpp"
#include "pcp/objective.hpp"

namespace pcp {

ResultSet union_of(const std::vector<const ResultSet*>& sets,
                   std::string label) {
  ResultSet out;
  out.label = std::move(label);
  for (const ResultSet* s : sets) {
    out.records.insert(out.records.end(), s->records.begin(), s->records.end());
  }
  return out;
}

namespace {

ApproxMle select_min(const ResultSet& s, std::span<const double> nlls) {
  if (s.empty()) fail(ErrorKind::kEmptySet, "result set is empty");
  std::size_t best = 0;
  for (std::size_t n = 1; n < nlls.size(); ++n) {
    if (nlls[n] < nlls[best]) best = n;
  }
  return {best, s.records[best].model, nlls[best]};
}

}  // namespace

ApproxMle approx_mle(const ResultSet& s, const SparseCountTensor& x) {
  std::vector<double> nlls;
  nlls.reserve(s.size());
  for (const auto& r : s.records) nlls.push_back(poisson_nll(x, r.model).value);
  return select_min(s, nlls);
}

ApproxMle approx_mle(const ResultSet& s) {
  std::vector<double> nlls;
  nlls.reserve(s.size());
  for (const auto& r : s.records) nlls.push_back(r.nll);
  return select_min(s, nlls);
}

double signed_rel_diff(double f_n, double f_star) {
  if (f_star == 0.0) {
    fail(ErrorKind::kDivisionByZero, "reference NLL is zero");
  }
  return (f_n - f_star) / std::abs(f_star);
}

double prob_within_eps(double f_star, std::span<const double> nlls,
                       double eps) {
  if (nlls.empty()) fail(ErrorKind::kEmptySet, "result set is empty");
  if (!(eps > 0.0)) fail(ErrorKind::kInvalidArgument, "eps must be positive");
  std::size_t inside = 0;
  for (double f : nlls) {
    if (std::abs(signed_rel_diff(f, f_star)) < eps) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(nlls.size());
}

double prob_within_eps(const KruskalModel& mstar, const ResultSet& s,
                       const SparseCountTensor& x, double eps) {
  std::vector<double> nlls;
  nlls.reserve(s.size());
  for (const auto& r : s.records) nlls.push_back(poisson_nll(x, r.model).value);
  return prob_within_eps(poisson_nll(x, mstar).value, nlls, eps);
}

Matrix fms_score_matrix(const KruskalModel& a, const KruskalModel& b) {
  if (a.rank() != b.rank()) {
    fail(ErrorKind::kRankMismatch, "models differ in rank");
  }
  if (a.shape() != b.shape()) {
    fail(ErrorKind::kDimensionMismatch, "models differ in dimensions");
  }
  const std::size_t rank = a.rank();
  const std::size_t d = a.ndims();

  std::vector<std::vector<double>> norm_a(d), norm_b(d);
  for (std::size_t n = 0; n < d; ++n) {
    norm_a[n] = column_norms(a.factor(n), Norm::kTwo);
    norm_b[n] = column_norms(b.factor(n), Norm::kTwo);
  }
  auto sum_squares = [](const Matrix& f) {
    std::vector<double> out(f.cols(), 0.0);
    for (std::size_t i = 0; i < f.rows(); ++i) {
      for (std::size_t r = 0; r < f.cols(); ++r) out[r] += f(i, r) * f(i, r);
    }
    return out;
  };
  std::vector<std::vector<double>> sq_a(d), sq_b(d);
  for (std::size_t n = 0; n < d; ++n) {
    sq_a[n] = sum_squares(a.factor(n));
    sq_b[n] = sum_squares(b.factor(n));
  }
  std::vector<double> xi_a(rank), xi_b(rank);
  for (std::size_t r = 0; r < rank; ++r) {
    xi_a[r] = a.weights()[r];
    xi_b[r] = b.weights()[r];
    for (std::size_t n = 0; n < d; ++n) {
      xi_a[r] *= norm_a[n][r];
      xi_b[r] *= norm_b[n][r];
    }
  }

  Matrix score(rank, rank);
  for (std::size_t r = 0; r < rank; ++r) {
    for (std::size_t s = 0; s < rank; ++s) {
      const double hi = std::max(xi_a[r], xi_b[s]);
      double value = hi == 0.0 ? 1.0 : 1.0 - std::abs(xi_a[r] - xi_b[s]) / hi;
      for (std::size_t n = 0; n < d && value != 0.0; ++n) {
        // sqrt of the product of squared norms makes self-similarity exactly 1.
        const double sq = sq_a[n][r] * sq_b[n][s];
        if (sq == 0.0) {
          value = 0.0;
          break;
        }
        const double denom = std::sqrt(sq);
        const Matrix& fa = a.factor(n);
        const Matrix& fb = b.factor(n);
        double dot = 0.0;
        for (std::size_t i = 0; i < fa.rows(); ++i) dot += fa(i, r) * fb(i, s);
        value *= dot / denom;
      }
      score(r, s) = value;
    }
  }
  return score;
}

double fms(const KruskalModel& a, const KruskalModel& b) {
  const Matrix score = fms_score_matrix(a, b);
  const std::size_t rank = score.rows();
  if (rank == 0) return 1.0;
  const auto match = max_weight_assignment(score);
  double total = 0.0;
  for (std::size_t r = 0; r < rank; ++r) total += score(r, match[r]);
  return total / static_cast<double>(rank);
}

int fms_indicator(const KruskalModel& mstar, const KruskalModel& mn, double t) {
  return fms(mstar, mn) >= t ? 1 : 0;
}

double fms_fraction(std::span<const double> scores, double t) {
  if (scores.empty()) fail(ErrorKind::kEmptySet, "result set is empty");
  const auto hits = std::count_if(scores.begin(), scores.end(),
                                  [t](double f) { return f >= t; });
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

std::vector<double> fms_scores(const KruskalModel& mstar, const ResultSet& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& r : s.records) out.push_back(fms(mstar, r.model));
  return out;
}

double fms_fraction(const KruskalModel& mstar, const ResultSet& s, double t) {
  return fms_fraction(fms_scores(mstar, s), t);
}

AucValue fms_auc(std::span<const double> scores, double tau) {
  if (scores.empty()) fail(ErrorKind::kEmptySet, "result set is empty");
  if (!(tau >= 0.0 && tau < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "tau must lie in [0, 1)");
  }
  // The fraction curve is a right-continuous step function that drops at
  // each score; walk the scores from the top, integrating each plateau.
  std::vector<double> sorted(scores.begin(), scores.end());
  for (double& f : sorted) f = std::clamp(f, 0.0, 1.0);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double n = static_cast<double>(sorted.size());
  double raw = 0.0;
  double upper = 1.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double lower = std::max(sorted[i], tau);
    // On (lower, upper] exactly i members are >= t.
    if (upper > lower) raw += (upper - lower) * static_cast<double>(i) / n;
    upper = std::min(upper, lower);
    if (upper <= tau) break;
  }
  if (upper > tau) raw += (upper - tau);  // every member is >= t below here
  return {raw, raw / (1.0 - tau)};
}

AucValue fms_auc(const KruskalModel& mstar, const ResultSet& s, double tau) {
  return fms_auc(fms_scores(mstar, s), tau);
}

}  // namespace pcp
