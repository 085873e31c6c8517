#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcp/kruskal.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp {

/// FMS level at which two models are called similar.
inline constexpr double kFmsSimilar = 0.85;
/// FMS level at which two models are called equal.
inline constexpr double kFmsEqual = 0.95;

/// Outcome of one multi-start solve.
struct SolveRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string method;
  std::string options_digest;
  long long j = -1;  // stochastic budget for hybrid runs, -1 otherwise
  long long k = -1;  // deterministic budget for hybrid runs, -1 otherwise
  KruskalModel model;
  double nll = 0.0;  // exact, never a sampled estimate
  std::size_t work_units = 0;
  bool converged = false;
  std::size_t trace_length = 0;
  double wall_seconds = 0.0;
};

/// Ordered collection of solves; insertion order breaks NLL ties.
struct ResultSet {
  std::string label;
  std::vector<SolveRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

/// Concatenation in argument order (the tie-break order of the union).
ResultSet union_of(const std::vector<const ResultSet*>& sets,
                   std::string label);

struct ApproxMle {
  std::size_t index = 0;
  KruskalModel model;
  double nll = 0.0;
};

/// Member with the smallest exactly recomputed NLL; the first one wins ties.
/// Throws EmptySet.
ApproxMle approx_mle(const ResultSet& s, const SparseCountTensor& x);

/// Same selection using the stored NLLs.
ApproxMle approx_mle(const ResultSet& s);

/// (f_n - f_star) / |f_star|. Throws DivisionByZero when f_star == 0.
double signed_rel_diff(double f_n, double f_star);

/// Fraction of `nlls` with |signed_rel_diff(f, f_star)| < eps.
/// Throws EmptySet, InvalidArgument (eps <= 0).
double prob_within_eps(double f_star, std::span<const double> nlls,
                       double eps);

/// Model-level form: NLLs are recomputed exactly against `x`.
double prob_within_eps(const KruskalModel& mstar, const ResultSet& s,
                       const SparseCountTensor& x, double eps);

/// Factor match score in [0, 1]: the best average, over one-to-one
/// component matchings, of the weight penalty
/// 1 - |xi_a - xi_b| / max(xi_a, xi_b) times the product over modes of the
/// column cosines, with xi = lambda * prod of column two-norms. Solved as
/// an exact maximum-weight assignment. Throws RankMismatch,
/// DimensionMismatch.
double fms(const KruskalModel& a, const KruskalModel& b);

/// R x R matrix of per-pair component scores underlying fms().
Matrix fms_score_matrix(const KruskalModel& a, const KruskalModel& b);

/// 1 if fms(mstar, mn) >= t, else 0.
int fms_indicator(const KruskalModel& mstar, const KruskalModel& mn, double t);

/// Fraction of scores >= t. Throws EmptySet.
double fms_fraction(std::span<const double> scores, double t);
double fms_fraction(const KruskalModel& mstar, const ResultSet& s, double t);

struct AucValue {
  double raw = 0.0;         // integral of the fraction curve over [tau, 1]
  double normalized = 0.0;  // raw / (1 - tau)
};

/// Exact integral over t in [tau, 1] of fms_fraction(scores, t).
/// Throws EmptySet, InvalidArgument (tau outside [0, 1)).
AucValue fms_auc(std::span<const double> scores, double tau);
AucValue fms_auc(const KruskalModel& mstar, const ResultSet& s, double tau);

/// fms(mstar, member) for every member, in order.
std::vector<double> fms_scores(const KruskalModel& mstar, const ResultSet& s);

}  // namespace pcp
