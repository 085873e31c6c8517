#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pcp/experiment.hpp"
#include "pcp/metrics.hpp"

namespace pcp {

struct ReportOptions {
  std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<double> t_grid;
  std::vector<double> taus = {kFmsSimilar, kFmsEqual};
};

/// A group of solves reported together: the whole G or C set, or the H
/// solves of one (j, k) pair. j and k are -1 for non-hybrid groups.
struct ReportGroup {
  std::string set;
  long long j = -1;
  long long k = -1;
  std::vector<std::size_t> members;  // indices into the owning ResultSet
};

struct DeltaRow {
  std::string set;
  long long j = -1;
  long long k = -1;
  std::size_t starts = 0;
  double min_delta_r = 0.0;
};

struct EpsRow {
  double eps = 0.0;
  std::optional<double> p_g, p_c, p_h;  // p_h is the best over H groups
  bool all_pairs_tie = false;
  long long best_j = -1;
  long long best_k = -1;
};

struct EpsGroupRow {
  double eps = 0.0;
  std::string set;
  long long j = -1;
  long long k = -1;
  double p = 0.0;
};

struct PsiRow {
  std::string set;
  long long j = -1;
  long long k = -1;
  double t = 0.0;
  double psi = 0.0;
};

struct AucRow {
  std::string set;
  long long j = -1;
  long long k = -1;
  double tau = 0.0;
  AucValue auc;
};

/// The analyses of a multi-start experiment.
///
/// deltas: minimum signed relative NLL difference of each group against the
/// approximate MLE of the baseline union G + C (of all sets when there are no
/// baselines). Everything else uses the approximate MLE of the union of all
/// sets in G, C, H order: epsball holds the eps-ball probability of G, C and
/// the best H group, with the pair attaining it ("all" when every H group
/// ties); epsball_groups has the value of every group; psi the FMS fraction
/// over the t grid; auc the FMS AUC at each tau.
struct Report {
  std::string delta_reference;  // "G+C" or "all"
  double delta_reference_nll = 0.0;
  double mle_nll = 0.0;
  std::string mle_run_id;
  std::vector<DeltaRow> deltas;
  std::vector<EpsRow> epsball;
  std::vector<EpsGroupRow> epsball_groups;
  std::vector<PsiRow> psi;
  std::vector<AucRow> auc;
};

/// G set, C set, then H split by (j, k) in order of first appearance.
std::vector<ReportGroup> report_groups(const ExperimentResults& r);

/// Throws EmptySet when there are no solves.
Report make_report(const ExperimentResults& r, const ReportOptions& opts);

/// Writes deltas.csv, epsball.csv, epsball_groups.csv, psi.csv, auc.csv and
/// summary.csv into `dir`. Every file is a deterministic function of the
/// report.
void write_report(const std::filesystem::path& dir, const Report& rep);

}  // namespace pcp
