#include "pcp/report.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "pcp/error.hpp"
#include "pcp/io.hpp"

namespace pcp {

namespace {

const ResultSet& set_of(const ExperimentResults& r, const std::string& label) {
  if (label == "G") return r.gcp;
  if (label == "C") return r.cpapr;
  return r.hybrid;
}

std::string opt_int(long long v) { return v >= 0 ? std::to_string(v) : std::string(); }

std::string opt_real(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::ofstream open_csv(const std::filesystem::path& p, const char* header) {
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::kIoError, "cannot write '" + p.string() + "'");
  out << header << '\n';
  return out;
}

}  // namespace

std::vector<ReportGroup> report_groups(const ExperimentResults& r) {
  std::vector<ReportGroup> groups;
  for (const ResultSet* s : {&r.gcp, &r.cpapr}) {
    if (s->empty()) continue;
    ReportGroup g{s->label, -1, -1, {}};
    for (std::size_t i = 0; i < s->size(); ++i) g.members.push_back(i);
    groups.push_back(std::move(g));
  }
  const std::size_t first_h = groups.size();
  for (std::size_t i = 0; i < r.hybrid.size(); ++i) {
    const SolveRecord& rec = r.hybrid.records[i];
    auto it = std::find_if(groups.begin() + static_cast<std::ptrdiff_t>(first_h), groups.end(),
                           [&](const ReportGroup& g) { return g.j == rec.j && g.k == rec.k; });
    if (it == groups.end()) {
      groups.push_back({r.hybrid.label, rec.j, rec.k, {}});
      it = groups.end() - 1;
    }
    it->members.push_back(i);
  }
  return groups;
}

Report make_report(const ExperimentResults& r, const ReportOptions& opts) {
  const auto sets = r.sets();
  if (sets.empty()) fail(ErrorKind::kEmptySet, "no solves to report on");
  const std::vector<ReportGroup> groups = report_groups(r);
  Report rep;

  const ResultSet all = union_of(sets, "all");
  const ApproxMle mle = approx_mle(all);
  rep.mle_nll = mle.nll;
  rep.mle_run_id = all.records[mle.index].run_id;

  std::vector<const ResultSet*> baselines;
  for (const ResultSet* s : {&r.gcp, &r.cpapr}) {
    if (!s->empty()) baselines.push_back(s);
  }
  if (!baselines.empty()) {
    rep.delta_reference = "G+C";
    rep.delta_reference_nll = approx_mle(union_of(baselines, "G+C")).nll;
  } else {
    rep.delta_reference = "all";
    rep.delta_reference_nll = mle.nll;
  }

  // Per-group NLLs and FMS scores against the all-union MLE.
  std::vector<std::vector<double>> nlls(groups.size()), scores(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const ResultSet& s = set_of(r, groups[g].set);
    for (std::size_t i : groups[g].members) {
      nlls[g].push_back(s.records[i].nll);
      scores[g].push_back(fms(mle.model, s.records[i].model));
    }
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    double best = std::numeric_limits<double>::infinity();
    for (double f : nlls[g]) best = std::min(best, signed_rel_diff(f, rep.delta_reference_nll));
    rep.deltas.push_back({groups[g].set, groups[g].j, groups[g].k, nlls[g].size(), best});
  }

  for (double eps : opts.eps) {
    EpsRow row;
    row.eps = eps;
    std::size_t num_h = 0;
    std::size_t ties = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double p = prob_within_eps(mle.nll, nlls[g], eps);
      rep.epsball_groups.push_back({eps, groups[g].set, groups[g].j, groups[g].k, p});
      if (groups[g].set == "G") {
        row.p_g = p;
      } else if (groups[g].set == "C") {
        row.p_c = p;
      } else {
        ++num_h;
        if (!row.p_h || p > *row.p_h) {
          row.p_h = p;
          row.best_j = groups[g].j;
          row.best_k = groups[g].k;
          ties = 1;
        } else if (p == *row.p_h) {
          ++ties;
        }
      }
    }
    row.all_pairs_tie = num_h > 1 && ties == num_h;
    rep.epsball.push_back(row);
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (double t : opts.t_grid) {
      rep.psi.push_back({groups[g].set, groups[g].j, groups[g].k, t,
                         fms_fraction(scores[g], t)});
    }
    for (double tau : opts.taus) {
      rep.auc.push_back({groups[g].set, groups[g].j, groups[g].k, tau,
                         fms_auc(scores[g], tau)});
    }
  }
  return rep;
}

void write_report(const std::filesystem::path& dir, const Report& rep) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_csv(dir / "summary.csv", "quantity,value");
    out << "mle_run_id," << rep.mle_run_id << '\n'
        << "mle_nll," << format_double(rep.mle_nll) << '\n'
        << "delta_reference," << rep.delta_reference << '\n'
        << "delta_reference_nll," << format_double(rep.delta_reference_nll) << '\n';
  }
  {
    auto out = open_csv(dir / "deltas.csv", "set,j,k,starts,min_delta_r");
    for (const auto& d : rep.deltas) {
      out << d.set << ',' << opt_int(d.j) << ',' << opt_int(d.k) << ',' << d.starts << ','
          << format_double(d.min_delta_r) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "epsball.csv", "eps,P_G,P_C,P_H,best_j,best_k");
    for (const auto& e : rep.epsball) {
      out << format_double(e.eps) << ',' << opt_real(e.p_g) << ',' << opt_real(e.p_c) << ','
          << opt_real(e.p_h) << ',';
      if (e.all_pairs_tie) {
        out << "all,all";
      } else {
        out << opt_int(e.best_j) << ',' << opt_int(e.best_k);
      }
      out << '\n';
    }
  }
  {
    auto out = open_csv(dir / "epsball_groups.csv", "eps,set,j,k,p");
    for (const auto& e : rep.epsball_groups) {
      out << format_double(e.eps) << ',' << e.set << ',' << opt_int(e.j) << ','
          << opt_int(e.k) << ',' << format_double(e.p) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "psi.csv", "set,j,k,t,psi");
    for (const auto& p : rep.psi) {
      out << p.set << ',' << opt_int(p.j) << ',' << opt_int(p.k) << ',' << format_double(p.t)
          << ',' << format_double(p.psi) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "auc.csv", "set,j,k,tau,auc_raw,auc_normalized");
    for (const auto& a : rep.auc) {
      out << a.set << ',' << opt_int(a.j) << ',' << opt_int(a.k) << ',' << format_double(a.tau)
          << ',' << format_double(a.auc.raw) << ',' << format_double(a.auc.normalized) << '\n';
    }
  }
}

}  // namespace pcp
