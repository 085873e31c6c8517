#include <gtest/gtest.h>

#include <filesystem>

#include "pcp/config.hpp"
#include "pcp/error.hpp"
#include "pcp/experiment.hpp"
#include "pcp/report.hpp"

namespace pcp {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_config() {
  return parse_config(
      "# small synthetic sweep\n"
      "problem.shape = 10 10 10\n"
      "problem.rank = 2\n"
      "problem.nnz = 60\n"
      "problem.seed = 3\n"
      "method = sweep\n"
      "starts = 2\n"
      "seed = 11\n"
      "sweep.W = 10\n"
      "cpapr.max_outer_iters = 10\n"
      "gcp.iters_per_epoch = 5\n"
      "gcp.fit_samples_nonzero = 50\n"
      "gcp.fit_samples_zero = 50\n");
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pcp-test-" + name);
  fs::remove_all(p);
  return p;
}

TEST(Config, ParseFormatRoundTrip) {
  const auto cfg = small_config();
  EXPECT_EQ(cfg.problem.shape, (Shape{10, 10, 10}));
  EXPECT_EQ(cfg.method, RunMethod::kSweep);
  EXPECT_EQ(cfg.gcp.iters_per_epoch, 5u);
  const std::string text = format_config(cfg);
  EXPECT_EQ(format_config(parse_config(text)), text);
}

TEST(Config, Errors) {
  try {
    parse_config("starts = 2\nbogus = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_config("starts = two\n"), Error);
  try {
    parse_config("method = nope\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownMethod);
  }
  auto cfg = small_config();
  apply_override(cfg, "starts=5");
  EXPECT_EQ(cfg.starts, 5u);
  EXPECT_THROW(apply_override(cfg, "starts"), Error);
}

TEST(Experiment, SweepShapeAndBaselineColumn) {
  const auto cfg = small_config();
  const auto data = load_data(cfg);
  ASSERT_TRUE(data.truth.has_value());
  const auto r = run_multistart(cfg, data.tensor);
  EXPECT_TRUE(r.gcp.empty());
  EXPECT_TRUE(r.cpapr.empty());
  ASSERT_EQ(r.hybrid.size(), 22u);
  for (const auto& rec : r.hybrid.records) {
    EXPECT_EQ(rec.j + rec.k, 10);
    EXPECT_LE(rec.work_units, 10u);
  }

  auto plain = cfg;
  plain.method = RunMethod::kCpapr;
  const auto c = run_multistart(plain, data.tensor);
  ASSERT_EQ(c.cpapr.size(), 2u);
  std::size_t matched = 0;
  for (const auto& rec : r.hybrid.records) {
    if (rec.j != 0) continue;
    const auto& ref = c.cpapr.records.at(matched++);
    EXPECT_EQ(rec.seed, ref.seed);
    EXPECT_EQ(rec.model, ref.model);
    EXPECT_EQ(rec.nll, ref.nll);
  }
  EXPECT_EQ(matched, 2u);
}

TEST(Experiment, ReproducibleAcrossThreadCounts) {
  auto cfg = small_config();
  cfg.j_values = {0, 4, 10};
  cfg.baseline_cpapr_starts = 2;
  cfg.baseline_gcp_starts = 2;
  cfg.baseline_cpapr.max_outer_iters = 20;
  cfg.baseline_gcp.max_epochs = 10;
  cfg.baseline_gcp.iters_per_epoch = 5;
  const auto data = load_data(cfg);
  cfg.threads = 1;
  const auto a = run_multistart(cfg, data.tensor);
  cfg.threads = 3;
  const auto b = run_multistart(cfg, data.tensor);
  ASSERT_EQ(a.sets().size(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& x = *a.sets()[s];
    const auto& y = *b.sets()[s];
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(x.records[i].run_id, y.records[i].run_id);
      EXPECT_EQ(x.records[i].model, y.records[i].model);
      EXPECT_EQ(x.records[i].nll, y.records[i].nll);
    }
  }
  EXPECT_EQ(a.gcp.size(), 2u);
  EXPECT_EQ(a.cpapr.size(), 2u);
  EXPECT_EQ(a.hybrid.size(), 6u);
}

TEST(Experiment, SaveLoadRoundTrip) {
  auto cfg = small_config();
  cfg.j_values = {0, 10};
  const auto data = load_data(cfg);
  const fs::path dir = temp_dir("saveload");
  const auto r = run_multistart(cfg, data.tensor, dir);
  EXPECT_TRUE(fs::exists(dir / "journal.log"));
  save_results(dir, r);
  const auto back = load_results(dir);
  ASSERT_EQ(back.hybrid.size(), r.hybrid.size());
  for (std::size_t i = 0; i < r.hybrid.size(); ++i) {
    const auto& p = r.hybrid.records[i];
    const auto& q = back.hybrid.records[i];
    EXPECT_EQ(p.run_id, q.run_id);
    EXPECT_EQ(p.seed, q.seed);
    EXPECT_EQ(p.model, q.model);
    EXPECT_EQ(p.nll, q.nll);
    EXPECT_EQ(p.j, q.j);
    EXPECT_EQ(p.k, q.k);
    EXPECT_EQ(p.work_units, q.work_units);
    EXPECT_EQ(p.converged, q.converged);
    EXPECT_EQ(p.options_digest, q.options_digest);
  }
  fs::remove_all(dir);
}

SolveRecord fake(const std::string& id, double nll, long long j = -1) {
  SolveRecord r;
  r.run_id = id;
  r.nll = nll;
  r.j = j;
  r.k = j < 0 ? -1 : 10 - j;
  r.model = KruskalModel::constant({2, 2}, 1);
  return r;
}

TEST(Report, SmallHandExample) {
  ExperimentResults r;
  r.gcp.records = {fake("G0", 100.0), fake("G1", 120.0)};
  r.cpapr.records = {fake("C0", 100.0), fake("C1", 100.05)};
  r.hybrid.records = {fake("H0", 100.0, 2), fake("H1", 100.0, 2), fake("H2", 150.0, 4),
                      fake("H3", 100.0, 4)};
  ReportOptions opts;
  opts.eps = {1e-1, 1e-3};
  opts.t_grid = {0.0, 1.0};
  const auto rep = make_report(r, opts);
  EXPECT_EQ(rep.mle_run_id, "G0");  // union order breaks the tie
  EXPECT_EQ(rep.delta_reference, "G+C");
  ASSERT_EQ(rep.epsball.size(), 2u);
  // eps = 0.1: G has 120 (20%) out, C and H(j=2) fully in.
  EXPECT_DOUBLE_EQ(*rep.epsball[0].p_g, 0.5);
  EXPECT_DOUBLE_EQ(*rep.epsball[0].p_c, 1.0);
  EXPECT_DOUBLE_EQ(*rep.epsball[0].p_h, 1.0);
  EXPECT_EQ(rep.epsball[0].best_j, 2);
  EXPECT_FALSE(rep.epsball[0].all_pairs_tie);
  // eps = 1e-3: C1 is 5e-4 away, still inside.
  EXPECT_DOUBLE_EQ(*rep.epsball[1].p_c, 1.0);
  // Identical models: psi is 1 everywhere.
  for (const auto& row : rep.psi) EXPECT_EQ(row.psi, 1.0);
  ASSERT_EQ(report_groups(r).size(), 4u);

  const fs::path dir = temp_dir("report");
  fs::create_directories(dir);
  write_report(dir, rep);
  for (const char* f : {"summary.csv", "deltas.csv", "epsball.csv", "epsball_groups.csv", "psi.csv",
                        "auc.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Report, AllTieAndEmpty) {
  ExperimentResults r;
  r.hybrid.records = {fake("H0", 10.0, 2), fake("H1", 10.0, 4)};
  ReportOptions opts;
  opts.eps = {1e-1};
  const auto rep = make_report(r, opts);
  EXPECT_EQ(rep.delta_reference, "all");
  EXPECT_TRUE(rep.epsball[0].all_pairs_tie);
  EXPECT_FALSE(rep.epsball[0].p_g.has_value());
  EXPECT_THROW(make_report(ExperimentResults{}, opts), Error);
}

}  // namespace
}  // namespace pcp
