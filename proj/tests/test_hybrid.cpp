#include <gtest/gtest.h>

#include "pcp/error.hpp"
#include "pcp/hybrid.hpp"
#include "pcp/synth.hpp"
#include "support/oracles.hpp"

namespace pcp {
namespace {

struct Fixture {
  SparseCountTensor x;
  KruskalModel init;
};

Fixture small_problem(std::uint64_t seed) {
  Rng rng(seed);
  ProblemSpec spec{{8, 7, 6}, 2, 60, 0.0, 0};
  auto p = create_problem(spec, rng);
  auto init = create_guess(p.data.shape(), 2, rng, static_cast<double>(p.data.total_count()));
  return {std::move(p.data), std::move(init)};
}

GcpOptions quick_gcp() {
  GcpOptions o;
  o.iters_per_epoch = 10;
  return o;
}

TEST(CpPoisson, DispatchIsTransparent) {
  const auto f = small_problem(51);
  CpaprOptions c;
  c.max_outer_iters = 10;
  Rng r1(3);
  EXPECT_TRUE(same_numerics(cp_poisson(f.x, 2, f.init, kCpaprMu, c, r1), cpapr_mu(f.x, 2, f.init, c)));

  GcpOptions g = quick_gcp();
  g.max_epochs = 5;
  Rng r2(3), r3(3);
  EXPECT_TRUE(same_numerics(cp_poisson(f.x, 2, f.init, kGcpAdam, g, r2), gcp_adam(f.x, 2, f.init, g, r3)));
}

TEST(CpPoisson, Errors) {
  const auto f = small_problem(52);
  Rng rng(1);
  try {
    cp_poisson(f.x, 2, f.init, "nope", CpaprOptions{}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnknownMethod);
  }
  try {
    cp_poisson(f.x, 2, f.init, kCpaprMu, GcpOptions{}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOptionsTypeMismatch);
  }
}

TEST(ConstantWorkStrategy, Budgets) {
  const auto a = constant_work_strategy(100, 0);
  EXPECT_EQ(a.cycles.at(0).stochastic_budget(), 0u);
  EXPECT_EQ(a.cycles.at(0).deterministic_budget(), 100u);
  const auto b = constant_work_strategy(100, 100);
  EXPECT_EQ(b.cycles.at(0).stochastic_budget(), 100u);
  EXPECT_EQ(b.cycles.at(0).deterministic_budget(), 0u);
  const auto c = constant_work_strategy(100, 36);
  EXPECT_EQ(c.cycles.at(0).stochastic_budget(), 36u);
  EXPECT_EQ(c.cycles.at(0).deterministic_budget(), 64u);
  EXPECT_EQ(c.cycles.size(), 1u);
  EXPECT_THROW(constant_work_strategy(100, 101), Error);
  EXPECT_THROW(constant_work_strategy(100, -1), Error);
}

TEST(Cgc, AllDeterministicEqualsCpapr) {
  const auto f = small_problem(53);
  const auto t = cgc(f.x, 2, 1, constant_work_strategy(30, 0), f.init, 99);
  CpaprOptions c;
  c.max_outer_iters = 30;
  const auto ref = cpapr_mu(f.x, 2, f.init, c);
  EXPECT_EQ(t.model, ref.model);
  EXPECT_EQ(t.work_units, ref.work_units);
}

TEST(Cgc, AllStochasticEqualsGcp) {
  const auto f = small_problem(54);
  const auto t = cgc(f.x, 2, 1, constant_work_strategy(8, 8, quick_gcp()), f.init, 99);
  GcpOptions g = quick_gcp();
  g.max_epochs = 8;
  Rng rng(stage_seed(99, 0, Stage::kStochastic));
  const auto ref = gcp_adam(f.x, 2, f.init, g, rng);
  EXPECT_EQ(t.model, ref.model);
}

TEST(Cgc, TwoCycleStructure) {
  const auto f = small_problem(55);
  CycleSpec spec;
  spec.s_opts = quick_gcp();
  spec.s_opts.max_epochs = 5;
  spec.d_opts.max_outer_iters = 5;
  spec.d_opts.kkt_tol = 1e-15;
  Strategy strat{{spec, spec}, {}};
  const auto t = cgc(f.x, 2, 2, strat, f.init, 7);
  ASSERT_EQ(t.stages.size(), 4u);
  const Stage order[] = {Stage::kStochastic, Stage::kDeterministic, Stage::kStochastic,
                         Stage::kDeterministic};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.stages[i].stage, order[i]);
    EXPECT_EQ(t.stages[i].cycle, i / 2);
  }
  EXPECT_EQ(t.stages[0].initial, f.init);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(t.stages[i].initial, t.stages[i - 1].final);
  EXPECT_EQ(t.model, t.stages[3].final);
  std::size_t work = 0;
  for (const auto& s : t.stages) work += s.work_units;
  EXPECT_EQ(t.work_units, work);
  EXPECT_LE(t.work_units, 20u);

  // Entries are tagged and cumulative.
  for (std::size_t i = 1; i < t.entries.size(); ++i) {
    EXPECT_GE(t.entries[i].work_units, t.entries[i - 1].work_units);
  }
  EXPECT_EQ(t.entries.back().stage, Stage::kDeterministic);
  EXPECT_EQ(t.entries.back().cycle, 1u);
}

TEST(Cgc, PolicyHookCanEditLaterCycles) {
  const auto f = small_problem(56);
  CycleSpec spec;
  spec.s_opts = quick_gcp();
  spec.s_opts.max_epochs = 2;
  spec.d_opts.max_outer_iters = 2;
  spec.d_opts.kkt_tol = 1e-15;
  std::size_t calls = 0;
  Strategy strat{{spec, spec, spec},
                 [&](std::size_t cycle, const SolveTrace& so_far, std::vector<CycleSpec>& cycles) {
                   ++calls;
                   EXPECT_EQ(so_far.stages.size(), 2 * (cycle + 1));
                   cycles[cycle + 1].d_opts.max_outer_iters = 1;
                 }};
  const auto t = cgc(f.x, 2, 3, strat, f.init, 7);
  EXPECT_EQ(calls, 2u);
  EXPECT_EQ(t.stages[3].work_units, 1u);
  EXPECT_EQ(t.stages[5].work_units, 1u);
}

TEST(Cgc, CycleCountMustMatch) {
  const auto f = small_problem(57);
  try {
    cgc(f.x, 2, 2, constant_work_strategy(10, 5), f.init, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetOutOfRange);
  }
}

TEST(Cgc, Reproducible) {
  const auto f = small_problem(58);
  const auto s = constant_work_strategy(10, 4, quick_gcp());
  EXPECT_TRUE(same_numerics(cgc(f.x, 2, 1, s, f.init, 5), cgc(f.x, 2, 1, s, f.init, 5)));
}

}  // namespace
}  // namespace pcp
