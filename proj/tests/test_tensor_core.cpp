#include <gtest/gtest.h>

#include <cmath>

#include "pcp/error.hpp"
#include "pcp/kruskal.hpp"
#include "pcp/sparse_tensor.hpp"
#include "support/oracles.hpp"

namespace pcp {
namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kInvalidArgument;
}

TEST(MakeSparse, MinimalInput) {
  const auto x = make_sparse({2, 2, 2}, std::vector<std::vector<std::size_t>>{{0, 0, 0}}, {3});
  EXPECT_EQ(x.nnz(), 1u);
  EXPECT_EQ(x.value(0), 3);
  EXPECT_EQ(x.numel(), 8u);
  EXPECT_EQ(x.num_zeros(), 7u);
}

TEST(MakeSparse, Errors) {
  using C = std::vector<std::vector<std::size_t>>;
  EXPECT_EQ(kind_of([] { make_sparse({2, 2}, C{{2, 0}}, {1}); }), ErrorKind::kIndexOutOfBounds);
  EXPECT_EQ(kind_of([] { make_sparse({2, 2, 2}, C{{0, 0, 0}, {0, 0, 0}}, {1, 1}); }),
            ErrorKind::kDuplicateCoordinate);
  EXPECT_EQ(kind_of([] { make_sparse({2, 2}, C{{0, 0}}, {0}); }), ErrorKind::kNonPositiveValue);
  EXPECT_EQ(kind_of([] { make_sparse({2, 2}, C{{0, 0}}, {1, 2}); }), ErrorKind::kLengthMismatch);
}

TEST(MakeSparse, SortsLexicographically) {
  using C = std::vector<std::vector<std::size_t>>;
  const auto x = make_sparse({3, 3}, C{{2, 1}, {0, 2}, {2, 0}}, {1, 2, 3});
  ASSERT_EQ(x.nnz(), 3u);
  EXPECT_EQ(x.subscript(0, 0), 0u);
  EXPECT_EQ(x.subscript(1, 1), 0u);
  EXPECT_EQ(x.value(2), 1);
  const std::vector<std::size_t> probe{2, 0};
  EXPECT_EQ(x.find(probe), std::optional<std::size_t>(1));
  const std::vector<std::size_t> missing{1, 1};
  EXPECT_FALSE(x.find(missing).has_value());
  EXPECT_EQ(x.total_count(), 6);
}

TEST(ModelEntry, Examples) {
  const auto ones = KruskalModel::constant({3, 3, 3}, 1);
  const std::vector<std::size_t> idx{1, 2, 0};
  EXPECT_DOUBLE_EQ(model_entry(ones, idx), 1.0);

  auto two = KruskalModel::constant({3, 3, 3}, 2);
  two.weights() = {2.0, 3.0};
  EXPECT_DOUBLE_EQ(model_entry(two, idx), 5.0);

  const std::vector<std::size_t> bad{3, 0, 0};
  EXPECT_EQ(kind_of([&] { model_entry(ones, bad); }), ErrorKind::kIndexOutOfBounds);
}

TEST(ModelEntry, MatchesDenseReconstruction) {
  Rng rng(11);
  const auto m = oracle::random_model({4, 4, 4}, 3, rng);
  const auto dense = oracle::dense_model(m);
  for (std::size_t e = 0; e < dense.size(); ++e) {
    const auto idx = oracle::unravel(e, {4, 4, 4});
    EXPECT_NEAR(model_entry(m, idx), dense[e], 1e-12);
    EXPECT_GE(model_entry(m, idx), 0.0);
  }
}

TEST(ModelTotalSum, Examples) {
  EXPECT_DOUBLE_EQ(model_total_sum(KruskalModel::constant({2, 2, 2}, 1)), 8.0);
  auto zero = KruskalModel::constant({2, 3, 4}, 3);
  zero.weights() = {0.0, 0.0, 0.0};
  EXPECT_EQ(model_total_sum(zero), 0.0);
}

TEST(ModelTotalSum, MatchesDenseSum) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = oracle::random_model({3, 4, 5}, 2, rng);
    const auto dense = oracle::dense_model(m);
    const double want = std::accumulate(dense.begin(), dense.end(), 0.0);
    EXPECT_NEAR(model_total_sum(m), want, 1e-12 * want);
  }
}

TEST(Mttkrp, SingleNonzeroAllOnes) {
  const auto x = make_sparse({3, 3, 3}, std::vector<std::vector<std::size_t>>{{1, 2, 0}}, {4});
  const auto m = KruskalModel::constant({3, 3, 3}, 2);
  const std::vector<double> v{2.0};
  const Matrix g = mttkrp_masked(x, m, 0, v);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t r = 0; r < 2; ++r) EXPECT_EQ(g(i, r), i == 1 ? 2.0 : 0.0);
  }
  const std::vector<double> z{0.0};
  const Matrix g0 = mttkrp_masked(x, m, 2, z);
  for (double e : g0.data()) EXPECT_EQ(e, 0.0);
}

TEST(Mttkrp, LengthMismatch) {
  const auto x = make_sparse({2, 2}, std::vector<std::vector<std::size_t>>{{0, 0}}, {1});
  const std::vector<double> v{1.0, 2.0};
  EXPECT_EQ(kind_of([&] { mttkrp_masked(x, KruskalModel::constant({2, 2}, 1), 0, v); }),
            ErrorKind::kLengthMismatch);
}

// Dense oracle: unfold the masked tensor along `mode` and multiply by the
// Khatri-Rao product of the other factors.
Matrix dense_mttkrp(const SparseCountTensor& x, const KruskalModel& m, std::size_t mode,
                    const std::vector<double>& v) {
  const Shape shape = x.shape();
  std::vector<double> w(oracle::numel(shape), 0.0);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    std::size_t e = 0;
    for (std::size_t k = 0; k < x.ndims(); ++k) e = e * shape[k] + x.subscript(n, k);
    w[e] = v[n];
  }
  Matrix out(shape[mode], m.rank());
  for (std::size_t e = 0; e < w.size(); ++e) {
    const auto idx = oracle::unravel(e, shape);
    for (std::size_t r = 0; r < m.rank(); ++r) {
      double kr = 1.0;
      for (std::size_t k = 0; k < shape.size(); ++k) {
        if (k != mode) kr *= m.factor(k)(idx[k], r);
      }
      out(idx[mode], r) += w[e] * kr;
    }
  }
  return out;
}

TEST(Mttkrp, MatchesDenseKhatriRao) {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    auto x = oracle::random_tensor({4, 4, 4}, 10.0 / 64.0, rng);
    const auto m = oracle::random_model({4, 4, 4}, 3, rng);
    std::vector<double> v(x.nnz());
    for (double& e : v) e = rng.uniform() * 3.0;
    for (std::size_t mode = 0; mode < 3; ++mode) {
      const Matrix got = mttkrp_masked(x, m, mode, v);
      const Matrix want = dense_mttkrp(x, m, mode, v);
      for (std::size_t e = 0; e < got.data().size(); ++e) {
        EXPECT_NEAR(got.data()[e], want.data()[e], 1e-12);
      }
    }
  }
}

TEST(Mttkrp, LinearInValues) {
  Rng rng(14);
  const auto x = oracle::random_tensor({5, 4, 3}, 0.3, rng);
  const auto m = oracle::random_model({5, 4, 3}, 2, rng);
  std::vector<double> v(x.nnz()), v3(x.nnz());
  for (std::size_t n = 0; n < v.size(); ++n) {
    v[n] = rng.uniform();
    v3[n] = 3.0 * v[n];
  }
  const Matrix a = mttkrp_masked(x, m, 1, v);
  const Matrix b = mttkrp_masked(x, m, 1, v3);
  for (std::size_t e = 0; e < a.data().size(); ++e) {
    EXPECT_NEAR(b.data()[e], 3.0 * a.data()[e], 1e-12);
  }
}

TEST(NormalizeColumns, UnitColumnsUnchanged) {
  auto m = KruskalModel::constant({2, 2, 2}, 1, 0.5);
  m.weights() = {2.0};
  const auto n = normalize_columns(m, Norm::kOne);
  EXPECT_EQ(n, m);
}

TEST(NormalizeColumns, ScaleAbsorbedIntoWeight) {
  std::vector<Matrix> f;
  Matrix a(2, 1);
  a(0, 0) = 4.0;  // two-norm 4
  f.push_back(a);
  Matrix b(3, 1);
  b(1, 0) = 1.0;
  f.push_back(b);
  const auto n = normalize_columns(KruskalModel({1.0}, std::move(f)), Norm::kTwo);
  EXPECT_DOUBLE_EQ(n.weights()[0], 4.0);
  EXPECT_DOUBLE_EQ(n.factor(0)(0, 0), 1.0);
}

TEST(NormalizeColumns, ZeroColumnGetsZeroWeight) {
  auto m = KruskalModel::constant({3, 3}, 2);
  for (std::size_t i = 0; i < 3; ++i) m.factor(0)(i, 1) = 0.0;
  const auto n = normalize_columns(m, Norm::kOne);
  EXPECT_EQ(n.weights()[1], 0.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(n.factor(0)(i, 1), 0.0);
}

TEST(NormalizeColumns, PreservesEntries) {
  Rng rng(15);
  for (Norm norm : {Norm::kOne, Norm::kTwo}) {
    const auto m = oracle::random_model({4, 5, 6}, 3, rng, 0.0, 3.0);
    const auto n = normalize_columns(m, norm);
    for (std::size_t k = 0; k < 3; ++k) {
      for (double s : column_norms(n.factor(k), norm)) EXPECT_NEAR(s, 1.0, 1e-12);
    }
    for (int t = 0; t < 5; ++t) {
      const std::vector<std::size_t> idx{rng.index(4), rng.index(5), rng.index(6)};
      const double want = model_entry(m, idx);
      EXPECT_NEAR(model_entry(n, idx), want, 1e-12 * want);
    }
  }
}

TEST(AbsorbIntoMode, PreservesEntries) {
  Rng rng(16);
  const auto m = oracle::random_model({3, 4, 5}, 2, rng);
  const auto a = absorb_into_mode(m, 1);
  for (double w : a.weights()) EXPECT_EQ(w, 1.0);
  for (double s : column_norms(a.factor(0), Norm::kOne)) EXPECT_NEAR(s, 1.0, 1e-12);
  const std::vector<std::size_t> idx{2, 3, 4};
  EXPECT_NEAR(model_entry(a, idx), model_entry(m, idx), 1e-12);
}

TEST(KruskalModel, RejectsNegativeEntries) {
  Matrix a(2, 1, 1.0);
  a(1, 0) = -1.0;
  EXPECT_EQ(kind_of([&] { KruskalModel({1.0}, {a, Matrix(2, 1, 1.0)}); }),
            ErrorKind::kInvalidModel);
  EXPECT_EQ(kind_of([&] { KruskalModel({1.0, 1.0}, {Matrix(2, 1, 1.0)}); }),
            ErrorKind::kInvalidModel);
}

TEST(CheckCompatible, ShapeMismatch) {
  const auto x = make_sparse({2, 2, 2}, std::vector<std::vector<std::size_t>>{{0, 0, 0}}, {1});
  EXPECT_EQ(kind_of([&] { check_compatible(x, KruskalModel::constant({2, 2, 3}, 1)); }),
            ErrorKind::kShapeMismatch);
}

}  // namespace
}  // namespace pcp
