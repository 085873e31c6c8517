#pragma once

// Brute-force reference computations shared by the unit and acceptance
// tests. Everything here works on dense enumerations and avoids the library
// kernels it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "pcp/kruskal.hpp"
#include "pcp/objective.hpp"
#include "pcp/rng.hpp"
#include "pcp/sparse_tensor.hpp"

namespace pcp::oracle {

inline std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

// Row-major multi-index of linear position `e`.
inline std::vector<std::size_t> unravel(std::size_t e, const Shape& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = e % shape[k];
    e /= shape[k];
  }
  return idx;
}

inline double entry(const KruskalModel& m, const std::vector<std::size_t>& idx) {
  double sum = 0.0;
  for (std::size_t r = 0; r < m.rank(); ++r) {
    double p = m.weights()[r];
    for (std::size_t k = 0; k < idx.size(); ++k) p *= m.factor(k)(idx[k], r);
    sum += p;
  }
  return sum;
}

inline std::vector<double> dense_model(const KruskalModel& m) {
  const Shape shape = m.shape();
  std::vector<double> out(numel(shape));
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = entry(m, unravel(e, shape));
  return out;
}

inline std::vector<double> dense_tensor(const SparseCountTensor& x) {
  std::vector<double> out(numel(x.shape()), 0.0);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    std::size_t e = 0;
    for (std::size_t k = 0; k < x.ndims(); ++k) e = e * x.size(k) + x.subscript(n, k);
    out[e] = static_cast<double>(x.value(n));
  }
  return out;
}

inline double dense_nll(const SparseCountTensor& x, const KruskalModel& m,
                        double eps = kDefaultLogEps) {
  const auto xd = dense_tensor(x);
  const auto md = dense_model(m);
  double f = 0.0;
  for (std::size_t e = 0; e < xd.size(); ++e) {
    f += md[e];
    if (xd[e] != 0.0) f -= xd[e] * std::log(std::max(md[e], eps));
  }
  return f;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                            double lo = 0.1, double hi = 1.0) {
  Matrix a(rows, cols);
  for (double& v : a.data()) v = lo + (hi - lo) * rng.uniform();
  return a;
}

inline KruskalModel random_model(const Shape& shape, std::size_t rank, Rng& rng,
                                 double lo = 0.1, double hi = 1.0) {
  std::vector<Matrix> f;
  for (std::size_t s : shape) f.push_back(random_matrix(s, rank, rng, lo, hi));
  std::vector<double> w(rank);
  for (double& v : w) v = 0.5 + rng.uniform();
  return KruskalModel(std::move(w), std::move(f));
}

// Each entry is nonzero with probability `density`, counts in 1..max_count.
inline SparseCountTensor random_tensor(const Shape& shape, double density, Rng& rng,
                                       Count max_count = 5) {
  std::vector<std::vector<std::size_t>> coords;
  std::vector<Count> values;
  for (std::size_t e = 0; e < numel(shape); ++e) {
    if (rng.uniform() < density) {
      coords.push_back(unravel(e, shape));
      values.push_back(1 + static_cast<Count>(rng.index(static_cast<std::size_t>(max_count))));
    }
  }
  return make_sparse(shape, coords, values);
}

// Central differences of the dense NLL with respect to factor (k, i, r)
// and weight r.
inline double fd_factor(const SparseCountTensor& x, KruskalModel m, std::size_t k,
                        std::size_t i, std::size_t r, double h = 1e-6) {
  const double base = m.factor(k)(i, r);
  m.factor(k)(i, r) = base + h;
  const double fp = dense_nll(x, m);
  m.factor(k)(i, r) = base - h;
  const double fm = dense_nll(x, m);
  return (fp - fm) / (2.0 * h);
}

inline double fd_weight(const SparseCountTensor& x, KruskalModel m, std::size_t r,
                        double h = 1e-6) {
  const double base = m.weights()[r];
  m.weights()[r] = base + h;
  const double fp = dense_nll(x, m);
  m.weights()[r] = base - h;
  const double fm = dense_nll(x, m);
  return (fp - fm) / (2.0 * h);
}

inline double cosine(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    dot += a(i, ra) * b(i, rb);
    na += a(i, ra) * a(i, ra);
    nb += b(i, rb) * b(i, rb);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double xi(const KruskalModel& m, std::size_t r) {
  double v = m.weights()[r];
  for (std::size_t k = 0; k < m.ndims(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.factor(k).rows(); ++i) s += m.factor(k)(i, r) * m.factor(k)(i, r);
    v *= std::sqrt(s);
  }
  return v;
}

// Factor match score by enumerating all R! matchings.
inline double fms_brute(const KruskalModel& a, const KruskalModel& b) {
  const std::size_t rank = a.rank();
  std::vector<std::size_t> perm(rank);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = -1.0;
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < rank; ++r) {
      const std::size_t s = perm[r];
      const double xa = xi(a, r), xb = xi(b, s);
      const double hi = std::max(xa, xb);
      double score = hi == 0.0 ? 1.0 : 1.0 - std::abs(xa - xb) / hi;
      for (std::size_t k = 0; k < a.ndims(); ++k) score *= cosine(a.factor(k), r, b.factor(k), s);
      total += score;
    }
    best = std::max(best, total / static_cast<double>(rank));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Poisson MLE of a rank-one model: the outer product of the mode marginals
// scaled by the total count. Returns the NLL at that optimum.
inline double rank1_mle_nll(const SparseCountTensor& x) {
  const double total = static_cast<double>(x.total_count());
  std::vector<std::vector<double>> marg(x.ndims());
  for (std::size_t k = 0; k < x.ndims(); ++k) marg[k].assign(x.size(k), 0.0);
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    for (std::size_t k = 0; k < x.ndims(); ++k) {
      marg[k][x.subscript(n, k)] += static_cast<double>(x.value(n));
    }
  }
  double f = total;  // the model sums to the total count
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    double m = total;
    for (std::size_t k = 0; k < x.ndims(); ++k) m *= marg[k][x.subscript(n, k)] / total;
    f -= static_cast<double>(x.value(n)) * std::log(m);
  }
  return f;
}

}  // namespace pcp::oracle
