// Nested model comparison via Fisher combination of pairwise p-values:
// a block model against its degree-corrected extension (statistic S1 on
// clustered vertices) and edge homogeneity against block structure
// (statistic S2 on random pairs), plus the k-means plumbing both share.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpt/common.hpp"
#include "lpt/embedding.hpp"
#include "lpt/models.hpp"
#include "lpt/numerics.hpp"
#include "lpt/statistics.hpp"

namespace lpt {

struct KMeansResult {
  std::vector<int> labels;
  Matrix centers;        // K x d, row k is the center of cluster k
  double inertia = 0.0;  // sum of squared distances to assigned centers
};

struct SelectionResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;  // reject the smaller nested model
  // Per-block maximum p-values (S1) or the raw pair p-values (S2).
  std::vector<double> block_pvalues;
  std::vector<int> labels;                     // estimated clustering (S1)
  std::vector<std::pair<Index, Index>> pairs;  // tested vertex pairs, in order
};

namespace detail {

// splitmix64 step; decorrelates sequential stream ids drawn from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Squared distance from every row to its nearest row of `centers`.
inline void nearest_center(const Matrix& rows, const Matrix& centers,
                           std::vector<int>& labels, Vector& dist2) {
  const Index n = rows.rows();
  for (Index i = 0; i < n; ++i) {
    int best = 0;
    double bestd = (rows.row(i) - centers.row(0)).squaredNorm();
    for (Index k = 1; k < centers.rows(); ++k) {
      const double d = (rows.row(i) - centers.row(k)).squaredNorm();
      if (d < bestd) {
        bestd = d;
        best = static_cast<int>(k);
      }
    }
    labels[static_cast<size_t>(i)] = best;
    dist2[i] = bestd;
  }
}

}  // namespace detail

// Lloyd iterations with distance-weighted (k-means++) seeding; `restarts`
// independent runs keep the lowest inertia. Deterministic given `seed`.
inline KMeansResult kmeans(const Matrix& rows, int K, std::uint64_t seed,
                           int restarts = 10, int max_iter = 100) {
  const Index n = rows.rows();
  const Index d = rows.cols();
  if (K < 1) throw UsageError("kmeans: K must be at least 1");
  if (static_cast<Index>(K) > n)
    throw UsageError("kmeans: K = " + std::to_string(K) + " exceeds the " +
                     std::to_string(n) + " available rows");
  if (restarts < 1) throw UsageError("kmeans: restarts must be at least 1");

  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();

  std::vector<int> labels(static_cast<size_t>(n));
  Vector dist2(n);
  for (int run = 0; run < restarts; ++run) {
    // Seeding: first center uniform, the rest proportional to the squared
    // distance from the centers chosen so far.
    Matrix centers(K, d);
    std::uniform_int_distribution<Index> uni(0, n - 1);
    centers.row(0) = rows.row(uni(rng));
    for (int k = 1; k < K; ++k) {
      detail::nearest_center(rows, centers.topRows(k), labels, dist2);
      const double total = dist2.sum();
      if (total <= 0.0) {
        // All rows coincide with some chosen center; any row works.
        centers.row(k) = rows.row(uni(rng));
        continue;
      }
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      Index pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= dist2[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
      centers.row(k) = rows.row(pick);
    }

    std::vector<int> prev;
    for (int iter = 0; iter < max_iter; ++iter) {
      detail::nearest_center(rows, centers, labels, dist2);
      if (labels == prev) break;
      prev = labels;

      Matrix sums = Matrix::Zero(K, d);
      std::vector<Index> counts(static_cast<size_t>(K), 0);
      for (Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<size_t>(i)]) += rows.row(i);
        ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];
      }
      for (int k = 0; k < K; ++k) {
        if (counts[static_cast<size_t>(k)] > 0) {
          centers.row(k) =
              sums.row(k) / static_cast<double>(counts[static_cast<size_t>(k)]);
        } else {
          // Re-seat an emptied cluster on the point farthest from its
          // current center, which keeps the run deterministic.
          Index far = 0;
          dist2.maxCoeff(&far);
          centers.row(k) = rows.row(far);
          dist2[far] = 0.0;
        }
      }
    }

    detail::nearest_center(rows, centers, labels, dist2);
    const double inertia = dist2.sum();
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.labels = labels;
      best.centers = centers;
    }
  }
  return best;
}

// Cluster embedded vertices into K groups: k-means on the embedding rows
// with 10*K restarts. With `normalize_rows` the rows are first projected to
// the unit sphere (degree-corrected spectral clustering); zero rows are left
// untouched.
inline std::vector<int> cluster_vertices(const Embedding& e, int K,
                                         std::uint64_t seed,
                                         bool normalize_rows = false) {
  Matrix rows = e.coords;
  if (normalize_rows) {
    for (Index i = 0; i < rows.rows(); ++i) {
      const double norm = rows.row(i).norm();
      if (norm > 0.0) rows.row(i) /= norm;
    }
  }
  return kmeans(rows, K, seed, 10 * K).labels;
}

namespace detail {

// Fisher combination: the running statistic accumulates -2 log(p) terms,
// with p clamped away from zero so an exact-zero p-value stays finite.
inline double safe_log_pvalue(double p) {
  return std::log(std::max(p, 1e-300));
}

inline SelectionResult combine(double statistic, int dof, double alpha,
                               std::vector<double> block_pvalues) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("model selection: alpha must lie in (0, 1)");
  SelectionResult r;
  r.statistic = statistic;
  r.dof = dof;
  r.alpha = alpha;
  r.p_value = 1.0 - chi2_cdf(statistic, dof);
  r.reject = statistic > chi2_quantile(1.0 - alpha, dof);
  r.block_pvalues = std::move(block_pvalues);
  return r;
}

}  // namespace detail

// Fisher combination over per-block maxima: `pvalues` holds one row per
// block with the m pair p-values of that block. The maximum of m uniform
// p-values, raised to the m-th power, is again uniform, so the combined
// statistic -2m sum_k log(max_i p_ki) has a chi-square reference with 2K
// degrees of freedom under the smaller model.
inline SelectionResult s1_from_pvalues(const Matrix& pvalues,
                                       double alpha = 0.05) {
  const Index K = pvalues.rows();
  const Index m = pvalues.cols();
  if (K < 1 || m < 1)
    throw UsageError("s1_from_pvalues: need at least one block and one pair");
  std::vector<double> zeta(static_cast<size_t>(K));
  double stat = 0.0;
  for (Index k = 0; k < K; ++k) {
    zeta[static_cast<size_t>(k)] = pvalues.row(k).maxCoeff();
    stat += detail::safe_log_pvalue(zeta[static_cast<size_t>(k)]);
  }
  stat *= -2.0 * static_cast<double>(m);
  return detail::combine(stat, 2 * static_cast<int>(K), alpha,
                         std::move(zeta));
}

// Plain Fisher combination of m independent pair p-values, chi-square with
// 2m degrees of freedom under edge homogeneity.
inline SelectionResult s2_from_pvalues(const std::vector<double>& pvalues,
                                       double alpha = 0.05) {
  if (pvalues.empty())
    throw UsageError("s2_from_pvalues: need at least one p-value");
  double stat = 0.0;
  for (const double p : pvalues) stat += detail::safe_log_pvalue(p);
  stat *= -2.0;
  return detail::combine(stat, 2 * static_cast<int>(pvalues.size()), alpha,
                         pvalues);
}

namespace detail {

// Draw m vertex-disjoint pairs from `members` by shuffling and pairing
// consecutive entries; each vertex is used at most once.
inline void disjoint_pairs(std::vector<Index>& members, Index m,
                           std::mt19937_64& rng,
                           std::vector<std::pair<Index, Index>>& out) {
  std::shuffle(members.begin(), members.end(), rng);
  for (Index t = 0; t < m; ++t)
    out.emplace_back(members[static_cast<size_t>(2 * t)],
                     members[static_cast<size_t>(2 * t + 1)]);
}

inline TestResult pair_test(TestKind kind, const Embedding& e, Index i,
                            Index j) {
  switch (kind) {
    case TestKind::TAse:
      return t_ase(e, i, j);
    case TestKind::TLse:
      return t_lse(e, i, j, 1.0);
    default:
      throw UsageError(
          "model selection: only the equality tests (adjacency or "
          "degree-normalized) calibrate the pair p-values");
  }
}

}  // namespace detail

// Block model vs degree-corrected block model. Pipeline: embed the graph in
// d dimensions, cluster the sphere-normalized rows into K groups, draw m
// vertex-disjoint pairs inside every cluster, convert each pair test into a
// p-value, and Fisher-combine the per-cluster maxima. Rejection favors the
// degree-corrected model.
inline SelectionResult s1_statistic(const Graph& g, int K, Index m, int d,
                                    TestKind test = TestKind::TAse,
                                    std::uint64_t seed = 0,
                                    double alpha = 0.05) {
  if (g.directed)
    throw UsageError("s1_statistic: expects an undirected graph");
  if (m < 1) throw UsageError("s1_statistic: m must be at least 1");
  if (K < 1) throw UsageError("s1_statistic: K must be at least 1");
  const Index n = g.n();
  if (static_cast<Index>(K) > n)
    throw UsageError("s1_statistic: K exceeds the number of vertices");

  const Embedding e = test == TestKind::TLse ? lse(g.adjacency, d)
                                             : ase(g.adjacency, d);
  const std::vector<int> labels = cluster_vertices(e, K, seed, true);

  std::vector<std::vector<Index>> members(static_cast<size_t>(K));
  for (Index v = 0; v < n; ++v)
    members[static_cast<size_t>(labels[static_cast<size_t>(v)])].push_back(v);
  for (int k = 0; k < K; ++k) {
    const Index size =
        static_cast<Index>(members[static_cast<size_t>(k)].size());
    if (size < 2 * m)
      throw DataError("s1_statistic: cluster " + std::to_string(k) +
                      " has " + std::to_string(size) + " members, fewer than " +
                      "the " + std::to_string(2 * m) + " needed for " +
                      std::to_string(m) + " disjoint pairs");
  }

  std::mt19937_64 pair_rng(detail::mix_seed(seed, 1));
  Matrix pvals(K, m);
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<size_t>(K) * static_cast<size_t>(m));
  for (int k = 0; k < K; ++k) {
    std::vector<std::pair<Index, Index>> chosen;
    detail::disjoint_pairs(members[static_cast<size_t>(k)], m, pair_rng,
                           chosen);
    for (Index t = 0; t < m; ++t) {
      const auto [i, j] = chosen[static_cast<size_t>(t)];
      pvals(k, t) = detail::pair_test(test, e, i, j).p_value;
    }
    pairs.insert(pairs.end(), chosen.begin(), chosen.end());
  }

  SelectionResult r = s1_from_pvalues(pvals, alpha);
  r.labels = labels;
  r.pairs = std::move(pairs);
  return r;
}

// Edge homogeneity vs block structure: embed in one dimension, test m
// vertex-disjoint random pairs, and Fisher-combine the raw p-values.
// Rejection favors the presence of block structure.
inline SelectionResult s2_statistic(const Graph& g, Index m,
                                    TestKind test = TestKind::TAse,
                                    std::uint64_t seed = 0,
                                    double alpha = 0.05) {
  if (g.directed)
    throw UsageError("s2_statistic: expects an undirected graph");
  if (m < 1) throw UsageError("s2_statistic: m must be at least 1");
  const Index n = g.n();
  if (n < 2 * m)
    throw DataError("s2_statistic: " + std::to_string(n) +
                    " vertices cannot host " + std::to_string(m) +
                    " disjoint pairs");

  const Embedding e = test == TestKind::TLse ? lse(g.adjacency, 1)
                                             : ase(g.adjacency, 1);
  std::vector<Index> everyone(static_cast<size_t>(n));
  std::iota(everyone.begin(), everyone.end(), Index{0});
  std::mt19937_64 pair_rng(detail::mix_seed(seed, 2));
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<size_t>(m));
  detail::disjoint_pairs(everyone, m, pair_rng, pairs);

  std::vector<double> pvals;
  pvals.reserve(static_cast<size_t>(m));
  for (const auto& [i, j] : pairs)
    pvals.push_back(detail::pair_test(test, e, i, j).p_value);

  SelectionResult r = s2_from_pvalues(pvals, alpha);
  r.pairs = std::move(pairs);
  return r;
}

}  // namespace lpt
