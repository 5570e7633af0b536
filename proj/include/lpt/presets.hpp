// Named simulation presets: fixed model layouts with tracked vertex pairs,
// scalable in n while preserving the group proportions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpt/models.hpp"

namespace lpt {

// A model together with the two vertex pairs the experiments track: a pair
// sharing a latent position (calibration under the null) and a pair at a
// local alternative. Directed presets reinterpret the pairs per the
// configuration described in `description`.
struct PairedModel {
  ModelSpec spec;
  Index null_i = 0, null_j = 1;
  Index alt_i = 2, alt_j = 3;
  std::string description;
};

namespace detail {

// Split n into `groups` parts proportional to `weights` by largest
// remainder, so scaled-down presets keep the original proportions.
inline std::vector<Index> largest_remainder(Index n,
                                            const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<Index> counts(weights.size());
  std::vector<std::pair<double, size_t>> rem;
  Index assigned = 0;
  for (size_t g = 0; g < weights.size(); ++g) {
    const double exact = n * weights[g] / total;
    counts[g] = static_cast<Index>(std::floor(exact));
    assigned += counts[g];
    rem.push_back({exact - std::floor(exact), g});
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (Index k = 0; k < n - assigned; ++k) counts[rem[static_cast<size_t>(k)].second]++;
  return counts;
}

// Group id per vertex, blocks in order.
inline std::vector<int> block_layout(const std::vector<Index>& counts) {
  std::vector<int> g;
  for (size_t b = 0; b < counts.size(); ++b)
    g.insert(g.end(), static_cast<size_t>(counts[b]), static_cast<int>(b));
  return g;
}

// Move the first vertex of group `want` (at index >= `from`) to position
// `pos` by swapping.
inline void pin_group(std::vector<int>& g, Index pos, int want) {
  for (size_t i = static_cast<size_t>(pos); i < g.size(); ++i)
    if (g[i] == want) {
      std::swap(g[i], g[static_cast<size_t>(pos)]);
      return;
    }
  throw UsageError("preset: not enough vertices to pin tracked pair");
}

// The seven membership vectors of the mixed-membership layout; the last one
// approaches the first corner at rate epsilon = c / sqrt(n).
inline std::vector<Vector> mixed_vectors(Index n, double c) {
  const double eps = c / std::sqrt(static_cast<double>(n));
  if (eps >= 0.5)
    throw UsageError(
        "preset: the local-alternative membership (1-2eps, eps, eps) with "
        "eps = " +
        std::to_string(c) + "/sqrt(n) leaves the simplex; need n > " +
        std::to_string(4 * c * c));
  std::vector<Vector> v(7, Vector(3));
  v[0] << 1, 0, 0;
  v[1] << 0, 1, 0;
  v[2] << 0, 0, 1;
  v[3] << 0.5, 0.3, 0.2;
  v[4] << 0.3, 0.2, 0.5;
  v[5] << 0.2, 0.5, 0.3;
  v[6] << 1 - 2 * eps, eps, eps;
  return v;
}

// Mixed-membership group layout: six main groups in equal shares plus a
// small "special" group whose share scales as special_ref/n_ref. Tracked
// rows: 0,1 both at the (0.5,0.3,0.2) mixture; 2 at the first corner; 3 in
// the special group.
inline std::vector<int> mixed_layout(Index n, Index special_ref, Index n_ref) {
  const Index special =
      static_cast<Index>(std::lround(static_cast<double>(special_ref) * n / n_ref));
  if (n < special + 12)
    throw UsageError("preset: n too small for the mixed-membership layout");
  std::vector<Index> counts = largest_remainder(n - special, {1, 1, 1, 1, 1, 1});
  counts.push_back(special);
  std::vector<int> g = block_layout(counts);
  pin_group(g, 0, 3);
  pin_group(g, 1, 3);
  pin_group(g, 2, 0);
  pin_group(g, 3, 6);
  return g;
}

inline Matrix memberships_from_groups(const std::vector<int>& g,
                                      const std::vector<Vector>& vectors) {
  Matrix pi(static_cast<Index>(g.size()), vectors[0].size());
  for (size_t i = 0; i < g.size(); ++i)
    pi.row(static_cast<Index>(i)) = vectors[static_cast<size_t>(g[i])].transpose();
  return pi;
}

inline Matrix rank_one_shift_B(double off, double shift) {
  Matrix b = Matrix::Constant(3, 3, off);
  b.diagonal().array() += shift;
  return b;
}

inline double draw_beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x / (x + y);
}

}  // namespace detail

// Mixed-membership model on three communities, B = 0.9*J - 0.6*I (one
// positive and two negative spectral directions). Reference size n = 3100
// with 100 special vertices; other sizes keep the proportions.
inline PairedModel preset_model1(Index n = 3100, double rho = 1.0,
                                 double c = 5.0) {
  const auto g = detail::mixed_layout(n, 100, 3100);
  const Matrix pi =
      detail::memberships_from_groups(g, detail::mixed_vectors(n, c));
  PairedModel pm;
  pm.spec = ModelSpec::mmsbm(detail::rank_one_shift_B(0.9, -0.6), pi, rho);
  pm.description =
      "mixed-membership, indefinite B: null pair at the (0.5,0.3,0.2) "
      "mixture, alternative pair corner-vs-special";
  return pm;
}

// Degree-corrected variant: theta_i ~ U[1, k] drawn once from `seed`.
inline PairedModel preset_model2(Index n = 3100, double rho = 0.25,
                                 double k = 1.5, std::uint64_t seed = 20240901,
                                 double c = 5.0) {
  PairedModel pm = preset_model1(n, rho, c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, k);
  Vector theta(n);
  for (Index i = 0; i < n; ++i) theta[i] = unif(rng);
  pm.spec = ModelSpec::dcsbm(pm.spec.B, pm.spec.Pi, theta, rho);
  pm.description =
      "degree-corrected mixed-membership, theta ~ U[1," + std::to_string(k) +
      "]: same tracked pairs as the base mixed model";
  return pm;
}

// Positive-semidefinite counterpart, B = 0.3*J + 0.6*I (all spectral
// directions positive), same layout and tracked pairs.
inline PairedModel preset_psd(Index n = 3100, double rho = 1.0,
                              double c = 5.0) {
  PairedModel pm = preset_model1(n, rho, c);
  pm.spec.B = detail::rank_one_shift_B(0.3, 0.6);
  pm.description =
      "mixed-membership, positive-definite B: same tracked pairs as the "
      "indefinite variant";
  return pm;
}

enum class DirectedConfig {
  OutNullInAlt,  // pair shares outgoing position, differs in incoming one
  BothNull,      // pair shares both positions
  BothAlt        // pair differs in outgoing position, shares incoming one
};

// Directed mixed-membership model with an asymmetric block matrix.
// Outgoing and incoming memberships are assigned independently (fixed
// shuffle, deterministic per n); reference size n = 4800 with 300 special
// vertices.
inline PairedModel preset_directed(DirectedConfig config, Index n = 4800,
                                   double rho = 1.0, double c = 5.0) {
  Matrix b(3, 3);
  b << 0.9, 0.6, 0.5,
       0.5, 0.9, 0.4,
       0.4, 0.6, 0.9;
  std::vector<int> g1 = detail::mixed_layout(n, 300, 4800);
  std::vector<int> g2 = g1;
  std::mt19937_64 rng(9001);
  std::shuffle(g2.begin(), g2.end(), rng);

  // Pin the tracked pair's memberships on each side per the configuration.
  const auto pin2 = [&](std::vector<int>& g, int w0, int w1) {
    detail::pin_group(g, 0, w0);
    detail::pin_group(g, 1, w1);
  };
  PairedModel pm;
  switch (config) {
    case DirectedConfig::OutNullInAlt:
      pin2(g1, 3, 3);
      pin2(g2, 0, 6);
      pm.description =
          "directed: pair (0,1) shares the outgoing position at the "
          "(0.5,0.3,0.2) mixture and differs corner-vs-special in the "
          "incoming one";
      break;
    case DirectedConfig::BothNull:
      pin2(g1, 0, 0);
      pin2(g2, 3, 3);
      pm.description =
          "directed: pair (0,1) shares both positions (corner outgoing, "
          "mixture incoming)";
      break;
    case DirectedConfig::BothAlt:
      pin2(g1, 0, 6);
      pin2(g2, 0, 0);
      pm.description =
          "directed: pair (0,1) differs corner-vs-special in the outgoing "
          "position and shares the corner incoming one";
      break;
  }
  const auto vecs = detail::mixed_vectors(n, c);
  pm.spec = ModelSpec::mmsbm_directed(
      b, detail::memberships_from_groups(g1, vecs),
      detail::memberships_from_groups(g2, vecs), rho);
  pm.null_i = 0;
  pm.null_j = 1;
  pm.alt_i = 0;
  pm.alt_j = 1;
  return pm;
}

// Popularity-adjusted model: K equal communities, own-community popularity
// Beta(2,1) and cross-community popularity Beta(1,2), drawn fresh from
// `seed`. The "null" tracked pair lies in two different communities (the
// hypothesis being tested is distinct membership); the "alternative" pair
// shares a community.
inline PairedModel preset_pabm(Index n = 4800, int K = 3,
                               std::uint64_t seed = 20240902,
                               double rho = 1.0) {
  const std::vector<Index> counts =
      detail::largest_remainder(n, std::vector<double>(static_cast<size_t>(K), 1.0));
  const std::vector<int> tau_int = detail::block_layout(counts);
  std::mt19937_64 rng(seed);
  Matrix lambda(n, K);
  for (Index i = 0; i < n; ++i)
    for (int l = 0; l < K; ++l)
      lambda(i, l) = tau_int[static_cast<size_t>(i)] == l
                         ? detail::draw_beta(rng, 2.0, 1.0)
                         : detail::draw_beta(rng, 1.0, 2.0);
  PairedModel pm;
  pm.spec = ModelSpec::pabm(lambda, tau_int, rho);
  pm.null_i = 0;
  pm.null_j = counts[0];  // first vertex of the second community
  pm.alt_i = 0;
  pm.alt_j = 1;  // same community
  pm.description =
      "popularity-adjusted, K=" + std::to_string(K) +
      ": null pair spans two communities, alternative pair shares one";
  return pm;
}

// Three-block stochastic block model used by the model-selection
// experiments (nested-pair calibration), B = 0.9*J - 0.6*I.
inline ModelSpec preset_select_sbm(Index n = 1500, double rho = 0.5) {
  const std::vector<Index> counts = detail::largest_remainder(n, {1, 1, 1});
  return ModelSpec::sbm(detail::rank_one_shift_B(0.9, -0.6),
                        detail::block_layout(counts), rho);
}

// Degree-corrected alternative for the model-selection experiments:
// theta_i ~ U[1, k] drawn from `seed`.
inline ModelSpec preset_select_dcsbm(Index n = 1500, double rho = 0.25,
                                     double k = 1.5,
                                     std::uint64_t seed = 20240903) {
  const std::vector<Index> counts = detail::largest_remainder(n, {1, 1, 1});
  const std::vector<int> tau_int = detail::block_layout(counts);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, k);
  Vector theta(n);
  for (Index i = 0; i < n; ++i) theta[i] = unif(rng);
  return ModelSpec::dcsbm(detail::rank_one_shift_B(0.9, -0.6),
                          memberships_from_labels(tau_int, 3), theta, rho);
}

// Homogeneous one-parameter model (single latent dimension) for the
// nested-pair calibration of edge homogeneity.
inline ModelSpec preset_select_er(Index n = 1500, double p = 0.5) {
  return ModelSpec::raw(Matrix::Constant(n, 1, std::sqrt(p)), Signature{1, 0},
                        1.0);
}

}  // namespace lpt
