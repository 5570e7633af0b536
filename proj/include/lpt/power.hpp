// Theoretical local-alternative analysis: non-centrality parameters of the
// two-vertex tests under a specified model, the implied asymptotic power,
// and the second-order gap between the degree-normalized and adjacency
// variants.
#pragma once

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "lpt/common.hpp"
#include "lpt/covariance.hpp"
#include "lpt/models.hpp"
#include "lpt/numerics.hpp"
#include "lpt/statistics.hpp"

namespace lpt {

struct NcpReport {
  double mu = 0.0;  // non-centrality parameter
  int dof = 0;
  double alpha = 0.05;
  double power = 0.0;
  std::string formula_variant;
};

// Asymptotic power of a level-alpha chi-square test with the given
// non-centrality: P( chi2(dof, mu) > q_{1-alpha} ).
inline double theoretical_power(double mu, int dof, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("theoretical_power: alpha must lie in (0, 1)");
  const double q = chi2_quantile(1.0 - alpha, dof);
  return 1.0 - noncentral_chi2_cdf(q, dof, mu);
}

namespace detail {

inline NcpReport make_report(double mu, int dof, double alpha,
                             std::string variant) {
  NcpReport r;
  r.mu = mu;
  r.dof = dof;
  r.alpha = alpha;
  r.power = theoretical_power(mu, dof, alpha);
  r.formula_variant = std::move(variant);
  return r;
}

}  // namespace detail

// Non-centrality of the adjacency equality test at a local alternative:
//   mu = n rho (X_i - X_j)' ( Sigma(X_i) + Sigma(X_j) )^{-1} (X_i - X_j).
inline NcpReport ncp_t_ase(const Matrix& X, const Signature& sig, double rho,
                           Index i, Index j, double alpha = 0.05) {
  detail::check_vertex(i, X.rows(), "ncp_t_ase");
  detail::check_vertex(j, X.rows(), "ncp_t_ase");
  const Vector diff = (X.row(i) - X.row(j)).transpose();
  const Matrix pooled = sigma_theoretical_X(X, sig, rho, i) +
                        sigma_theoretical_X(X, sig, rho, j);
  const double mu = static_cast<double>(X.rows()) * rho *
                    detail::mahalanobis(diff, pooled, "ncp_t_ase");
  return detail::make_report(mu, static_cast<int>(X.cols()), alpha, "t");
}

enum class NcpForm { Canonical, Latent };

// Non-centrality of the scale-invariant adjacency test, evaluated on the
// canonical rows Z with the same Euclidean projection s(x) = x/|x| used by
// the sample statistic:
//   mu = n (s(Z_i)-s(Z_j))'
//        ( J(Z_i) [Sigma(Z_i) + (|Z_i|^2/|Z_j|^2) Sigma(Z_j)] J(Z_i) )^+
//        (s(Z_i)-s(Z_j)).
// Evaluated this way, mu equals the value of the sample statistic on the
// exact probability matrix, and it is invariant to the latent
// representative because the canonical rows are recovered from the
// probability matrix itself. The two forms differ only in how the
// covariances are produced:
//  - Canonical: Sigma(Z_i) computed natively in the canonical frame;
//  - Latent: Sigma(X_i) computed in the supplied frame and transported
//    through the exact linear map relating the frames (Z = sqrt(rho) X W'
//    gives Sigma(Z_i) = rho W Sigma(X_i) W').
// (The indefinite-normalization rewrite of this quantity trades the
// Euclidean projection for s'(x) = x/|x|_I; its difference vector carries a
// leading-order component outside the range of its pooled matrix, which a
// pseudoinverse silently discards, so it underestimates the finite-n
// statistic and is not used here.)
inline NcpReport ncp_g_ase(const Matrix& X, const Signature& sig, double rho,
                           Index i, Index j, NcpForm form = NcpForm::Canonical,
                           double alpha = 0.05) {
  detail::check_vertex(i, X.rows(), "ncp_g_ase");
  detail::check_vertex(j, X.rows(), "ncp_g_ase");
  detail::require_scale_dof(static_cast<int>(X.cols()), "ncp_g_ase");
  const double n = static_cast<double>(X.rows());
  const CanonicalZ cz = canonical_from_latent(X, sig, rho);
  const Vector zi = cz.Z.row(i).transpose();
  const Vector zj = cz.Z.row(j).transpose();
  const double qi = zi.squaredNorm();
  const double qj = zj.squaredNorm();
  if (qi <= 0.0 || qj <= 0.0)
    throw NumericalError("ncp_g_ase: zero-length row at a tested vertex");
  Matrix si, sj;
  if (form == NcpForm::Canonical) {
    si = sigma_theoretical_Z(cz, i);
    sj = sigma_theoretical_Z(cz, j);
  } else {
    // Z = rho^{1/2} X W' with W' in the indefinite orthogonal group, so the
    // latent-frame covariance transports as W Sigma(X_i) W': the middle sum
    // picks up rho W . W', each signed inverse scale matrix contributes
    // rho^{-1} I W^{-T} . W^{-1} I, and W^{-1} = I W' I cancels every
    // remaining I and rho factor.
    const Matrix wt = (X.transpose() * X)
                          .ldlt()
                          .solve(X.transpose() * cz.Z) /
                      std::sqrt(rho);
    const Matrix w = wt.transpose();
    si = w * sigma_theoretical_X(X, sig, rho, i) * w.transpose();
    sj = w * sigma_theoretical_X(X, sig, rho, j) * w.transpose();
  }
  const Vector diff = sphere_map(zi) - sphere_map(zj);
  const Matrix ji = jacobian_sphere(zi);
  const Matrix pooled = ji * (si + (qi / qj) * sj) * ji.transpose();
  const double mu = n * detail::mahalanobis_pinv(diff, pooled);
  return detail::make_report(mu, static_cast<int>(X.cols()) - 1, alpha,
                             form == NcpForm::Canonical ? "g-canonical"
                                                        : "g-latent");
}

// Non-centrality of the degree-normalized equality test:
//   mu = n^2 rho^2 ( X_i/sqrt(t_i) - X_j/sqrt(t_j) )'
//        ( SigmaT(X_i) + SigmaT(X_j) )^{-1} ( ... ),
// with t the expected degrees including the self term.
inline NcpReport ncp_t_lse(const Matrix& X, const Signature& sig, double rho,
                           Index i, Index j, double alpha = 0.05) {
  detail::check_vertex(i, X.rows(), "ncp_t_lse");
  detail::check_vertex(j, X.rows(), "ncp_t_lse");
  const double n = static_cast<double>(X.rows());
  const Matrix xiab = apply_iab_right(X, sig);
  const Vector t = rho * (X * xiab.colwise().sum().transpose());
  const Vector diff = (X.row(i).transpose() / std::sqrt(t[i])) -
                      (X.row(j).transpose() / std::sqrt(t[j]));
  const Matrix pooled = sigma_theoretical_lse(X, sig, rho, i) +
                        sigma_theoretical_lse(X, sig, rho, j);
  const double mu =
      n * n * rho * rho * detail::mahalanobis(diff, pooled, "ncp_t_lse");
  return detail::make_report(mu, static_cast<int>(X.cols()), alpha, "t");
}

// Non-centrality of the scale-invariant degree-normalized test, computed in
// the canonical frame of the scaled latent rows Xt = rho^{1/2} T^{-1/2} X:
//   Zt = canonical rows of Xt (Xt = Zt Q), Sigma(Zt_i) = Q^{-T} SigmaT(X_i)
//   Q^{-1},
//   mu = n^2 rho (s(Zt_i)-s(Zt_j))'
//        ( J(Zt_i) Sigma(Zt_i) J(Zt_i)' + J(Zt_j) Sigma(Zt_j) J(Zt_j)' )^+
//        (s(Zt_i)-s(Zt_j)).
inline NcpReport ncp_g_lse(const Matrix& X, const Signature& sig, double rho,
                           Index i, Index j, double alpha = 0.05) {
  detail::check_vertex(i, X.rows(), "ncp_g_lse");
  detail::check_vertex(j, X.rows(), "ncp_g_lse");
  detail::require_scale_dof(static_cast<int>(X.cols()), "ncp_g_lse");
  const double n = static_cast<double>(X.rows());
  const int d = static_cast<int>(X.cols());
  const Matrix xiab = apply_iab_right(X, sig);
  const Vector t = rho * (X * xiab.colwise().sum().transpose());
  Matrix xt = std::sqrt(rho) * X;
  xt.array().colwise() /= t.array().sqrt();

  const CanonicalZ cz = canonical_from_latent(xt, sig, 1.0);
  // Xt = Zt Q  =>  Q = (Zt' Zt)^{-1} Zt' Xt, and covariances transport by
  // Q^{-1} on each side.
  const Matrix q =
      (cz.Z.transpose() * cz.Z).ldlt().solve(cz.Z.transpose() * xt);
  const Matrix qinv = q.inverse();

  const auto sigma_zt = [&](Index v) {
    return (qinv.transpose() * sigma_theoretical_lse(X, sig, rho, v) * qinv)
        .eval();
  };
  const Vector zi = cz.Z.row(i).transpose();
  const Vector zj = cz.Z.row(j).transpose();
  const Vector diff = sphere_map(zi) - sphere_map(zj);
  const Matrix ji = jacobian_sphere(zi);
  const Matrix jj = jacobian_sphere(zj);
  const Matrix pooled = ji * sigma_zt(i) * ji.transpose() +
                        jj * sigma_zt(j) * jj.transpose();
  const double mu = n * n * rho * detail::mahalanobis_pinv(diff, pooled);
  return detail::make_report(mu, d - 1, alpha, "g-canonical");
}

enum class DirectedSide { Out, In, Both };

// Non-centrality of the directed equality tests, evaluated on the canonical
// factors Z (outgoing) and Zt (incoming) with Z Zt' = rho X Y':
//   mu_side = n (W_i - W_j)' ( Sigma(W_i) + Sigma(W_j) )^{-1} (W_i - W_j)
// with W the factors of the tested side; the joint version sums both sides
// and doubles the dof. The factors absorb rho, so this equals the value of
// the sample statistic evaluated on the exact probability matrix.
inline NcpReport ncp_directed(const Matrix& X, const Matrix& Y, double rho,
                              Index i, Index j, DirectedSide side,
                              double alpha = 0.05) {
  detail::check_vertex(i, X.rows(), "ncp_directed");
  detail::check_vertex(j, X.rows(), "ncp_directed");
  const double n = static_cast<double>(X.rows());
  const int d = static_cast<int>(X.cols());
  const CanonicalDirected c = canonical_directed_from_latent(X, Y, rho);
  const auto side_mu = [&](bool out) {
    const Matrix& w = out ? c.Z : c.Zt;
    const Vector diff = (w.row(i) - w.row(j)).transpose();
    const Matrix pooled = sigma_theoretical_directed(c, i, out) +
                          sigma_theoretical_directed(c, j, out);
    return n * detail::mahalanobis(diff, pooled, "ncp_directed");
  };
  switch (side) {
    case DirectedSide::Out:
      return detail::make_report(side_mu(true), d, alpha, "t-out");
    case DirectedSide::In:
      return detail::make_report(side_mu(false), d, alpha, "t-in");
    case DirectedSide::Both:
      return detail::make_report(side_mu(true) + side_mu(false), 2 * d, alpha,
                                 "t-both");
  }
  throw UsageError("ncp_directed: unknown side");
}

// Second-order difference between the degree-normalized and adjacency
// non-centralities in a balanced model with common expected degree t:
//   gap = 3 n^2 rho^2 / ( 8 t (1 - (3 n rho / 4 t) X_i' Sigma(X_i)^{-1} X_i) )
//         * [ (X_i - X_j)' Sigma(X_i)^{-1} X_i ]^2.
inline double lse_ase_ncp_gap(const Matrix& X, const Signature& sig,
                              double rho, Index i, Index j) {
  detail::check_vertex(i, X.rows(), "lse_ase_ncp_gap");
  detail::check_vertex(j, X.rows(), "lse_ase_ncp_gap");
  const double n = static_cast<double>(X.rows());
  const Matrix xiab = apply_iab_right(X, sig);
  const Vector tvec = rho * (X * xiab.colwise().sum().transpose());
  const double t = tvec[i];
  const Matrix sigma = sigma_theoretical_X(X, sig, rho, i);
  const Vector xi = X.row(i).transpose();
  const Vector diff = (X.row(i) - X.row(j)).transpose();
  const Vector sx = sigma.ldlt().solve(xi);
  const double self = xi.dot(sx);
  const double cross = diff.dot(sx);
  if (cross == 0.0) return 0.0;
  const double denom = 1.0 - (3.0 * n * rho / (4.0 * t)) * self;
  if (denom <= 0.0)
    throw NumericalError(
        "lse_ase_ncp_gap: expansion denominator is nonpositive; the "
        "second-order approximation does not apply");
  return (3.0 * n * n * rho * rho / (8.0 * t * denom)) * cross * cross;
}

// Random element of the indefinite orthogonal group O(a,b): Q = exp(G) with
// G I_{a,b} + I_{a,b} G' = 0, i.e. G = [[A, B], [B', D]] with A, D skew.
inline Matrix sample_indefinite_orthogonal(const Signature& sig,
                                           std::uint64_t seed,
                                           double scale = 0.3) {
  const int d = sig.d();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix g = Matrix::Zero(d, d);
  for (int r = 0; r < sig.a; ++r)
    for (int c = r + 1; c < sig.a; ++c) {
      g(r, c) = gauss(rng);
      g(c, r) = -g(r, c);
    }
  for (int r = sig.a; r < d; ++r)
    for (int c = r + 1; c < d; ++c) {
      g(r, c) = gauss(rng);
      g(c, r) = -g(r, c);
    }
  for (int r = 0; r < sig.a; ++r)
    for (int c = sig.a; c < d; ++c) {
      g(r, c) = gauss(rng);
      g(c, r) = g(r, c);
    }
  return g.exp();
}

}  // namespace lpt
