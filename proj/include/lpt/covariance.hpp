// Per-vertex covariance estimators for the embedded positions, their
// theoretical (population) counterparts, and the Jacobians of the
// normalization maps used by the scale-invariant tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "lpt/common.hpp"
#include "lpt/embedding.hpp"
#include "lpt/models.hpp"

namespace lpt {

namespace detail {

inline void check_vertex(Index i, Index n, const char* where) {
  if (i < 0 || i >= n)
    throw UsageError(std::string(where) + ": vertex index " +
                     std::to_string(i) + " out of range [0, " +
                     std::to_string(n) + ")");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Empirical covariances (plug-in estimators from an embedding)
// ---------------------------------------------------------------------------

// Covariance estimate for an adjacency-embedded row:
//   n S^{-1} [ sum_k X_k X_k' p_ik (1 - p_ik) ] S^{-1},
// with S the signed spectral diagonal and p_ik = X_i' I_{a,b} X_k clamped to
// [0,1].
inline Matrix sigma_hat_ase(const Embedding& e, Index i) {
  detail::check_vertex(i, e.n(), "sigma_hat_ase");
  const Index n = e.n();
  const Vector xi = apply_iab_right(e.coords.row(i), e.sig).transpose();
  Vector p = e.coords * xi;
  for (Index k = 0; k < n; ++k) p[k] = std::clamp(p[k], 0.0, 1.0);
  const Vector w = p.array() * (1.0 - p.array());
  const Matrix mid = e.coords.transpose() * w.asDiagonal() * e.coords;
  const Vector sinv = e.spectrum.cwiseInverse();
  return static_cast<double>(n) * sinv.asDiagonal() * mid * sinv.asDiagonal();
}

// Covariance estimate for the orthonormal-basis row U_i = X_i |S|^{-1/2}:
//   n rho |S|^{-1/2} SigmaHat(X_i) |S|^{-1/2}.
inline Matrix sigma_hat_U(const Embedding& e, Index i,
                          double assumed_rho = 1.0) {
  const Matrix sx = sigma_hat_ase(e, i);
  const Vector rinv = e.spectrum.cwiseAbs().cwiseSqrt().cwiseInverse();
  return static_cast<double>(e.n()) * assumed_rho * rinv.asDiagonal() * sx *
         rinv.asDiagonal();
}

// Covariance estimate for a degree-normalized embedded row:
//   n^2 rho I [ sum_k Zb_ik Zb_ik' w_ik ] I,
// where Zb_ik = (Xb'Xb)^{-1} Xb_k / sqrt(d_k) - I Xb_i / (2 sqrt(d_i)),
// w_ik = (sqrt(d_k)/sqrt(d_i)) c_ik - d_k c_ik^2 clamped at zero, and
// c_ik = Xb_i' I Xb_k.
inline Matrix sigma_hat_lse(const Embedding& e, Index i,
                            double assumed_rho = 1.0) {
  detail::check_vertex(i, e.n(), "sigma_hat_lse");
  if (e.kind != EmbeddingKind::LSE)
    throw UsageError("sigma_hat_lse: embedding is not degree-normalized");
  const Index n = e.n();
  const int d = e.d();
  const Matrix& xb = e.coords;
  const Vector rootdeg = e.degrees.cwiseSqrt();
  const Matrix gram = xb.transpose() * xb;
  const Matrix ginv = gram.ldlt().solve(Matrix::Identity(d, d));

  const Vector xi_iab = apply_iab_right(xb.row(i), e.sig).transpose();
  const Vector c = xb * xi_iab;

  Matrix zb = xb * ginv.transpose();
  zb.array().colwise() /= rootdeg.array();
  const Vector shift = xi_iab / (2.0 * rootdeg[i]);
  zb.rowwise() -= shift.transpose();

  Vector w(n);
  for (Index k = 0; k < n; ++k)
    w[k] = std::max(0.0, (rootdeg[k] / rootdeg[i]) * c[k] -
                             e.degrees[k] * c[k] * c[k]);
  Matrix mid = zb.transpose() * w.asDiagonal() * zb;
  mid = apply_iab_right(mid, e.sig);
  mid = apply_iab_right(mid.transpose(), e.sig).transpose();
  return static_cast<double>(n) * static_cast<double>(n) * assumed_rho * mid;
}

// Covariance estimates for the directed embedding; the outgoing row's
// covariance is driven by the incoming factors and vice versa:
//   out: n (Y'Y)^{-1} [ sum_k Y_k Y_k' p_ik (1 - p_ik) ] (Y'Y)^{-1},
//        p_ik = X_i' Y_k;
//   in:  the same with the roles of X and Y swapped and p_ki = X_k' Y_i.
inline Matrix sigma_hat_directed(const DirectedEmbedding& de, Index i,
                                 bool out) {
  const Matrix& own = out ? de.out.coords : de.in.coords;
  const Matrix& other = out ? de.in.coords : de.out.coords;
  detail::check_vertex(i, own.rows(), "sigma_hat_directed");
  const Index n = own.rows();
  const int d = static_cast<int>(own.cols());
  Vector p = other * own.row(i).transpose();
  for (Index k = 0; k < n; ++k) p[k] = std::clamp(p[k], 0.0, 1.0);
  const Vector w = p.array() * (1.0 - p.array());
  const Matrix mid = other.transpose() * w.asDiagonal() * other;
  const Matrix gram = other.transpose() * other;
  const Matrix ginv = gram.ldlt().solve(Matrix::Identity(d, d));
  return static_cast<double>(n) * ginv * mid * ginv;
}

// ---------------------------------------------------------------------------
// Theoretical covariances (population quantities from latent rows)
// ---------------------------------------------------------------------------

// Population covariance of an adjacency-embedded row, expressed through the
// latent rows X:
//   (n / rho) I M^{-1} [ sum_k X_k X_k' p_ik (1 - p_ik) ] M^{-1} I,
// with M = X'X and p_ik = rho X_i' I X_k.
inline Matrix sigma_theoretical_X(const Matrix& X, const Signature& sig,
                                  double rho, Index i) {
  detail::check_vertex(i, X.rows(), "sigma_theoretical_X");
  const Index n = X.rows();
  const int d = static_cast<int>(X.cols());
  const Vector xi_iab = apply_iab_right(X.row(i), sig).transpose();
  const Vector p = rho * (X * xi_iab);
  const Vector w = p.array() * (1.0 - p.array());
  const Matrix mid = X.transpose() * w.asDiagonal() * X;
  const Matrix minv =
      (X.transpose() * X).ldlt().solve(Matrix::Identity(d, d));
  Matrix s = (static_cast<double>(n) / rho) * minv * mid * minv;
  s = apply_iab_right(s, sig);
  s = apply_iab_right(s.transpose(), sig).transpose();
  return s;
}

// Population covariance of a canonical row Z_i = U_i |S|^{1/2}:
//   n S^{-1} [ sum_k Z_k Z_k' q_ik (1 - q_ik) ] S^{-1},  q_ik = Z_i' I Z_k.
inline Matrix sigma_theoretical_Z(const CanonicalZ& z, Index i) {
  detail::check_vertex(i, z.Z.rows(), "sigma_theoretical_Z");
  const Index n = z.Z.rows();
  const Vector zi_iab = apply_iab_right(z.Z.row(i), z.sig).transpose();
  const Vector q = z.Z * zi_iab;
  const Vector w = q.array() * (1.0 - q.array());
  const Matrix mid = z.Z.transpose() * w.asDiagonal() * z.Z;
  const Vector sinv = z.spectrum.cwiseInverse();
  return static_cast<double>(n) * sinv.asDiagonal() * mid * sinv.asDiagonal();
}

// Population covariance of a degree-normalized row, from the latent rows:
//   (n^2 rho^2 / t_i) I [ sum_k zeta_ik zeta_ik' m_ik ] I, where
//   zeta_ik = rho^{1/2} ( (rho X' T^{-1} X)^{-1} X_k / t_k - I X_i / (2 t_i) ),
//   m_ik = X_i' I X_k (1 - rho X_i' I X_k),
// and t_i = sum_j rho X_i' I X_j runs over all j including i.
inline Matrix sigma_theoretical_lse(const Matrix& X, const Signature& sig,
                                    double rho, Index i) {
  detail::check_vertex(i, X.rows(), "sigma_theoretical_lse");
  const Index n = X.rows();
  const int d = static_cast<int>(X.cols());
  const Matrix xiab = apply_iab_right(X, sig);
  const Vector t = rho * (X * xiab.colwise().sum().transpose());
  if (t.minCoeff() <= 0.0)
    throw NumericalError(
        "sigma_theoretical_lse: nonpositive expected degree");
  const Matrix a_inner =
      rho * X.transpose() * t.cwiseInverse().asDiagonal() * X;
  const Matrix a = a_inner.ldlt().solve(Matrix::Identity(d, d));

  const Vector xi_iab = xiab.row(i).transpose();
  const Vector c = X * xi_iab;  // X_i' I X_k over k

  Matrix zeta = X * a.transpose();
  zeta.array().colwise() /= t.array();
  zeta.rowwise() -= (xi_iab / (2.0 * t[i])).transpose();
  zeta *= std::sqrt(rho);

  Vector m(n);
  for (Index k = 0; k < n; ++k) m[k] = c[k] * (1.0 - rho * c[k]);
  Matrix mid = zeta.transpose() * m.asDiagonal() * zeta;
  mid = apply_iab_right(mid, sig);
  mid = apply_iab_right(mid.transpose(), sig).transpose();
  return (static_cast<double>(n) * static_cast<double>(n) * rho * rho / t[i]) *
         mid;
}

// Population covariance of a canonical directed row (outgoing Z_i or
// incoming Zt_i):
//   n S^{-1} [ sum_k W_k W_k' q (1 - q) ] S^{-1},
// where W runs over the factors of the opposite side and q is the edge
// probability between i and k.
inline Matrix sigma_theoretical_directed(const CanonicalDirected& c, Index i,
                                         bool out) {
  const Matrix& own = out ? c.Z : c.Zt;
  const Matrix& other = out ? c.Zt : c.Z;
  detail::check_vertex(i, own.rows(), "sigma_theoretical_directed");
  const Index n = own.rows();
  const Vector q = other * own.row(i).transpose();
  const Vector w = q.array() * (1.0 - q.array());
  const Matrix mid = other.transpose() * w.asDiagonal() * other;
  const Vector sinv = c.spectrum.cwiseInverse();
  return static_cast<double>(n) * sinv.asDiagonal() * mid * sinv.asDiagonal();
}

// ---------------------------------------------------------------------------
// Normalization maps and their Jacobians
// ---------------------------------------------------------------------------

// Euclidean projection to the unit sphere, s(xi) = xi / ||xi||.
inline Vector sphere_map(const Vector& xi) {
  const double nrm = xi.norm();
  if (nrm <= 0.0) throw UsageError("sphere_map: zero vector");
  return xi / nrm;
}

// Jacobian of the sphere map: (I - s s') / ||xi||.
inline Matrix jacobian_sphere(const Vector& xi) {
  const double nrm = xi.norm();
  if (nrm <= 0.0) throw UsageError("jacobian_sphere: zero vector");
  const Vector s = xi / nrm;
  return (Matrix::Identity(xi.size(), xi.size()) - s * s.transpose()) / nrm;
}

// Indefinite norm |xi' I_{a,b} xi|^{1/2}.
inline double indefinite_norm(const Vector& xi, const Signature& sig) {
  return std::sqrt(std::abs(indefinite_dot(xi, xi, sig)));
}

// Projection by the indefinite norm, s'(xi) = xi / ||xi||_I.
inline Vector indefinite_sphere_map(const Vector& xi, const Signature& sig) {
  const double nrm = indefinite_norm(xi, sig);
  if (nrm <= 0.0)
    throw NumericalError("indefinite_sphere_map: null vector (zero "
                         "indefinite norm)");
  return xi / nrm;
}

// Jacobian of the indefinite projection:
//   (I - xi xi' I_{a,b} / ||xi||_I^2) / ||xi||_I   (for xi' I xi > 0).
inline Matrix jacobian_indefinite(const Vector& xi, const Signature& sig) {
  const double quad = indefinite_dot(xi, xi, sig);
  if (quad <= 0.0)
    throw NumericalError(
        "jacobian_indefinite: the indefinite norm is not positive at this "
        "point");
  const double nrm = std::sqrt(quad);
  const Matrix outer =
      xi * apply_iab_right(xi.transpose(), sig) / quad;
  return (Matrix::Identity(xi.size(), xi.size()) - outer) / nrm;
}

// Coordinate-ratio map s~(xi) = (xi_2, ..., xi_d) / xi_1 in R^{d-1}.
inline Vector ratio_map(const Vector& xi) {
  if (xi.size() < 2) throw UsageError("ratio_map: need dimension >= 2");
  if (xi[0] == 0.0)
    throw NumericalError("ratio_map: leading coordinate is zero");
  return xi.tail(xi.size() - 1) / xi[0];
}

// Jacobian of the ratio map, the (d-1) x d matrix (1/xi_1) [ -s~(xi) | I ].
inline Matrix jacobian_ratio(const Vector& xi) {
  const Index d = xi.size();
  if (d < 2) throw UsageError("jacobian_ratio: need dimension >= 2");
  if (xi[0] == 0.0)
    throw NumericalError("jacobian_ratio: leading coordinate is zero");
  Matrix j = Matrix::Zero(d - 1, d);
  j.col(0) = -xi.tail(d - 1) / (xi[0] * xi[0]);
  j.rightCols(d - 1) = Matrix::Identity(d - 1, d - 1) / xi[0];
  return j;
}

}  // namespace lpt
