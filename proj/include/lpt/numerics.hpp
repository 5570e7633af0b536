// Dense/iterative eigensolvers, SVD, pseudoinverse, and chi-square /
// normal distribution functions used by every other header.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "lpt/common.hpp"

namespace lpt {

// ---------------------------------------------------------------------------
// Spectral decompositions
// ---------------------------------------------------------------------------

// Eigenpairs sorted by descending |value|; vectors are orthonormal columns.
struct SymEigen {
  Vector values;
  Matrix vectors;
};

struct Svd {
  Matrix u;
  Vector s;  // nonnegative, descending
  Matrix v;
};

// Matrix-free symmetric operator: y = M x on vectors of length n.
struct LinOp {
  Index n = 0;
  std::function<void(const Vector&, Vector&)> apply;
};

namespace detail {

// Deterministic sign convention: each vector's entry sum is >= 0; on a ~zero
// sum the largest-magnitude entry is made positive. Returns -1 if flipped.
inline double sign_fix_column(Eigen::Ref<Vector> v) {
  const double s = v.sum();
  const double scale = v.norm();
  double flip = 1.0;
  if (std::abs(s) > 1e-12 * std::max(1.0, scale)) {
    if (s < 0) flip = -1.0;
  } else {
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) flip = -1.0;
  }
  if (flip < 0) v = -v;
  return flip;
}

// Order indices of `vals` by descending magnitude; on magnitude ties the
// positive eigenvalue comes first.
inline std::vector<Index> magnitude_order(const Vector& vals) {
  std::vector<Index> idx(static_cast<size_t>(vals.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  const double tol = 1e-12 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    const double ma = std::abs(vals[a]), mb = std::abs(vals[b]);
    if (std::abs(ma - mb) <= tol) return vals[a] > vals[b];
    return ma > mb;
  });
  return idx;
}

inline void check_symmetric(const Matrix& m, const char* who) {
  if (m.rows() != m.cols())
    throw UsageError(std::string(who) + ": matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw UsageError(std::string(who) + ": matrix is not symmetric (|m - m'| = " +
                     std::to_string(asym) + ")");
}

// Lanczos with full reorthogonalization for the top-k eigenpairs by
// magnitude of a symmetric operator. Spent-iteration budget is reported on
// failure. Breakdowns (invariant subspaces) restart with a fresh random
// direction so multiplicities beyond the first copy can still be found.
inline SymEigen lanczos_topk(const LinOp& op, int k, int max_dim,
                             double tol = 1e-10, std::uint64_t seed = 12345) {
  const Index n = op.n;
  max_dim = static_cast<int>(std::min<Index>(max_dim, n));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  Matrix V(n, max_dim);
  std::vector<double> alpha, beta;  // beta[j] links v_j and v_{j+1}
  Vector w(n), v0(n);
  for (Index i = 0; i < n; ++i) v0[i] = gauss(rng);
  v0.normalize();
  V.col(0) = v0;

  auto reorthogonalize = [&](Vector& x, int upto) {
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < upto; ++j) x -= V.col(j).dot(x) * V.col(j);
  };

  int m = 0;  // number of completed Lanczos vectors
  SymEigen out;
  while (true) {
    // Extend the factorization one step.
    op.apply(V.col(m), w);
    double a = V.col(m).dot(w);
    alpha.push_back(a);
    w -= a * V.col(m);
    if (m > 0) w -= beta[static_cast<size_t>(m - 1)] * V.col(m - 1);
    reorthogonalize(w, m + 1);
    double b = w.norm();
    ++m;

    const bool room = m < max_dim;
    if (room) {
      if (b < 1e-13) {
        // Invariant subspace found: restart with a random orthogonal vector.
        for (Index i = 0; i < n; ++i) w[i] = gauss(rng);
        reorthogonalize(w, m);
        b = w.norm();
        if (b < 1e-13) {
          max_dim = m;  // the whole space is spanned
        } else {
          beta.push_back(0.0);
          V.col(m) = w / b;
          continue;
        }
      } else {
        beta.push_back(b);
        V.col(m) = w / b;
      }
    }

    // Assess convergence every few steps (and at the dimension cap).
    const bool at_cap = m >= max_dim;
    if (!at_cap && (m < k + 2 || m % 5 != 0)) continue;

    Matrix T = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<size_t>(i)];
      if (i + 1 < m) {
        T(i, i + 1) = beta[static_cast<size_t>(i)];
        T(i + 1, i) = beta[static_cast<size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(T);
    if (es.info() != Eigen::Success)
      throw NumericalError("lanczos: tridiagonal eigensolver failed");
    const Vector theta = es.eigenvalues();
    const Matrix s = es.eigenvectors();
    const auto order = magnitude_order(theta);
    const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
    const double blast = at_cap ? 0.0 : beta.back();

    bool converged = m >= k;
    for (int i = 0; converged && i < k; ++i) {
      const double resid = std::abs(blast * s(m - 1, order[static_cast<size_t>(i)]));
      if (resid > tol * scale) converged = false;
    }
    if (converged || at_cap) {
      if (!converged && at_cap && m < static_cast<int>(n))
        throw NumericalError(
            "lanczos: no convergence for top-" + std::to_string(k) +
            " eigenpairs within " + std::to_string(max_dim) + " iterations");
      out.values = Vector(k);
      out.vectors = Matrix(n, k);
      for (int i = 0; i < k; ++i) {
        const Index j = order[static_cast<size_t>(i)];
        out.values[i] = theta[j];
        out.vectors.col(i) = V.leftCols(m) * s.col(j);
        out.vectors.col(i).normalize();
        sign_fix_column(out.vectors.col(i));
      }
      return out;
    }
  }
}

}  // namespace detail

// Threshold below which dense eigendecomposition is used directly.
inline constexpr Index kDenseEigenThreshold = 700;

// Top-k eigenpairs by magnitude of a symmetric operator (iterative path).
inline SymEigen sym_eigen_topk(const LinOp& op, int k,
                               std::uint64_t seed = 12345) {
  if (k < 1 || k > op.n)
    throw UsageError("sym_eigen_topk: k must be in [1, n]");
  const int max_dim =
      static_cast<int>(std::min<Index>(op.n, std::max(6 * k + 40, 80)));
  return detail::lanczos_topk(op, k, max_dim, 1e-10, seed);
}

// Top-k eigenpairs by magnitude of a dense symmetric matrix.
inline SymEigen sym_eigen_topk(const Matrix& m, int k) {
  detail::check_symmetric(m, "sym_eigen_topk");
  const Index n = m.rows();
  if (k < 1 || k > n) throw UsageError("sym_eigen_topk: k must be in [1, n]");

  if (n > kDenseEigenThreshold && k <= n / 4) {
    LinOp op{n, [&m](const Vector& x, Vector& y) { y.noalias() = m * x; }};
    return sym_eigen_topk(op, k);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalError("sym_eigen_topk: dense eigensolver failed");
  const auto order = detail::magnitude_order(es.eigenvalues());
  SymEigen out;
  out.values = Vector(k);
  out.vectors = Matrix(n, k);
  for (int i = 0; i < k; ++i) {
    const Index j = order[static_cast<size_t>(i)];
    out.values[i] = es.eigenvalues()[j];
    out.vectors.col(i) = es.eigenvectors().col(j);
    detail::sign_fix_column(out.vectors.col(i));
  }
  return out;
}

// Top-k singular triplets. Dense matrices of moderate size use a direct SVD;
// large matrices go through the symmetric dilation [[0, A], [A', 0]], whose
// positive eigenpairs (sigma, (u; v)/sqrt(2)) give the singular triplets.
inline Svd svd_topk(const Matrix& m, int k, std::uint64_t seed = 12345) {
  const Index r = m.rows(), c = m.cols(), mn = std::min(r, c);
  if (k < 1 || k > mn) throw UsageError("svd_topk: k must be in [1, min(rows, cols)]");

  Svd out;
  if (mn <= kDenseEigenThreshold || k > mn / 4) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
      throw NumericalError("svd_topk: dense SVD failed");
    out.u = svd.matrixU().leftCols(k);
    out.s = svd.singularValues().head(k);
    out.v = svd.matrixV().leftCols(k);
  } else {
    LinOp dil{r + c, [&m, r, c](const Vector& x, Vector& y) {
                y.resize(r + c);
                y.head(r).noalias() = m * x.tail(c);
                y.tail(c).noalias() = m.transpose() * x.head(r);
              }};
    // The dilation spectrum is symmetric (+/- sigma); ask for both copies of
    // the top k and keep the positive side.
    const SymEigen pairs = sym_eigen_topk(dil, 2 * k, seed);
    out.u = Matrix(r, k);
    out.v = Matrix(c, k);
    out.s = Vector(k);
    int got = 0;
    for (Index i = 0; i < pairs.values.size() && got < k; ++i) {
      if (pairs.values[i] <= 0) continue;
      out.s[got] = pairs.values[i];
      out.u.col(got) = pairs.vectors.col(i).head(r) * std::sqrt(2.0);
      out.v.col(got) = pairs.vectors.col(i).tail(c) * std::sqrt(2.0);
      ++got;
    }
    if (got < k)
      throw NumericalError("svd_topk: dilation returned fewer than k positive pairs");
  }
  // Sign convention on left vectors, propagated to right vectors.
  for (int i = 0; i < k; ++i) {
    const double flip = detail::sign_fix_column(out.u.col(i));
    if (flip < 0) out.v.col(i) = -out.v.col(i);
  }
  return out;
}

// Moore-Penrose pseudoinverse via SVD, zeroing singular values below
// rel_tol * sigma_max.
inline Matrix pinv(const Matrix& m, double rel_tol = 1e-10) {
  if (rel_tol <= 0) throw UsageError("pinv: rel_tol must be positive");
  if (m.size() == 0) return m.transpose();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rel_tol * s[0] : 0.0;
  Vector sinv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > cutoff) sinv[i] = 1.0 / s[i];
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

// 2-norm condition number of a small dense matrix (ratio of extreme singular
// values; infinity when the smallest vanishes).
inline double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s[s.size() - 1];
  if (smin <= 0) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

// ---------------------------------------------------------------------------
// Probability distribution functions
// ---------------------------------------------------------------------------

namespace detail {

// Regularized lower incomplete gamma P(a, x), series branch (x < a + 1).
inline double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericalError("gamma_p: series failed to converge");
}

// Regularized upper incomplete gamma Q(a, x), continued-fraction branch.
inline double gamma_q_cf(double a, double x) {
  const double eps = 1e-16, fpmin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NumericalError("gamma_q: continued fraction failed to converge");
}

inline double gamma_p(double a, double x) {
  if (x < 0 || a <= 0) throw UsageError("gamma_p: requires x >= 0, a > 0");
  if (x == 0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

}  // namespace detail

inline double chi2_cdf(double x, int dof) {
  if (dof <= 0) throw UsageError("chi2_cdf: dof must be positive");
  if (x < 0) throw UsageError("chi2_cdf: x must be nonnegative");
  return detail::gamma_p(0.5 * dof, 0.5 * x);
}

inline double chi2_pdf(double x, int dof) {
  if (dof <= 0) throw UsageError("chi2_pdf: dof must be positive");
  if (x < 0) return 0.0;
  const double a = 0.5 * dof;
  if (x == 0) return dof == 2 ? 0.5 : (dof < 2 ? std::numeric_limits<double>::infinity() : 0.0);
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) -
                  std::lgamma(a));
}

// Monotone root-finding (bisection) on the CDF, to 1e-9.
inline double chi2_quantile(double p, int dof) {
  if (dof <= 0) throw UsageError("chi2_quantile: dof must be positive");
  if (!(p > 0.0 && p < 1.0)) throw UsageError("chi2_quantile: p must be in (0,1)");
  double lo = 0.0, hi = std::max(4.0 * dof, 16.0);
  while (chi2_cdf(hi, dof) < p) hi *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, dof) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-11 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Noncentral chi-square CDF as the Poisson(ncp/2)-weighted mixture of central
// chi-square CDFs: summed outward from the Poisson mode, truncated when the
// remaining Poisson mass drops below 1e-12.
inline double noncentral_chi2_cdf(double x, int dof, double ncp) {
  if (dof <= 0) throw UsageError("noncentral_chi2_cdf: dof must be positive");
  if (x < 0) throw UsageError("noncentral_chi2_cdf: x must be nonnegative");
  if (ncp < 0) throw UsageError("noncentral_chi2_cdf: ncp must be nonnegative");
  if (ncp == 0.0) return chi2_cdf(x, dof);

  const double lambda = 0.5 * ncp;
  const auto log_pois = [lambda](long k) {
    return -lambda + k * std::log(lambda) - std::lgamma(double(k) + 1.0);
  };
  const long mode = static_cast<long>(std::floor(lambda));
  double total = 0.0, mass = 0.0;
  long lo = mode, hi = mode;
  double w = std::exp(log_pois(mode));
  total += w * chi2_cdf(x, dof + 2 * static_cast<int>(mode));
  mass += w;
  double w_lo = w, w_hi = w;
  while (mass < 1.0 - 1e-12) {
    // Step outward on whichever side carries more remaining weight.
    const double next_hi = w_hi * lambda / double(hi + 1);
    const double next_lo = lo > 0 ? w_lo * double(lo) / lambda : 0.0;
    if (next_hi >= next_lo) {
      ++hi;
      w_hi = next_hi;
      total += w_hi * chi2_cdf(x, dof + 2 * static_cast<int>(hi));
      mass += w_hi;
    } else {
      --lo;
      w_lo = next_lo;
      total += w_lo * chi2_cdf(x, dof + 2 * static_cast<int>(lo));
      mass += w_lo;
    }
    if (hi - lo > 100000)
      throw NumericalError("noncentral_chi2_cdf: series failed to converge");
  }
  return std::min(1.0, total);
}

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// ---------------------------------------------------------------------------
// Goodness-of-fit helpers
// ---------------------------------------------------------------------------

// One-sample Kolmogorov-Smirnov distance against a reference CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  if (samples.empty()) throw UsageError("ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(double(i + 1) / n - f));
  }
  return d;
}

// Asymptotic Kolmogorov distribution p-value for the KS distance.
inline double ks_pvalue(double d, size_t n) {
  const double t = (std::sqrt(double(n)) + 0.12 + 0.11 / std::sqrt(double(n))) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace lpt
