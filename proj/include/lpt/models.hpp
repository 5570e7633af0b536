// Generative graph models: edge-probability construction for every supported
// family, canonical latent representations, and Bernoulli sampling.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lpt/common.hpp"
#include "lpt/numerics.hpp"

namespace lpt {

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

// Simple 0/1 graph; hollow diagonal, symmetric iff undirected.
struct Graph {
  Matrix adjacency;
  bool directed = false;
  std::vector<std::string> labels;  // optional vertex names

  Index n() const { return adjacency.rows(); }
  Vector degrees() const { return adjacency.rowwise().sum(); }
};

// ---------------------------------------------------------------------------
// ModelSpec
// ---------------------------------------------------------------------------

enum class ModelVariant { RawGRDPG, SBM, MMSBM, DCSBM, PABM };

inline const char* variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::RawGRDPG: return "raw_grdpg";
    case ModelVariant::SBM: return "sbm";
    case ModelVariant::MMSBM: return "mmsbm";
    case ModelVariant::DCSBM: return "dcsbm";
    case ModelVariant::PABM: return "pabm";
  }
  return "?";
}

// A generative model plus sparsity factor. Unused fields stay empty; the
// factory functions below construct each variant with exactly the fields it
// needs.
struct ModelSpec {
  ModelVariant variant = ModelVariant::RawGRDPG;
  double rho = 1.0;
  bool directed = false;

  Matrix X;                // RawGRDPG latent rows (outgoing side if directed)
  Matrix Y;                // RawGRDPG incoming latent rows (directed only)
  Signature sig{1, 0};     // RawGRDPG signature

  Matrix B;                // block probability matrix (asymmetric if directed)
  Matrix Pi;               // membership rows (outgoing side if directed)
  Matrix Pi_in;            // incoming membership rows (directed only)
  Vector theta;            // DCSBM degree-correction factors

  Matrix Lambda;           // PABM popularity matrix, n x K
  std::vector<int> tau;    // community labels (SBM / PABM), 0-based

  Index n() const {
    switch (variant) {
      case ModelVariant::RawGRDPG: return X.rows();
      case ModelVariant::SBM: return static_cast<Index>(tau.size());
      case ModelVariant::MMSBM:
      case ModelVariant::DCSBM: return Pi.rows();
      case ModelVariant::PABM: return Lambda.rows();
    }
    return 0;
  }

  static ModelSpec raw(Matrix x, Signature s, double rho) {
    ModelSpec m;
    m.variant = ModelVariant::RawGRDPG;
    m.X = std::move(x);
    m.sig = s;
    m.rho = rho;
    return m;
  }
  static ModelSpec raw_directed(Matrix x, Matrix y, double rho) {
    ModelSpec m;
    m.variant = ModelVariant::RawGRDPG;
    m.directed = true;
    m.X = std::move(x);
    m.Y = std::move(y);
    m.rho = rho;
    return m;
  }
  static ModelSpec sbm(Matrix b, std::vector<int> labels, double rho) {
    ModelSpec m;
    m.variant = ModelVariant::SBM;
    m.B = std::move(b);
    m.tau = std::move(labels);
    m.rho = rho;
    return m;
  }
  static ModelSpec mmsbm(Matrix b, Matrix pi, double rho) {
    ModelSpec m;
    m.variant = ModelVariant::MMSBM;
    m.B = std::move(b);
    m.Pi = std::move(pi);
    m.rho = rho;
    return m;
  }
  static ModelSpec mmsbm_directed(Matrix b, Matrix pi_out, Matrix pi_in,
                                  double rho) {
    ModelSpec m;
    m.variant = ModelVariant::MMSBM;
    m.directed = true;
    m.B = std::move(b);
    m.Pi = std::move(pi_out);
    m.Pi_in = std::move(pi_in);
    m.rho = rho;
    return m;
  }
  static ModelSpec dcsbm(Matrix b, Matrix pi, Vector th, double rho) {
    ModelSpec m;
    m.variant = ModelVariant::DCSBM;
    m.B = std::move(b);
    m.Pi = std::move(pi);
    m.theta = std::move(th);
    m.rho = rho;
    return m;
  }
  static ModelSpec pabm(Matrix lambda, std::vector<int> labels, double rho) {
    ModelSpec m;
    m.variant = ModelVariant::PABM;
    m.Lambda = std::move(lambda);
    m.tau = std::move(labels);
    m.rho = rho;
    return m;
  }

  void validate() const {
    if (!(rho > 0.0 && rho <= 1.0))
      throw UsageError("ModelSpec: rho must lie in (0, 1]");
    switch (variant) {
      case ModelVariant::MMSBM:
      case ModelVariant::DCSBM: {
        const auto check_simplex = [](const Matrix& pi, const char* side) {
          for (Index i = 0; i < pi.rows(); ++i) {
            if (pi.row(i).minCoeff() < -1e-12 ||
                std::abs(pi.row(i).sum() - 1.0) > 1e-9)
              throw UsageError(std::string("ModelSpec: ") + side +
                               " membership row " + std::to_string(i) +
                               " is not on the simplex");
          }
        };
        check_simplex(Pi, "outgoing");
        if (directed) check_simplex(Pi_in, "incoming");
        if (variant == ModelVariant::DCSBM && theta.size() > 0 &&
            theta.minCoeff() <= 0.0)
          throw UsageError("ModelSpec: theta entries must be positive");
        break;
      }
      case ModelVariant::PABM: {
        if (Lambda.minCoeff() < 0.0 || Lambda.maxCoeff() > 1.0)
          throw UsageError("ModelSpec: PABM popularities must lie in [0,1]");
        break;
      }
      default: break;
    }
  }
};

// ---------------------------------------------------------------------------
// Latent constructions
// ---------------------------------------------------------------------------

namespace detail {

// Signature ordering: positive values first (each group by descending
// magnitude), matching the canonical permutation that places positive
// spectral values before negative ones.
inline std::vector<Index> signature_order(const Vector& vals,
                                          const std::vector<Index>& subset) {
  std::vector<Index> idx = subset;
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    const bool pa = vals[a] > 0, pb = vals[b] > 0;
    if (pa != pb) return pa;
    return std::abs(vals[a]) > std::abs(vals[b]);
  });
  return idx;
}

}  // namespace detail

struct LatentFactor {
  Matrix nu;  // K x d rows
  Signature sig;
};

// Factor a symmetric block matrix B into rows nu_k with
// nu_k' I_{a,b} nu_l = B_{kl}: nu = U_B |S_B|^{1/2} over the eigenvalues of
// magnitude above 1e-10 * max, positives first.
inline LatentFactor latent_from_B(const Matrix& B) {
  detail::check_symmetric(B, "latent_from_B");
  Eigen::SelfAdjointEigenSolver<Matrix> es(B);
  if (es.info() != Eigen::Success)
    throw NumericalError("latent_from_B: eigensolver failed");
  const Vector& vals = es.eigenvalues();
  const double cutoff = 1e-10 * vals.cwiseAbs().maxCoeff();
  std::vector<Index> keep;
  for (Index i = 0; i < vals.size(); ++i)
    if (std::abs(vals[i]) > cutoff) keep.push_back(i);
  const auto order = detail::signature_order(vals, keep);

  LatentFactor f;
  const int d = static_cast<int>(order.size());
  f.nu = Matrix(B.rows(), d);
  int a = 0;
  for (int c = 0; c < d; ++c) {
    const Index j = order[static_cast<size_t>(c)];
    if (vals[j] > 0) ++a;
    Vector col = es.eigenvectors().col(j);
    detail::sign_fix_column(col);
    f.nu.col(c) = col * std::sqrt(std::abs(vals[j]));
  }
  f.sig = Signature{a, d - a};
  return f;
}

// Orthogonal eigenbasis of the coordinate-swap involution on R^{K^2}
// (coordinate (k,l) <-> (l,k)): first the K fixed coordinates and the
// K(K-1)/2 symmetric combinations (+1 eigenvalue), then the K(K-1)/2
// antisymmetric combinations (-1). Conjugating the popularity direct sum by
// this basis yields PABM latent positions with signature
// (K(K+1)/2, K(K-1)/2).
inline Matrix pabm_involution_basis(int K) {
  const int d = K * K;
  Matrix q = Matrix::Zero(d, d);
  const auto flat = [K](int k, int l) { return k * K + l; };
  int col = 0;
  for (int k = 0; k < K; ++k) q(flat(k, k), col++) = 1.0;
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < K; ++k)
    for (int l = k + 1; l < K; ++l) {
      q(flat(k, l), col) = r;
      q(flat(l, k), col) = r;
      ++col;
    }
  for (int k = 0; k < K; ++k)
    for (int l = k + 1; l < K; ++l) {
      q(flat(k, l), col) = r;
      q(flat(l, k), col) = -r;
      ++col;
    }
  return q;
}

// PABM latent rows: row i of the direct sum holds the popularity vector
// lambda_i inside block tau_i, rotated by the involution eigenbasis.
inline std::pair<Matrix, Signature> pabm_latent_rows(const Matrix& Lambda,
                                                     const std::vector<int>& tau) {
  const Index n = Lambda.rows();
  const int K = static_cast<int>(Lambda.cols());
  if (static_cast<Index>(tau.size()) != n)
    throw UsageError("pabm_latent_rows: tau length mismatch");
  Matrix v = Matrix::Zero(n, K * K);
  for (Index i = 0; i < n; ++i) {
    const int k = tau[static_cast<size_t>(i)];
    if (k < 0 || k >= K) throw UsageError("pabm_latent_rows: label out of range");
    v.block(i, k * K, 1, K) = Lambda.row(i);
  }
  const Matrix x = v * pabm_involution_basis(K);
  return {x, Signature{K * (K + 1) / 2, K * (K - 1) / 2}};
}

// Latent-row view of any ModelSpec: edge probabilities are
// rho * X_i' I_{a,b} X_j (undirected) or rho * X_i' Y_j (directed).
struct LatentRows {
  Matrix X;
  Matrix Y;  // = X when undirected
  Signature sig{1, 0};
  double rho = 1.0;
  bool directed = false;

  double prob(Index i, Index j) const {
    const double p = directed ? rho * X.row(i).dot(Y.row(j))
                              : rho * indefinite_dot(X.row(i), X.row(j), sig);
    return std::clamp(p, 0.0, 1.0);
  }
};

inline Matrix memberships_from_labels(const std::vector<int>& tau, int K) {
  Matrix pi = Matrix::Zero(static_cast<Index>(tau.size()), K);
  for (size_t i = 0; i < tau.size(); ++i) {
    if (tau[i] < 0 || tau[i] >= K)
      throw UsageError("memberships_from_labels: label out of range");
    pi(static_cast<Index>(i), tau[i]) = 1.0;
  }
  return pi;
}

inline LatentRows latent_rows(const ModelSpec& spec) {
  spec.validate();
  LatentRows out;
  out.rho = spec.rho;
  out.directed = spec.directed;
  switch (spec.variant) {
    case ModelVariant::RawGRDPG:
      out.X = spec.X;
      out.Y = spec.directed ? spec.Y : spec.X;
      out.sig = spec.directed ? Signature{static_cast<int>(spec.X.cols()), 0}
                              : spec.sig;
      return out;
    case ModelVariant::SBM:
    case ModelVariant::MMSBM:
    case ModelVariant::DCSBM: {
      Matrix pi = spec.variant == ModelVariant::SBM
                      ? memberships_from_labels(spec.tau,
                                                static_cast<int>(spec.B.rows()))
                      : spec.Pi;
      if (spec.directed) {
        // Asymmetric B factors through its SVD; outgoing rows use the left
        // factor, incoming rows the right one, so that X_i' Y_j = pi1' B pi2.
        Eigen::BDCSVD<Matrix> svd(spec.B,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector root = svd.singularValues().cwiseSqrt();
        out.X = pi * svd.matrixU() * root.asDiagonal();
        out.Y = spec.Pi_in * svd.matrixV() * root.asDiagonal();
        out.sig = Signature{static_cast<int>(root.size()), 0};
      } else {
        const LatentFactor f = latent_from_B(spec.B);
        out.X = pi * f.nu;
        if (spec.variant == ModelVariant::DCSBM)
          out.X.array().colwise() *= spec.theta.array();
        out.Y = out.X;
        out.sig = f.sig;
      }
      return out;
    }
    case ModelVariant::PABM: {
      auto [x, sig] = pabm_latent_rows(spec.Lambda, spec.tau);
      out.X = std::move(x);
      out.Y = out.X;
      out.sig = sig;
      return out;
    }
  }
  throw UsageError("latent_rows: unknown variant");
}

// ---------------------------------------------------------------------------
// Edge-probability matrices and sampling
// ---------------------------------------------------------------------------

// Dense edge-probability matrix. Entries outside [0,1] by more than 1e-12
// are an error; smaller excursions are clamped. For PABM the direct-sum
// construction is cross-checked against the elementwise formula
// rho * lambda_{i,tau_j} * lambda_{j,tau_i}.
inline Matrix build_P(const ModelSpec& spec, std::string* warning = nullptr) {
  const LatentRows lt = latent_rows(spec);
  const Index n = lt.X.rows();
  Matrix p;
  if (lt.directed) {
    p.noalias() = lt.rho * lt.X * lt.Y.transpose();
  } else {
    p.noalias() = lt.rho * lt.X * apply_iab_right(lt.X, lt.sig).transpose();
    p = ((p + p.transpose()) / 2).eval();  // remove round-off asymmetry
  }

  double worst = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double& e = p(i, j);
      if (e < 0.0 || e > 1.0) {
        worst = std::max(worst, std::max(-e, e - 1.0));
        e = std::clamp(e, 0.0, 1.0);
      }
    }
  if (worst > 1e-12)
    throw DataError("build_P: probability outside [0,1] by " +
                    std::to_string(worst));

  if (spec.variant == ModelVariant::PABM) {
    double maxdiff = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double direct = spec.rho *
                              spec.Lambda(i, spec.tau[static_cast<size_t>(j)]) *
                              spec.Lambda(j, spec.tau[static_cast<size_t>(i)]);
        maxdiff = std::max(maxdiff, std::abs(direct - p(i, j)));
      }
    if (maxdiff > 1e-10)
      throw NumericalError("build_P: PABM direct-sum construction deviates "
                           "from the elementwise formula by " +
                           std::to_string(maxdiff));
  }

  if (warning) {
    double min_off = 1.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j) min_off = std::min(min_off, p(i, j));
    if (min_off / spec.rho < 1e-6)
      *warning = "build_P: min off-diagonal edge probability " +
                 std::to_string(min_off) +
                 " is degenerate relative to rho; downstream covariances may "
                 "be ill-conditioned";
  }
  return p;
}

// Bernoulli sample from an explicit probability matrix. Undirected graphs
// sample the upper triangle and mirror; the diagonal stays zero.
inline Graph sample_graph(const Matrix& P, bool directed, std::uint64_t seed) {
  const Index n = P.rows();
  Graph g;
  g.directed = directed;
  g.adjacency = Matrix::Zero(n, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (directed) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && unif(rng) < P(i, j)) g.adjacency(i, j) = 1.0;
  } else {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (unif(rng) < P(i, j)) {
          g.adjacency(i, j) = 1.0;
          g.adjacency(j, i) = 1.0;
        }
  }
  return g;
}

// Sampling directly from latent rows, writing into a reusable buffer so the
// Monte Carlo harness avoids materializing P per replicate.
inline void sample_graph_into(const LatentRows& lt, std::uint64_t seed,
                              Matrix& adjacency) {
  const Index n = lt.X.rows();
  adjacency.setZero(n, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (lt.directed) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (i != j && unif(rng) < lt.prob(i, j)) adjacency(i, j) = 1.0;
  } else {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (unif(rng) < lt.prob(i, j)) {
          adjacency(i, j) = 1.0;
          adjacency(j, i) = 1.0;
        }
  }
}

inline Graph sample_graph(const ModelSpec& spec, std::uint64_t seed) {
  const LatentRows lt = latent_rows(spec);
  Graph g;
  g.directed = spec.directed;
  sample_graph_into(lt, seed, g.adjacency);
  return g;
}

// ---------------------------------------------------------------------------
// Canonical representations
// ---------------------------------------------------------------------------

struct CanonicalZ {
  Matrix Z;         // n x d rows U |S|^{1/2}
  Vector spectrum;  // signed, positives first
  Signature sig;
};

// Canonical representation Z = U|S|^{1/2} from the top-d eigendecomposition
// of a symmetric probability matrix, positives ordered first.
inline CanonicalZ canonical_Z(const Matrix& P, int d) {
  const SymEigen e = sym_eigen_topk(P, d);
  const double scale = e.values.cwiseAbs().maxCoeff();
  if (std::abs(e.values[d - 1]) <= 1e-10 * std::max(1.0, scale))
    throw NumericalError("canonical_Z: requested dimension " +
                         std::to_string(d) + " exceeds the numerical rank");
  std::vector<Index> all(static_cast<size_t>(d));
  std::iota(all.begin(), all.end(), Index{0});
  const auto order = detail::signature_order(e.values, all);
  CanonicalZ out;
  out.spectrum = Vector(d);
  out.Z = Matrix(P.rows(), d);
  int a = 0;
  for (int c = 0; c < d; ++c) {
    const Index j = order[static_cast<size_t>(c)];
    if (e.values[j] > 0) ++a;
    out.spectrum[c] = e.values[j];
    out.Z.col(c) = e.vectors.col(j) * std::sqrt(std::abs(e.values[j]));
  }
  out.sig = Signature{a, d - a};
  return out;
}

// Exact canonical representation of P = rho X I_{a,b} X' without forming P:
// thin QR of X followed by a d x d eigendecomposition.
inline CanonicalZ canonical_from_latent(const Matrix& X, const Signature& sig,
                                        double rho) {
  const Index n = X.rows();
  const Index d = X.cols();
  Eigen::HouseholderQR<Matrix> qr(X);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, d);
  const Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const Matrix small = rho * apply_iab_right(r, sig) * r.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es((small + small.transpose()) / 2);
  if (es.info() != Eigen::Success)
    throw NumericalError("canonical_from_latent: eigensolver failed");
  std::vector<Index> all(static_cast<size_t>(d));
  std::iota(all.begin(), all.end(), Index{0});
  const auto order = detail::signature_order(es.eigenvalues(), all);
  CanonicalZ out;
  out.spectrum = Vector(d);
  out.Z = Matrix(n, d);
  int a = 0;
  for (Index c = 0; c < d; ++c) {
    const Index j = order[static_cast<size_t>(c)];
    const double lam = es.eigenvalues()[j];
    if (lam > 0) ++a;
    out.spectrum[c] = lam;
    Vector col = q * es.eigenvectors().col(j);
    detail::sign_fix_column(col);
    out.Z.col(c) = col * std::sqrt(std::abs(lam));
  }
  out.sig = Signature{a, static_cast<int>(d) - a};
  return out;
}

struct CanonicalDirected {
  Matrix Z;         // out rows U S^{1/2}
  Matrix Zt;        // in rows V S^{1/2}
  Vector spectrum;  // singular values, descending
};

// Exact canonical factors of a directed P = rho X Y' via thin QR of both
// sides and a d x d SVD.
inline CanonicalDirected canonical_directed_from_latent(const Matrix& X,
                                                        const Matrix& Y,
                                                        double rho) {
  const Index n = X.rows(), d = X.cols();
  Eigen::HouseholderQR<Matrix> qx(X), qy(Y);
  const Matrix q1 = qx.householderQ() * Matrix::Identity(n, d);
  const Matrix r1 = qx.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const Matrix q2 = qy.householderQ() * Matrix::Identity(Y.rows(), d);
  const Matrix r2 = qy.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(rho * r1 * r2.transpose(),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  CanonicalDirected out;
  out.spectrum = svd.singularValues();
  out.Z = Matrix(n, d);
  out.Zt = Matrix(Y.rows(), d);
  for (Index c = 0; c < d; ++c) {
    Vector u = q1 * svd.matrixU().col(c);
    Vector v = q2 * svd.matrixV().col(c);
    if (detail::sign_fix_column(u) < 0) v = -v;
    const double root = std::sqrt(out.spectrum[c]);
    out.Z.col(c) = u * root;
    out.Zt.col(c) = v * root;
  }
  return out;
}

// Expected degrees t_i as full row sums of P (diagonal term included, per the
// definition t_i = sum_j rho X_i' I_{a,b} X_j).
inline Vector expected_degrees(const Matrix& P) { return P.rowwise().sum(); }

// Same quantity computed from latent rows in O(n d).
inline Vector expected_degrees(const LatentRows& lt) {
  if (lt.directed) {
    const Vector colsum = lt.Y.colwise().sum();
    return lt.rho * (lt.X * colsum);
  }
  const Vector colsum = lt.X.colwise().sum();
  Vector s = lt.rho * (lt.X * lt.sig.diag().asDiagonal() * colsum);
  return s;
}

}  // namespace lpt
