// Spectral embeddings of adjacency-type matrices: adjacency spectral
// embedding (ASE), Laplacian spectral embedding (LSE), and the SVD-based
// embedding of directed graphs.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "lpt/common.hpp"
#include "lpt/models.hpp"
#include "lpt/numerics.hpp"

namespace lpt {

enum class EmbeddingKind { ASE, LSE, DirectedOut, DirectedIn };

inline const char* embedding_kind_name(EmbeddingKind k) {
  switch (k) {
    case EmbeddingKind::ASE: return "ase";
    case EmbeddingKind::LSE: return "lse";
    case EmbeddingKind::DirectedOut: return "directed-out";
    case EmbeddingKind::DirectedIn: return "directed-in";
  }
  return "?";
}

// Rows of `coords` are the embedded vertices. `spectrum` keeps the signed
// eigenvalues (positives first) for the symmetric embeddings, or the
// singular values for the directed ones; `sig` records how many retained
// directions are positive/negative. `degrees` are the observed degrees of
// the embedded matrix (out- or in-degrees for the directed embeddings).
struct Embedding {
  EmbeddingKind kind = EmbeddingKind::ASE;
  Matrix coords;
  Vector spectrum;
  Signature sig{1, 0};
  Vector degrees;

  Index n() const { return coords.rows(); }
  int d() const { return static_cast<int>(coords.cols()); }

  // Orthonormal basis U recovered from coords = U |S|^{1/2}.
  Matrix basis() const {
    return coords * spectrum.cwiseAbs().cwiseSqrt().cwiseInverse().asDiagonal();
  }
};

namespace detail {

// Shared post-processing: order the top-k eigenpairs positives first, scale
// by |lambda|^{1/2}, and reject dimensions beyond the numerical rank.
inline Embedding finish_symmetric(const SymEigen& e, int d,
                                  EmbeddingKind kind, Vector degrees,
                                  bool allow_degenerate) {
  const double scale = e.values.cwiseAbs().maxCoeff();
  if (!allow_degenerate &&
      std::abs(e.values[d - 1]) <= 1e-10 * std::max(1.0, scale))
    throw NumericalError(
        std::string(embedding_kind_name(kind)) + ": requested dimension " +
        std::to_string(d) +
        " exceeds the numerical rank of the spectrum; use a smaller "
        "dimension or allow degenerate directions explicitly");
  std::vector<Index> idx(static_cast<size_t>(d));
  std::iota(idx.begin(), idx.end(), Index{0});
  const auto order = signature_order(e.values, idx);
  Embedding out;
  out.kind = kind;
  out.degrees = std::move(degrees);
  out.spectrum = Vector(d);
  out.coords = Matrix(e.vectors.rows(), d);
  int a = 0;
  for (int c = 0; c < d; ++c) {
    const Index j = order[static_cast<size_t>(c)];
    if (e.values[j] > 0) ++a;
    out.spectrum[c] = e.values[j];
    out.coords.col(c) =
        e.vectors.col(j) * std::sqrt(std::abs(e.values[j]));
  }
  out.sig = Signature{a, d - a};
  return out;
}

}  // namespace detail

// Adjacency spectral embedding: rows of U_A |S_A|^{1/2} over the d
// largest-magnitude eigenvalues, positive ones ordered first.
inline Embedding ase(const Matrix& A, int d, bool allow_degenerate = false) {
  detail::check_symmetric(A, "ase");
  if (d < 1 || d > A.rows())
    throw UsageError("ase: dimension must lie in [1, n]");
  const SymEigen e = sym_eigen_topk(A, d);
  return detail::finish_symmetric(e, d, EmbeddingKind::ASE,
                                  A.rowwise().sum(), allow_degenerate);
}

// Laplacian spectral embedding: the same construction on the normalized
// matrix D^{-1/2} A D^{-1/2}. Isolated vertices make the normalization
// undefined and are reported by index. For large graphs the normalized
// matrix is applied on the fly rather than formed.
inline Embedding lse(const Matrix& A, int d, bool allow_degenerate = false) {
  detail::check_symmetric(A, "lse");
  if (d < 1 || d > A.rows())
    throw UsageError("lse: dimension must lie in [1, n]");
  const Index n = A.rows();
  Vector deg = A.rowwise().sum();
  for (Index i = 0; i < n; ++i)
    if (deg[i] <= 0.0)
      throw DataError("lse: vertex " + std::to_string(i) +
                      " is isolated; the degree-normalized embedding is "
                      "undefined (drop it or embed the largest component)");
  const Vector dinv = deg.cwiseSqrt().cwiseInverse();
  SymEigen e;
  if (n <= kDenseEigenThreshold || d > n / 4) {
    const Matrix L = dinv.asDiagonal() * A * dinv.asDiagonal();
    e = sym_eigen_topk((L + L.transpose()) / 2, d);
  } else {
    LinOp op;
    op.n = n;
    op.apply = [&A, &dinv](const Vector& x, Vector& y) {
      y.noalias() = A * dinv.cwiseProduct(x);
      y.array() *= dinv.array();
    };
    e = sym_eigen_topk(op, d);
  }
  return detail::finish_symmetric(e, d, EmbeddingKind::LSE, std::move(deg),
                                  allow_degenerate);
}

struct DirectedEmbedding {
  Embedding out;  // rows of U S^{1/2}
  Embedding in;   // rows of V S^{1/2}
};

// Directed spectral embedding from the top-d singular triplets of A:
// outgoing positions U S^{1/2} and incoming positions V S^{1/2}.
inline DirectedEmbedding directed_embed(const Matrix& A, int d,
                                        bool allow_degenerate = false) {
  if (A.rows() != A.cols())
    throw UsageError("directed_embed: adjacency matrix must be square");
  if (d < 1 || d > A.rows())
    throw UsageError("directed_embed: dimension must lie in [1, n]");
  const Svd svd = svd_topk(A, d);
  const double scale = svd.s.maxCoeff();
  if (!allow_degenerate && svd.s[d - 1] <= 1e-10 * std::max(1.0, scale))
    throw NumericalError(
        "directed_embed: requested dimension " + std::to_string(d) +
        " exceeds the numerical rank of the singular spectrum");
  const Vector root = svd.s.cwiseSqrt();
  DirectedEmbedding de;
  de.out.kind = EmbeddingKind::DirectedOut;
  de.out.coords = svd.u * root.asDiagonal();
  de.out.spectrum = svd.s;
  de.out.sig = Signature{d, 0};
  de.out.degrees = A.rowwise().sum();
  de.in.kind = EmbeddingKind::DirectedIn;
  de.in.coords = svd.v * root.asDiagonal();
  de.in.spectrum = svd.s;
  de.in.sig = Signature{d, 0};
  de.in.degrees = A.colwise().sum().transpose();
  return de;
}

struct ScreeProfile {
  Vector magnitudes;  // spectral magnitudes, descending
  int suggested_d = 1;  // position of the largest consecutive gap
};

// Leading spectral magnitudes (eigenvalue moduli, or singular values when
// `directed`) with the largest-gap heuristic for choosing a dimension.
inline ScreeProfile scree_profile(const Matrix& A, int kmax,
                                  bool directed = false) {
  const int k = static_cast<int>(std::min<Index>(kmax, A.rows()));
  if (k < 1) throw UsageError("scree_profile: need at least one component");
  ScreeProfile sp;
  if (directed) {
    sp.magnitudes = svd_topk(A, k).s;
  } else {
    detail::check_symmetric(A, "scree_profile");
    Vector v = sym_eigen_topk(A, k).values.cwiseAbs();
    std::sort(v.data(), v.data() + v.size(), std::greater<double>());
    sp.magnitudes = v;
  }
  double best = -1.0;
  for (int i = 0; i + 1 < k; ++i) {
    const double gap = sp.magnitudes[i] - sp.magnitudes[i + 1];
    if (gap > best) {
      best = gap;
      sp.suggested_d = i + 1;
    }
  }
  return sp;
}

}  // namespace lpt
