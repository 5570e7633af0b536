// Shared scalar/matrix typedefs, the (a,b) signature type, and error taxonomy.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace lpt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error categories; the CLI maps them onto distinct exit codes.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;  // exit code 2
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;  // exit code 3
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;  // exit code 4
};

// Inertia of an indefinite inner product: `a` positive directions followed by
// `b` negative ones.
struct Signature {
  int a = 1;
  int b = 0;

  int d() const { return a + b; }

  bool operator==(const Signature&) const = default;

  // Diagonal of I_{a,b}: a ones then b minus-ones.
  Vector diag() const {
    Vector v = Vector::Ones(d());
    v.tail(b).setConstant(-1.0);
    return v;
  }

  Matrix matrix() const { return diag().asDiagonal(); }

  static Signature validated(int a, int b) {
    if (a < 1 || b < 0)
      throw UsageError("signature requires a >= 1 and b >= 0, got (" +
                       std::to_string(a) + "," + std::to_string(b) + ")");
    return Signature{a, b};
  }
};

// Indefinite inner product x' I_{a,b} y without materializing I_{a,b}.
inline double indefinite_dot(const Eigen::Ref<const Vector>& x,
                             const Eigen::Ref<const Vector>& y,
                             const Signature& sig) {
  return x.head(sig.a).dot(y.head(sig.a)) - x.tail(sig.b).dot(y.tail(sig.b));
}

// Columnwise sign flip: negate the trailing b columns (right-multiplication
// by I_{a,b}).
inline Matrix apply_iab_right(Matrix m, const Signature& sig) {
  m.rightCols(sig.b) *= -1.0;
  return m;
}

}  // namespace lpt
