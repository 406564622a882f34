#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hodgekit/matrix.hpp"
#include "hodgekit/scalars.hpp"

namespace hk {

/// A point of the building of GL_n over Q_p: a norm on Q^n that is
/// diagonal in some basis.
///
/// Column i of basis() is e_i and log_q ||e_i|| = -weights()[i]. The norm
/// of v = sum c_i e_i is max_i |c_i| q^(-a_i). Two DiagNorms describe the
/// same norm iff their relative spectrum vanishes (see norms_equal); the
/// diagonalizing data itself is not unique.
class DiagNorm {
 public:
  DiagNorm(PrimePlace place, QMatrix basis, std::vector<Rational> weights);

  /// Norm diagonal in the standard basis.
  static DiagNorm standard(PrimePlace place, std::vector<Rational> weights);

  const PrimePlace& place() const { return place_; }
  std::size_t dim() const { return weights_.size(); }
  const QMatrix& basis() const { return basis_; }
  const QMatrix& basis_inverse() const { return basis_inv_; }
  const std::vector<Rational>& weights() const { return weights_; }

  /// Coordinates of v in the diagonalizing basis.
  QVector coordinates(const QVector& v) const;

 private:
  PrimePlace place_;
  QMatrix basis_;
  QMatrix basis_inv_;
  std::vector<Rational> weights_;
};

/// Relative spectrum, decreasing, in log_q units.
struct Spectrum {
  std::vector<Rational> lambdas;
  friend bool operator==(const Spectrum&, const Spectrum&) = default;
};

struct CommonBasis {
  QMatrix basis;  // columns orthogonal for both norms
  std::vector<Rational> weights_a;
  std::vector<Rational> weights_b;
};

struct Distances {
  Rational d2_sq;  // sum of squared relative spectrum
  Rational d_inf;  // Goldman-Iwahori distance
  double d2_approx() const;
};

struct QuotientNorm {
  DiagNorm norm;       // on Q^(n-k), the coordinates given by projection
  QMatrix projection;  // (n-k) x n, kernel = W; depends on W only
};

/// log_q ||v||; -inf iff v = 0.
LogValue norm_eval(const DiagNorm& n, const QVector& v);

/// log_q of the induced norm of v_1 ^ ... ^ v_k (columns of `vectors`).
LogValue wedge_log_norm(const DiagNorm& n, const QMatrix& vectors);

/// Hadamard criterion: the columns are orthogonal iff the norm of their
/// wedge equals the product of their norms. Throws on dependent input.
bool is_orthogonal(const DiagNorm& n, const QMatrix& vectors);

/// Weights of n in the basis E if E is orthogonal for n.
std::optional<std::vector<Rational>> weights_in_basis(const DiagNorm& n, const QMatrix& basis);

DiagNorm dual_norm(const DiagNorm& n);

/// The identification Q^n / span(W) -> Q^(n-k) used by quotient_norm.
QMatrix quotient_projection(const QMatrix& subspace);

QuotientNorm quotient_norm(const DiagNorm& n, const QMatrix& subspace);

/// Restriction of n to span(W), in coordinates with respect to the columns of W.
DiagNorm restrict_norm(const DiagNorm& n, const QMatrix& subspace);

/// Induced norm on the r-th exterior power, in the lexicographic basis
/// e_{j1} ^ ... ^ e_{jr} of standard wedge coordinates.
DiagNorm wedge_norm(const DiagNorm& n, std::size_t r);

DiagNorm direct_sum_norm(const DiagNorm& a, const DiagNorm& b);

/// A basis orthogonal for both norms, found by pivoted elimination over
/// Z_(p) on the change-of-basis matrix.
CommonBasis common_orthogonal_basis(const DiagNorm& a, const DiagNorm& b);

/// lambda_i(a, b) = sorted log_q(||e_i||_b / ||e_i||_a).
Spectrum relative_spectrum(const DiagNorm& a, const DiagNorm& b);

Distances distances(const DiagNorm& a, const DiagNorm& b);

inline Rational d2_sq(const DiagNorm& a, const DiagNorm& b) { return distances(a, b).d2_sq; }

bool norms_equal(const DiagNorm& a, const DiagNorm& b);

/// Point at parameter t in [0, 1] on the geodesic from a to b.
DiagNorm geodesic_point(const DiagNorm& a, const DiagNorm& b, const Rational& t);

DiagNorm midpoint(const DiagNorm& a, const DiagNorm& b);

/// (g . n)(v) = n(g^-1 v). Throws on singular g.
DiagNorm act(const QMatrix& g, const DiagNorm& n);

/// Same norm, with each basis column scaled to a primitive integer vector
/// whose first nonzero entry is positive.
DiagNorm canonicalize(const DiagNorm& n);

/// Nearest multiple of 2^-bits (ties round up).
Rational snap_to_grid(const Rational& x, unsigned bits);

struct CenterOfMassOptions {
  Rational tol{Rational(1, 1000000)};
  std::size_t max_sweeps = 100000;
  /// Grid for the iterates of the non-apartment sweep.
  unsigned grid_bits = 64;
};

struct CenterOfMass {
  DiagNorm point;
  Rational objective;  // sum_i m_i d2_sq(point, P_i)
  bool exact = false;  // all points share an apartment
  std::size_t sweeps = 0;
  bool converged = true;
};

/// Weighted barycenter minimizing sum m_i d(c, P_i)^2.
///
/// If the points share an apartment this is the Euclidean barycenter of
/// their weight vectors and is exact. Otherwise the estimate is moved
/// cyclically toward P_i by m_i / (accumulated mass) until a full sweep
/// moves it by less than tol (d2_sq < tol^2) or max_sweeps is reached.
CenterOfMass center_of_mass(const std::vector<DiagNorm>& points, const std::vector<Rational>& masses,
                            const CenterOfMassOptions& options = {});

}  // namespace hk
