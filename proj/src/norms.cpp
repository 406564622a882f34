#include "hodgekit/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace hk {

namespace {

void require_compatible(const DiagNorm& a, const DiagNorm& b) {
  if (!(a.place() == b.place())) throw ValidationError("norms live over different places");
  if (a.dim() != b.dim()) throw ValidationError("norms have different dimensions");
}

// All r-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t r) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(r);
  std::iota(cur.begin(), cur.end(), 0);
  if (r > n) return out;
  for (;;) {
    out.push_back(cur);
    std::size_t i = r;
    while (i > 0 && cur[i - 1] == n - r + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < r; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Rational minor(const QMatrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
  QMatrix sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) sub(i, j) = m(rows[i], cols[j]);
  return determinant(std::move(sub));
}

// -v(x) as a LogValue
LogValue neg_val(const Rational& x, long p) { return log_abs(x, p); }

std::vector<Rational> sorted_desc(std::vector<Rational> v) {
  std::sort(v.begin(), v.end(), [](const Rational& x, const Rational& y) { return x > y; });
  return v;
}

}  // namespace

DiagNorm::DiagNorm(PrimePlace place, QMatrix basis, std::vector<Rational> weights)
    : place_(place), basis_(std::move(basis)), weights_(std::move(weights)) {
  if (!basis_.square()) throw ValidationError("basis must be square");
  if (basis_.rows() != weights_.size()) throw ValidationError("basis and weights have different sizes");
  basis_inv_ = inverse(basis_, "basis singular");
}

DiagNorm DiagNorm::standard(PrimePlace place, std::vector<Rational> weights) {
  const std::size_t n = weights.size();
  return DiagNorm(place, QMatrix::identity(n), std::move(weights));
}

QVector DiagNorm::coordinates(const QVector& v) const {
  if (v.size() != dim()) throw ValidationError("vector dimension mismatch");
  return basis_inv_ * v;
}

double Distances::d2_approx() const { return std::sqrt(d2_sq.get_d()); }

LogValue norm_eval(const DiagNorm& n, const QVector& v) {
  const QVector c = n.coordinates(v);
  LogValue best;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const LogValue term = neg_val(c[i], n.place().p()) + Rational(-n.weights()[i]);
    if (term > best) best = term;
  }
  return best;
}

LogValue wedge_log_norm(const DiagNorm& n, const QMatrix& vectors) {
  if (vectors.rows() != n.dim()) throw ValidationError("vector dimension mismatch");
  const QMatrix c = n.basis_inverse() * vectors;
  const std::size_t k = vectors.cols();
  std::vector<std::size_t> all_cols(k);
  std::iota(all_cols.begin(), all_cols.end(), 0);
  LogValue best;
  for (const auto& rows : subsets(n.dim(), k)) {
    const Rational m = minor(c, rows, all_cols);
    if (sgn(m) == 0) continue;
    Rational shift = 0;
    for (auto r : rows) shift -= n.weights()[r];
    const LogValue term = neg_val(m, n.place().p()) + shift;
    if (term > best) best = term;
  }
  return best;
}

bool is_orthogonal(const DiagNorm& n, const QMatrix& vectors) {
  if (vectors.rows() != n.dim()) throw ValidationError("vector dimension mismatch");
  if (rank(vectors) != vectors.cols()) throw ValidationError("vectors are linearly dependent");
  Rational sum = 0;
  for (std::size_t j = 0; j < vectors.cols(); ++j) sum += norm_eval(n, vectors.col(j)).value();
  return wedge_log_norm(n, vectors) == LogValue(sum);
}

std::optional<std::vector<Rational>> weights_in_basis(const DiagNorm& n, const QMatrix& basis) {
  if (basis == n.basis()) return n.weights();
  if (!is_orthogonal(n, basis)) return std::nullopt;
  std::vector<Rational> w(basis.cols());
  for (std::size_t j = 0; j < basis.cols(); ++j) w[j] = -norm_eval(n, basis.col(j)).value();
  return w;
}

DiagNorm dual_norm(const DiagNorm& n) {
  std::vector<Rational> w(n.dim());
  for (std::size_t i = 0; i < n.dim(); ++i) w[i] = -n.weights()[i];
  return DiagNorm(n.place(), n.basis_inverse().transpose(), std::move(w));
}

QMatrix quotient_projection(const QMatrix& subspace) {
  const std::size_t n = subspace.rows();
  const std::size_t k = subspace.cols();
  if (rank(subspace) != k) throw ValidationError("subspace basis is linearly dependent");
  const QMatrix full = extend_to_basis(subspace, n);
  return inverse(full).block(k, 0, n - k, n);
}

namespace {

struct Adapted {
  std::vector<std::size_t> free_rows;  // a-basis indices spanning a complement of W
  QMatrix w_change;                    // k x k: adapted W basis = W * w_change
  std::vector<Rational> w_weights;     // weights of the adapted W basis
};

// Replaces, one W-vector at a time, the a-basis vector carrying the
// dominant component. Every replacement is an isometric change of basis.
Adapted adapt_to_subspace(const DiagNorm& n, const QMatrix& subspace) {
  const std::size_t dim = n.dim();
  const std::size_t k = subspace.cols();
  if (subspace.rows() != dim) throw ValidationError("subspace dimension mismatch");
  if (rank(subspace) != k) throw ValidationError("subspace basis is linearly dependent");
  const long p = n.place().p();
  QMatrix c = n.basis_inverse() * subspace;
  QMatrix t = QMatrix::identity(k);
  std::vector<bool> used(dim, false);
  Adapted out{{}, {}, std::vector<Rational>(k)};
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t piv = dim;
    LogValue best;
    for (std::size_t i = 0; i < dim; ++i) {
      if (used[i] || sgn(c(i, j)) == 0) continue;
      const LogValue s = neg_val(c(i, j), p) + Rational(-n.weights()[i]);
      if (piv == dim || s > best) {
        best = s;
        piv = i;
      }
    }
    if (piv == dim) throw InvariantError("adapt_to_subspace: no pivot in an independent column");
    used[piv] = true;
    out.w_weights[j] = -best.value();
    for (std::size_t m = j + 1; m < k; ++m) {
      if (sgn(c(piv, m)) == 0) continue;
      const Rational f = c(piv, m) / c(piv, j);
      for (std::size_t i = 0; i < dim; ++i) c(i, m) -= f * c(i, j);
      for (std::size_t i = 0; i < k; ++i) t(i, m) -= f * t(i, j);
    }
  }
  for (std::size_t i = 0; i < dim; ++i)
    if (!used[i]) out.free_rows.push_back(i);
  out.w_change = std::move(t);
  return out;
}

}  // namespace

QuotientNorm quotient_norm(const DiagNorm& n, const QMatrix& subspace) {
  const Adapted ad = adapt_to_subspace(n, subspace);
  QMatrix proj = quotient_projection(subspace);
  const QMatrix images = proj * n.basis().select_columns(ad.free_rows);
  std::vector<Rational> w;
  for (auto i : ad.free_rows) w.push_back(n.weights()[i]);
  return {canonicalize(DiagNorm(n.place(), images, std::move(w))), std::move(proj)};
}

DiagNorm restrict_norm(const DiagNorm& n, const QMatrix& subspace) {
  Adapted ad = adapt_to_subspace(n, subspace);
  return canonicalize(DiagNorm(n.place(), std::move(ad.w_change), std::move(ad.w_weights)));
}

DiagNorm wedge_norm(const DiagNorm& n, std::size_t r) {
  if (r < 1 || r > n.dim()) throw ValidationError("wedge degree out of range");
  const auto sets = subsets(n.dim(), r);
  QMatrix basis(sets.size(), sets.size());
  std::vector<Rational> w(sets.size());
  for (std::size_t col = 0; col < sets.size(); ++col) {
    for (std::size_t row = 0; row < sets.size(); ++row) basis(row, col) = minor(n.basis(), sets[row], sets[col]);
    for (auto i : sets[col]) w[col] += n.weights()[i];
  }
  return DiagNorm(n.place(), std::move(basis), std::move(w));
}

DiagNorm direct_sum_norm(const DiagNorm& a, const DiagNorm& b) {
  if (!(a.place() == b.place())) throw ValidationError("norms live over different places");
  const std::size_t n = a.dim(), m = b.dim();
  QMatrix basis(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) basis(i, j) = a.basis()(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) basis(n + i, n + j) = b.basis()(i, j);
  std::vector<Rational> w = a.weights();
  w.insert(w.end(), b.weights().begin(), b.weights().end());
  return DiagNorm(a.place(), std::move(basis), std::move(w));
}

CommonBasis common_orthogonal_basis(const DiagNorm& a, const DiagNorm& b) {
  require_compatible(a, b);
  if (a.basis() == b.basis()) return {a.basis(), a.weights(), b.weights()};
  const std::size_t n = a.dim();
  const long p = a.place().p();
  // m(j, k): b-coordinate j of the k-th vector of the working a-orthogonal basis.
  QMatrix m = b.basis_inverse() * a.basis();
  QMatrix q = QMatrix::identity(n);  // working basis in a-coordinates
  std::vector<bool> row_done(n, false), col_done(n, false);
  std::vector<Rational> wb(n);
  for (std::size_t step = 0; step < n; ++step) {
    // pivot maximizing log||e_k||_b - log||e_k||_a over the active block
    std::size_t pj = n, pk = n;
    LogValue best;
    for (std::size_t j = 0; j < n; ++j) {
      if (row_done[j]) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (col_done[k] || sgn(m(j, k)) == 0) continue;
        const LogValue s = neg_val(m(j, k), p) + Rational(a.weights()[k] - b.weights()[j]);
        if (pj == n || s > best) {
          best = s;
          pj = j;
          pk = k;
        }
      }
    }
    if (pj == n) throw InvariantError("common_orthogonal_basis: singular change of basis");
    // column operations: a-isometries because the pivot dominates its row
    for (std::size_t l = 0; l < n; ++l) {
      if (l == pk || col_done[l] || sgn(m(pj, l)) == 0) continue;
      const Rational f = m(pj, l) / m(pj, pk);
      for (std::size_t i = 0; i < n; ++i) {
        m(i, l) -= f * m(i, pk);
        q(i, l) -= f * q(i, pk);
      }
    }
    // row operations: b-isometries because the pivot dominates its column
    for (std::size_t i = 0; i < n; ++i)
      if (i != pj) m(i, pk) = 0;
    wb[pk] = b.weights()[pj] + Rational(valuation(m(pj, pk), p).value);
    row_done[pj] = true;
    col_done[pk] = true;
  }
  const DiagNorm ca = canonicalize(DiagNorm(a.place(), a.basis() * q, a.weights()));
  // canonicalize rescales columns; apply the same shifts to wb
  std::vector<Rational> shifted_b(n);
  for (std::size_t i = 0; i < n; ++i) shifted_b[i] = wb[i] + (ca.weights()[i] - a.weights()[i]);
  return {ca.basis(), ca.weights(), std::move(shifted_b)};
}

Spectrum relative_spectrum(const DiagNorm& a, const DiagNorm& b) {
  const CommonBasis cb = common_orthogonal_basis(a, b);
  std::vector<Rational> l(a.dim());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = cb.weights_a[i] - cb.weights_b[i];
  return {sorted_desc(std::move(l))};
}

Distances distances(const DiagNorm& a, const DiagNorm& b) {
  const Spectrum s = relative_spectrum(a, b);
  Distances d{0, 0};
  for (const auto& l : s.lambdas) d.d2_sq += l * l;
  if (!s.lambdas.empty()) d.d_inf = std::max<Rational>(s.lambdas.front(), -s.lambdas.back());
  return d;
}

bool norms_equal(const DiagNorm& a, const DiagNorm& b) {
  const Spectrum s = relative_spectrum(a, b);
  return std::all_of(s.lambdas.begin(), s.lambdas.end(), [](const Rational& x) { return sgn(x) == 0; });
}

DiagNorm geodesic_point(const DiagNorm& a, const DiagNorm& b, const Rational& t) {
  const CommonBasis cb = common_orthogonal_basis(a, b);
  std::vector<Rational> w(a.dim());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1 - t) * cb.weights_a[i] + t * cb.weights_b[i];
  return DiagNorm(a.place(), cb.basis, std::move(w));
}

DiagNorm midpoint(const DiagNorm& a, const DiagNorm& b) { return geodesic_point(a, b, Rational(1, 2)); }

DiagNorm act(const QMatrix& g, const DiagNorm& n) {
  if (!g.square() || g.rows() != n.dim()) throw ValidationError("group element has the wrong size");
  if (sgn(determinant(g)) == 0) throw ValidationError("group element is singular");
  return canonicalize(DiagNorm(n.place(), g * n.basis(), n.weights()));
}

DiagNorm canonicalize(const DiagNorm& n) {
  QMatrix basis = n.basis();
  std::vector<Rational> w = n.weights();
  bool changed = false;
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    Integer den = 1, num = 0;
    std::size_t first = basis.rows();
    for (std::size_t i = 0; i < basis.rows(); ++i) {
      const Rational& x = basis(i, j);
      if (sgn(x) == 0) continue;
      if (first == basis.rows()) first = i;
      den = lcm(den, x.get_den());
      num = gcd(num, x.get_num());
    }
    Rational scale(den, num);
    scale.canonicalize();
    if (sgn(basis(first, j)) < 0) scale = -scale;
    if (scale == 1) continue;
    changed = true;
    for (std::size_t i = 0; i < basis.rows(); ++i) basis(i, j) *= scale;
    // ||s e|| = |s| ||e||  =>  a' = a + v(s)
    w[j] += valuation(scale, n.place().p()).value;
  }
  if (!changed) return n;
  return DiagNorm(n.place(), std::move(basis), std::move(w));
}

Rational snap_to_grid(const Rational& x, unsigned bits) {
  Integer scale = 1;
  scale <<= bits;
  Rational scaled = x * scale + Rational(1, 2);
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  Rational r(fl, scale);
  r.canonicalize();
  return r;
}

CenterOfMass center_of_mass(const std::vector<DiagNorm>& points, const std::vector<Rational>& masses,
                            const CenterOfMassOptions& options) {
  if (points.empty()) throw ValidationError("center of mass of an empty set");
  if (masses.size() != points.size()) throw ValidationError("one mass per point required");
  for (const auto& m : masses)
    if (sgn(m) <= 0) throw ValidationError("masses must be positive");
  for (const auto& p : points) require_compatible(points.front(), p);

  auto objective = [&](const DiagNorm& c) {
    Rational total = 0;
    for (std::size_t i = 0; i < points.size(); ++i) total += masses[i] * d2_sq(c, points[i]);
    return total;
  };

  // Try to find a common apartment among a few natural candidates.
  std::vector<QMatrix> candidates{points.front().basis()};
  const bool same_basis = std::all_of(points.begin(), points.end(),
                                      [&](const DiagNorm& p) { return p.basis() == points.front().basis(); });
  if (!same_basis)
    for (std::size_t i = 1; i < points.size(); ++i)
      candidates.push_back(common_orthogonal_basis(points.front(), points[i]).basis);
  for (const auto& basis : candidates) {
    std::vector<std::vector<Rational>> coords;
    for (const auto& p : points) {
      auto w = weights_in_basis(p, basis);
      if (!w) break;
      coords.push_back(std::move(*w));
    }
    if (coords.size() != points.size()) continue;
    const Rational total = std::accumulate(masses.begin(), masses.end(), Rational(0));
    std::vector<Rational> bary(points.front().dim());
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t c = 0; c < bary.size(); ++c) bary[c] += masses[i] * coords[i][c];
    for (auto& x : bary) x /= total;
    DiagNorm c(points.front().place(), basis, std::move(bary));
    const Rational obj = objective(c);
    return {std::move(c), obj, true, 0, true};
  }

  // Cyclic inductive-mean sweep.
  const Rational tol_sq = options.tol * options.tol;
  DiagNorm est = points.front();
  Rational acc = masses.front();
  std::size_t sweeps = 0;
  bool converged = false;
  bool first = true;
  while (sweeps < options.max_sweeps) {
    const DiagNorm before = est;
    for (std::size_t i = first ? 1 : 0; i < points.size(); ++i) {
      acc += masses[i];
      DiagNorm next = canonicalize(geodesic_point(est, points[i], masses[i] / acc));
      std::vector<Rational> w = next.weights();
      for (auto& x : w) x = snap_to_grid(x, options.grid_bits);
      est = DiagNorm(next.place(), next.basis(), std::move(w));
    }
    first = false;
    ++sweeps;
    if (d2_sq(before, est) < tol_sq) {
      converged = true;
      break;
    }
  }
  const Rational obj = objective(est);
  return {std::move(est), obj, false, sweeps, converged};
}

}  // namespace hk
