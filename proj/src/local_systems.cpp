#include "hodgekit/local_systems.hpp"

#include <algorithm>
#include <numeric>

#include "hodgekit/norms.hpp"
#include "hodgekit/polynomial.hpp"

namespace hk {

namespace {

using KVector = std::vector<NFElem>;

FieldPtr field_of(const KMatrix& m) {
  for (const auto& x : m.data())
    if (x.field()) return x.field();
  return nullptr;
}

// Matrix of the Q-linear map underlying t, in the basis theta^l e_j.
QMatrix restrict_scalars(const KMatrix& t) {
  const FieldPtr field = field_of(t);
  if (!field) return to_rational(t);
  const std::size_t d = field->degree(), r = t.rows();
  QMatrix out(r * d, r * d);
  const NFElem theta = NFElem::generator(field);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      NFElem x = t(i, j);
      for (std::size_t l = 0; l < d; ++l) {
        const auto& c = x.coeffs();
        for (std::size_t k = 0; k < c.size(); ++k) out(i * d + k, j * d + l) = c[k];
        x *= theta;
      }
    }
  return out;
}

KMatrix single_column(const KVector& v) { return KMatrix::from_columns({v}, v.size()); }

bool in_span(const KMatrix& span, const KVector& v) { return span_contains(span, single_column(v)); }

KMatrix append_column(const KMatrix& m, const KVector& v) { return hconcat(m, single_column(v)); }

// Columns of `target` appended greedily to `base` whenever they are new.
KMatrix extend_within(KMatrix base, const KMatrix& target) {
  for (std::size_t j = 0; j < target.cols(); ++j) {
    const auto v = target.col(j);
    if (!in_span(base, v)) base = append_column(base, v);
  }
  return base;
}

bool is_scalar(const KMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i == j ? m(i, j) != m(0, 0) : !m(i, j).is_zero()) return false;
  return true;
}

KMatrix block_diagonal(const std::vector<KMatrix>& parts) {
  std::size_t n = 0;
  for (const auto& p : parts) n += p.rows();
  KMatrix out(n, n);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < p.cols(); ++j) out(off + i, off + j) = p(i, j);
    off += p.rows();
  }
  return out;
}

// In the basis `basis`, each matrix must be block upper triangular for the
// given block sizes; returns the diagonal blocks of every matrix.
std::vector<std::vector<KMatrix>> diagonal_blocks(const std::vector<KMatrix>& mats, const KMatrix& basis,
                                                  const std::vector<std::size_t>& blocks, const std::string& what) {
  const KMatrix inv = inverse(basis, "adapted basis is singular");
  std::vector<std::size_t> start;
  std::size_t off = 0;
  for (auto b : blocks) {
    start.push_back(off);
    off += b;
  }
  std::vector<std::vector<KMatrix>> out(mats.size());
  for (std::size_t g = 0; g < mats.size(); ++g) {
    const KMatrix m = inv * mats[g] * basis;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      for (std::size_t bj = 0; bj < bi; ++bj)
        if (!m.block(start[bi], start[bj], blocks[bi], blocks[bj]).is_zero()) throw InvariantError(what);
      out[g].push_back(m.block(start[bi], start[bi], blocks[bi], blocks[bi]));
    }
  }
  return out;
}

std::vector<Integer> divisors(Integer n) {
  n = abs(n);
  std::vector<std::pair<Integer, unsigned>> factors;
  for (Integer d = 2; d * d <= n && d <= 1000000; ++d) {
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e) factors.push_back({d, e});
  }
  if (n > 1) factors.push_back({n, 1});  // possibly composite if huge; then some divisors are missed
  std::vector<Integer> out{1};
  for (const auto& [p, e] : factors) {
    const std::size_t k = out.size();
    Integer pk = 1;
    for (unsigned i = 1; i <= e; ++i) {
      pk *= p;
      for (std::size_t j = 0; j < k; ++j) out.push_back(out[j] * pk);
    }
  }
  return out;
}

// Rational roots of a polynomial with rational coefficients (low -> high).
std::vector<Rational> rational_roots(const std::vector<Rational>& poly) {
  std::vector<Rational> p = poly;
  poly_trim(p);
  std::vector<Rational> roots;
  if (p.size() <= 1) return roots;
  std::size_t low = 0;
  while (sgn(p[low]) == 0) ++low;
  if (low > 0) roots.push_back(0);
  p.erase(p.begin(), p.begin() + static_cast<long>(low));
  if (p.size() <= 1) return roots;
  Integer den = 1;
  for (const auto& c : p) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  const Integer a0 = Rational(p.front() * den).get_num(), an = Rational(p.back() * den).get_num();
  for (const auto& num : divisors(a0))
    for (const auto& q : divisors(an))
      for (int s : {1, -1}) {
        Rational x(num * s, q);
        x.canonicalize();
        Rational val = 0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) val = val * x + *it;
        if (sgn(val) == 0 && std::find(roots.begin(), roots.end(), x) == roots.end()) roots.push_back(x);
      }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Incrementally maintained echelon basis for membership tests.
class EchelonSpan {
 public:
  bool add(KVector v) {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const NFElem f = v[pivots_[r]];
      if (f.is_zero()) continue;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= f * rows_[r][k];
    }
    std::size_t piv = 0;
    while (piv < v.size() && v[piv].is_zero()) ++piv;
    if (piv == v.size()) return false;
    const NFElem inv = v[piv].inverse();
    for (auto& x : v) x *= inv;
    rows_.push_back(std::move(v));
    pivots_.push_back(piv);
    return true;
  }

 private:
  std::vector<KVector> rows_;
  std::vector<std::size_t> pivots_;
};

KVector flatten(const KMatrix& m) { return m.data(); }

// Splits a semisimple representation along the eigenspaces, for rational
// eigenvalues, of central elements of the generated algebra. Returns the
// change of basis and the block sizes.
std::pair<KMatrix, std::vector<std::size_t>> split_isotypic(const std::vector<KMatrix>& mats, std::size_t d) {
  KMatrix id = KMatrix::identity(d);
  if (d <= 1 || mats.empty()) return {id, {d}};
  const auto alg = algebra_basis(mats, d);
  KMatrix comm(d * d * mats.size(), alg.size());
  for (std::size_t k = 0; k < alg.size(); ++k)
    for (std::size_t g = 0; g < mats.size(); ++g) {
      const KMatrix c = alg[k] * mats[g] - mats[g] * alg[k];
      for (std::size_t e = 0; e < d * d; ++e) comm(g * d * d + e, k) = c.data()[e];
    }
  const KMatrix center = kernel(comm);
  for (std::size_t c = 0; c < center.cols(); ++c) {
    KMatrix z(d, d);
    for (std::size_t k = 0; k < alg.size(); ++k) z += alg[k] * center(k, c);
    if (is_scalar(z)) continue;
    const auto cp = characteristic_polynomial(z);
    if (!std::all_of(cp.begin(), cp.end(), [](const NFElem& x) { return x.is_rational(); })) continue;
    std::vector<Rational> qcp;
    for (const auto& x : cp) qcp.push_back(x.to_rational());
    for (const auto& root : rational_roots(qcp)) {
      const KMatrix shifted = z - id * NFElem(root);
      const KMatrix ker = kernel(shifted);
      if (ker.cols() == 0 || ker.cols() == d) continue;
      const KMatrix basis = hconcat(ker, column_basis(shifted));
      if (basis.cols() != d || rank(basis) != d) continue;
      const std::vector<std::size_t> two{ker.cols(), d - ker.cols()};
      const auto parts = diagonal_blocks(mats, basis, two, "central eigenspace is not stable");
      std::vector<KMatrix> left, right;
      for (const auto& p : parts) {
        left.push_back(p[0]);
        right.push_back(p[1]);
      }
      auto [pl, sl] = split_isotypic(left, two[0]);
      auto [pr, sr] = split_isotypic(right, two[1]);
      sl.insert(sl.end(), sr.begin(), sr.end());
      return {basis * block_diagonal({pl, pr}), sl};
    }
  }
  return {id, {d}};
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<unsigned long> quasiunipotent_order(const KMatrix& t) {
  if (!t.square()) throw ValidationError("quasiunipotent_order needs a square matrix");
  if (t.rows() == 0) return 1;
  const QMatrix q = restrict_scalars(t);
  const auto cp = characteristic_polynomial(q);
  if (sgn(cp.front()) == 0) return std::nullopt;
  const auto factors = cyclotomic_factorization(cp);
  if (!factors) return std::nullopt;
  unsigned long m = 1;
  for (const auto& [order, mult] : *factors) m = std::lcm(m, order);
  if (!is_unipotent(power(t, m))) throw InvariantError("T^m is not unipotent for the computed order");
  return m;
}

std::optional<unsigned long> quasiunipotent_order(const QMatrix& t) { return quasiunipotent_order(to_field(t)); }

unsigned long unipotent_reduction_exponent(const GroupRep& rep, const std::vector<Word>& loops) {
  unsigned long m = 1;
  for (const auto& loop : loops) {
    const auto order = quasiunipotent_order(rep.evaluate(loop));
    if (!order) throw ValidationError("local monodromy around loop " + word_to_string(loop) + " is not quasiunipotent");
    m = std::lcm(m, *order);
  }
  return m;
}

// ---------------------------------------------------------------------------

bool lattice_is_stable(const QMatrix& lattice, const std::vector<QMatrix>& matrices, const PrimePlace& place) {
  const QMatrix inv = inverse(lattice, "lattice basis is singular");
  for (const auto& g : matrices)
    for (const QMatrix& m : {g, inverse(g)}) {
      const QMatrix c = inv * m * lattice;
      for (const auto& x : c.data())
        if (sgn(x) != 0 && valuation(x, place.p()).value < 0) return false;
    }
  return true;
}

QMatrix flat_lattice(const std::vector<QMatrix>& matrices, std::size_t dim, const PrimePlace& place) {
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const auto& g = matrices[i];
    if (g.rows() != dim || g.cols() != dim) throw ValidationError("matrix " + std::to_string(i) + " has the wrong size");
    if (!is_unipotent(g)) throw ValidationError("matrix " + std::to_string(i) + " is not unipotent");
    for (std::size_t j = 0; j < i; ++j)
      if (!(g * matrices[j] == matrices[j] * g))
        throw ValidationError("matrices " + std::to_string(j) + " and " + std::to_string(i) + " do not commute");
  }
  // Common invariant flag: each new vector is fixed modulo the previous ones.
  QMatrix flag(dim, 0);
  const QMatrix id = QMatrix::identity(dim);
  for (std::size_t step = 0; step < dim; ++step) {
    const QMatrix proj = quotient_projection(flag);
    QMatrix stacked(0, dim);
    for (const auto& g : matrices) stacked = vconcat(stacked, proj * (g - id));
    const QMatrix ker = stacked.rows() ? kernel(stacked) : id;
    bool found = false;
    for (std::size_t c = 0; c < ker.cols() && !found; ++c) {
      QVector v = ker.col(c);
      if (span_contains(flag, QMatrix::from_columns({v}, dim))) continue;
      // primitive integer vector with positive leading entry
      Integer den = 1, num = 0;
      for (const auto& x : v) {
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), x.get_num_mpz_t());
      }
      Rational scale(den, num);
      scale.canonicalize();
      const auto lead = std::find_if(v.begin(), v.end(), [](const Rational& x) { return sgn(x) != 0; });
      if (sgn(*lead) < 0) scale = -scale;
      for (auto& x : v) x *= scale;
      flag = hconcat(flag, QMatrix::from_columns({v}, dim));
      found = true;
    }
    if (!found) throw InvariantError("no common fixed vector for commuting unipotent matrices");
  }
  // In the flag basis every g^(+-1) is upper unitriangular; rescaling the
  // j-th vector by p^k_j multiplies entry (i, j) by p^(k_j - k_i).
  const QMatrix flag_inv = inverse(flag);
  std::vector<QMatrix> unitriangular;
  for (const auto& g : matrices) {
    unitriangular.push_back(flag_inv * g * flag);
    unitriangular.push_back(flag_inv * inverse(g) * flag);
  }
  std::vector<long> k(dim, 0);
  for (std::size_t j = 0; j < dim; ++j)
    for (const auto& u : unitriangular)
      for (std::size_t i = 0; i < j; ++i)
        if (sgn(u(i, j)) != 0) k[j] = std::max(k[j], k[i] - valuation(u(i, j), place.p()).value);
  QMatrix lattice = flag;
  for (std::size_t j = 0; j < dim; ++j) {
    Rational s = 1;
    for (long e = 0; e < k[j]; ++e) s *= place.p();
    for (std::size_t i = 0; i < dim; ++i) lattice(i, j) *= s;
  }
  if (!lattice_is_stable(lattice, matrices, place)) throw InvariantError("constructed lattice is not stable");
  return lattice;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<KVector>> jordan_chains(const KMatrix& n) {
  if (!n.square()) throw ValidationError("weight filtration needs a square matrix");
  const std::size_t r = n.rows();
  std::vector<KMatrix> kernels{KMatrix(r, 0)};  // kernels[j] = ker N^j
  KMatrix pw = KMatrix::identity(r);
  while (true) {
    if (pw.is_zero()) break;
    if (kernels.size() > r) throw ValidationError("matrix is not nilpotent");
    pw = pw * n;
    kernels.push_back(kernel(pw));
  }
  if (kernels.size() - 1 > r) throw ValidationError("matrix is not nilpotent");
  const std::size_t m = kernels.size() - 1;  // nilpotency index
  std::vector<std::vector<KVector>> chains;
  for (std::size_t s = m; s >= 1; --s) {
    KMatrix cur = kernels[s - 1];
    for (const auto& c : chains)
      if (c.size() > s) cur = append_column(cur, c[c.size() - s]);
    const KMatrix& ks = kernels[s];
    for (std::size_t j = 0; j < ks.cols(); ++j) {
      KVector h = ks.col(j);
      if (in_span(cur, h)) continue;
      cur = append_column(cur, h);
      std::vector<KVector> chain{h};
      for (std::size_t i = 1; i < s; ++i) chain.push_back(n * chain.back());
      chains.push_back(std::move(chain));
    }
  }
  return chains;
}

KMatrix WeightFiltration::piece(int k) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] <= k) idx.push_back(i);
  if (idx.empty()) return KMatrix(dim, 0);
  return basis.select_columns(idx);
}

std::size_t WeightFiltration::piece_dim(int k) const {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [k](int w) { return w <= k; }));
}

WeightFiltration weight_filtration(const KMatrix& n) {
  const auto chains = jordan_chains(n);
  std::vector<std::pair<int, KVector>> tagged;
  for (const auto& c : chains) {
    const int len = static_cast<int>(c.size());
    for (int j = 0; j < len; ++j) tagged.push_back({len - 1 - 2 * j, c[static_cast<std::size_t>(j)]});
  }
  std::stable_sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  WeightFiltration w;
  w.dim = n.rows();
  std::vector<KVector> cols;
  for (auto& [wt, v] : tagged) {
    w.weights.push_back(wt);
    cols.push_back(std::move(v));
  }
  w.basis = cols.empty() ? KMatrix(w.dim, 0) : KMatrix::from_columns(cols, w.dim);
  if (!w.weights.empty()) {
    w.lowest = w.weights.front();
    w.highest = w.weights.back();
  }
  if (!satisfies_weight_axioms(n, w)) throw InvariantError("weight filtration fails its defining axioms");
  return w;
}

WeightFiltration weight_filtration(const QMatrix& n) { return weight_filtration(to_field(n)); }

bool satisfies_weight_axioms(const KMatrix& n, int lowest, const std::vector<KMatrix>& pieces) {
  const std::size_t r = n.rows();
  if (pieces.empty()) return r == 0;
  const int highest = lowest + static_cast<int>(pieces.size()) - 1;
  auto piece = [&](int k) -> KMatrix {
    if (k < lowest) return KMatrix(r, 0);
    if (k > highest) return pieces.back();
    return pieces[static_cast<std::size_t>(k - lowest)];
  };
  auto dim = [&](int k) { return piece(k).cols() ? rank(piece(k)) : std::size_t{0}; };
  if (dim(highest) != r) return false;
  for (int k = lowest; k <= highest; ++k) {
    if (!span_contains(piece(k), piece(k - 1))) return false;
    if (!span_contains(piece(k - 2), n * piece(k))) return false;
  }
  KMatrix nk = KMatrix::identity(r);
  const int top = std::max(highest, -lowest);
  for (int k = 1; k <= top; ++k) {
    nk = nk * n;
    const KMatrix image = hconcat(nk * piece(k), piece(-k - 1));
    const std::size_t img = image.cols() ? rank(image) : 0;
    if (img != dim(-k)) return false;
    if (!span_contains(piece(-k), image)) return false;
    if (img - dim(-k - 1) != dim(k) - dim(k - 1)) return false;
  }
  return true;
}

bool satisfies_weight_axioms(const KMatrix& n, const WeightFiltration& w) {
  std::vector<KMatrix> pieces;
  for (int k = w.lowest; k <= w.highest; ++k) pieces.push_back(w.piece(k));
  return satisfies_weight_axioms(n, w.lowest, pieces);
}

// ---------------------------------------------------------------------------

GradedNearbyCycles graded_nearby_cycles(const GroupRep& rep, const Word& gamma) {
  const KMatrix t = rep.evaluate(gamma);
  if (!is_unipotent(t)) throw ValidationError("monodromy of " + word_to_string(gamma) + " is not unipotent");
  for (std::size_t i = 0; i < rep.matrices().size(); ++i)
    if (!(t * rep.matrix(i) == rep.matrix(i) * t))
      throw ValidationError(word_to_string(gamma) + " does not commute with generator " + std::to_string(i + 1));
  const std::size_t r = rep.rank();
  WeightFiltration w = weight_filtration(t - KMatrix::identity(r));
  std::vector<std::size_t> blocks;
  for (int k = w.lowest; k <= w.highest; ++k)
    if (w.graded_dim(k)) blocks.push_back(w.graded_dim(k));
  std::vector<KMatrix> out;
  if (r == 0) {
    out = rep.matrices();
  } else {
    const auto parts = diagonal_blocks(rep.matrices(), w.basis, blocks, "weight filtration is not stable under the action");
    for (const auto& p : parts) out.push_back(block_diagonal(p));
  }
  return {GroupRep(rep.presentation(), std::move(out)), std::move(w), std::move(blocks)};
}

std::vector<KMatrix> algebra_basis(const std::vector<KMatrix>& generators, std::size_t dim) {
  EchelonSpan span;
  std::vector<KMatrix> basis;
  std::vector<std::size_t> todo;
  auto offer = [&](KMatrix m) {
    if (span.add(flatten(m))) {
      basis.push_back(std::move(m));
      todo.push_back(basis.size() - 1);
    }
  };
  offer(KMatrix::identity(dim));
  while (!todo.empty()) {
    const std::size_t i = todo.back();
    todo.pop_back();
    for (const auto& g : generators) offer(basis[i] * g);
  }
  return basis;
}

Semisimplification semisimplify(const GroupRep& rep) {
  const std::size_t r = rep.rank();
  if (r == 0) return {rep, {}};
  const auto alg = algebra_basis(rep.matrices(), r);
  KMatrix gram(alg.size(), alg.size());
  for (std::size_t i = 0; i < alg.size(); ++i)
    for (std::size_t j = i; j < alg.size(); ++j) gram(i, j) = gram(j, i) = trace(alg[i] * alg[j]);
  const KMatrix rad_coeffs = kernel(gram);
  std::vector<KMatrix> radical;
  for (std::size_t c = 0; c < rad_coeffs.cols(); ++c) {
    KMatrix x(r, r);
    for (std::size_t k = 0; k < alg.size(); ++k) x += alg[k] * rad_coeffs(k, c);
    radical.push_back(std::move(x));
  }
  // Radical series V = J^0 V > J V > J^2 V > ... > 0.
  std::vector<KMatrix> series{KMatrix::identity(r)};
  while (series.back().cols() > 0) {
    KMatrix next(r, 0);
    for (const auto& j : radical) next = hconcat(next, j * series.back());
    series.push_back(next.cols() ? column_basis(next) : KMatrix(r, 0));
    if (series.size() > r + 2) throw InvariantError("radical series does not terminate");
  }
  // Basis through the series, deepest layer first.
  KMatrix basis(r, 0);
  std::vector<std::size_t> layers;
  for (std::size_t i = series.size() - 1; i-- > 0;) {
    const std::size_t before = basis.cols();
    basis = extend_within(basis, series[i]);
    if (basis.cols() > before) layers.push_back(basis.cols() - before);
  }
  const auto parts = diagonal_blocks(rep.matrices(), basis, layers, "radical series is not stable");
  std::vector<std::vector<KMatrix>> refined(rep.matrices().size());
  std::vector<std::size_t> blocks;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<KMatrix> layer;
    for (const auto& p : parts) layer.push_back(p[l]);
    const auto [change, sizes] = split_isotypic(layer, layers[l]);
    const KMatrix change_inv = inverse(change);
    for (std::size_t g = 0; g < layer.size(); ++g) refined[g].push_back(change_inv * layer[g] * change);
    blocks.insert(blocks.end(), sizes.begin(), sizes.end());
  }
  std::vector<KMatrix> out;
  for (const auto& r_g : refined) out.push_back(block_diagonal(r_g));
  return {GroupRep(rep.presentation(), std::move(out)), std::move(blocks)};
}

std::vector<NFElem> char_b(const GroupRep& rep, const Word& w) { return characteristic_polynomial(rep.evaluate(w)); }

std::size_t intertwiner_dim(const KMatrix& a, const KMatrix& b) {
  if (!a.square() || !b.square()) throw ValidationError("intertwiners need square matrices");
  const std::size_t n = a.rows(), m = b.rows();
  // X (n x m, row-major) -> a X - X b
  KMatrix op(n * m, n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < n; ++k)
        if (!a(i, k).is_zero()) op(i * m + j, k * m + j) += a(i, k);
      for (std::size_t k = 0; k < m; ++k)
        if (!b(k, j).is_zero()) op(i * m + j, i * m + k) -= b(k, j);
    }
  return n * m == 0 ? 0 : n * m - rank(op);
}

bool are_conjugate(const KMatrix& a, const KMatrix& b) {
  if (!a.square() || !b.square()) throw ValidationError("conjugacy needs square matrices");
  if (a.rows() != b.rows()) return false;
  const std::size_t ab = intertwiner_dim(a, b);
  return ab == intertwiner_dim(a, a) && ab == intertwiner_dim(b, b);
}

}  // namespace hk
