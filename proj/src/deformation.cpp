#include "hodgekit/deformation.hpp"

#include <cstdlib>

namespace hk {

namespace {

// Polynomial in t with matrix coefficients, truncated after t^degree.
class Truncated {
 public:
  Truncated(std::size_t rank, std::size_t degree) : coeffs_(degree + 1, KMatrix(rank, rank)) {}

  static Truncated constant(const KMatrix& m, std::size_t degree) {
    Truncated t(m.rows(), degree);
    t.coeffs_[0] = m;
    return t;
  }

  KMatrix& operator[](std::size_t j) { return coeffs_[j]; }
  const KMatrix& operator[](std::size_t j) const { return coeffs_[j]; }
  std::size_t degree() const { return coeffs_.size() - 1; }

  friend Truncated operator*(const Truncated& a, const Truncated& b) {
    Truncated out(a.coeffs_[0].rows(), a.degree());
    for (std::size_t i = 0; i <= a.degree(); ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; i + j <= a.degree(); ++j)
        if (!b[j].is_zero()) out[i + j] += a[i] * b[j];
    }
    return out;
  }

 private:
  std::vector<KMatrix> coeffs_;
};

// (1 + X)^-1 for X with zero constant term.
Truncated one_plus_inverse(const Truncated& x) {
  const std::size_t r = x[0].rows();
  Truncated result = Truncated::constant(KMatrix::identity(r), x.degree());
  Truncated term = result;
  Truncated neg = x;
  for (std::size_t j = 0; j <= neg.degree(); ++j) neg[j] = -neg[j];
  for (std::size_t n = 1; n <= x.degree(); ++n) {
    term = term * neg;
    for (std::size_t j = 0; j <= x.degree(); ++j) result[j] += term[j];
  }
  return result;
}

KMatrix apply_j(const KMatrix& j, const std::vector<NFElem>& v) {
  KMatrix col = KMatrix::from_columns({v}, v.size());
  return j * col;
}

}  // namespace

std::vector<FoxTerm> fox_derivative(const Word& word, std::size_t generator) {
  std::vector<FoxTerm> out;
  const int g = static_cast<int>(generator) + 1;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] == g) out.push_back({Word(word.begin(), word.begin() + static_cast<long>(k)), 1});
    if (word[k] == -g) out.push_back({Word(word.begin(), word.begin() + static_cast<long>(k) + 1), -1});
  }
  return out;
}

KMatrix adjoint_action(const KMatrix& m) {
  const std::size_t r = m.rows();
  const KMatrix mi = inverse(m);
  KMatrix out(r * r, r * r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c)
        for (std::size_t d = 0; d < r; ++d) out(a * r + b, c * r + d) = m(a, c) * mi(d, b);
  return out;
}

KMatrix fox_matrix(const GroupRep& rep) {
  const std::size_t r = rep.rank(), s = rep.presentation().generators();
  const auto& rels = rep.presentation().relators();
  const std::size_t rr = r * r;
  KMatrix j(rels.size() * rr, s * rr);
  for (std::size_t ri = 0; ri < rels.size(); ++ri)
    for (std::size_t gi = 0; gi < s; ++gi)
      for (const auto& term : fox_derivative(rels[ri], gi)) {
        const KMatrix block = adjoint_action(rep.evaluate(term.prefix));
        for (std::size_t a = 0; a < rr; ++a)
          for (std::size_t b = 0; b < rr; ++b) {
            auto& entry = j(ri * rr + a, gi * rr + b);
            if (term.sign > 0) {
              entry += block(a, b);
            } else {
              entry -= block(a, b);
            }
          }
      }
  return j;
}

std::vector<NFElem> flatten(const Cochain& c) {
  std::vector<NFElem> v;
  for (const auto& m : c) v.insert(v.end(), m.data().begin(), m.data().end());
  return v;
}

Cochain unflatten(const std::vector<NFElem>& v, std::size_t generators, std::size_t rank) {
  if (v.size() != generators * rank * rank) throw ValidationError("cochain has the wrong size");
  Cochain c;
  for (std::size_t g = 0; g < generators; ++g) {
    KMatrix m(rank, rank);
    for (std::size_t e = 0; e < rank * rank; ++e) m(e / rank, e % rank) = v[g * rank * rank + e];
    c.push_back(std::move(m));
  }
  return c;
}

TangentSpace tangent_space(const GroupRep& rep) {
  const std::size_t r = rep.rank(), s = rep.presentation().generators();
  TangentSpace t;
  const KMatrix j = fox_matrix(rep);
  const KMatrix z = j.rows() ? kernel(j) : KMatrix::identity(s * r * r);
  for (std::size_t c = 0; c < z.cols(); ++c) t.z1_basis.push_back(unflatten(z.col(c), s, r));
  t.dim_z1 = z.cols();
  // B^1 = image of f -> (Ad(rho(g_i)) f - f)_i.
  const std::size_t rr = r * r;
  KMatrix d(s * rr, rr);
  for (std::size_t gi = 0; gi < s; ++gi) {
    const KMatrix block = adjoint_action(rep.matrix(gi)) - KMatrix::identity(rr);
    for (std::size_t a = 0; a < rr; ++a)
      for (std::size_t b = 0; b < rr; ++b) d(gi * rr + a, b) = block(a, b);
  }
  t.dim_b1 = rr ? rank(d) : 0;
  return t;
}

Cochain coboundary(const GroupRep& rep, const KMatrix& f) {
  Cochain c;
  for (std::size_t i = 0; i < rep.matrices().size(); ++i)
    c.push_back(f - rep.matrix(i) * f * rep.inverse_matrix(i));
  return c;
}

bool is_cocycle(const GroupRep& rep, const Cochain& c) {
  if (c.size() != rep.presentation().generators()) return false;
  for (const auto& m : c)
    if (m.rows() != rep.rank() || m.cols() != rep.rank()) return false;
  if (rep.presentation().relators().empty()) return true;
  return apply_j(fox_matrix(rep), flatten(c)).is_zero();
}

LiftResult lift_order(const GroupRep& rep, const Cochain& c, std::size_t order) {
  if (order == 0) throw ValidationError("lift order must be at least 1");
  if (!is_cocycle(rep, c)) throw ValidationError("first-order deformation is not a cocycle");
  const std::size_t r = rep.rank(), s = rep.presentation().generators();
  const auto& rels = rep.presentation().relators();
  const KMatrix j = fox_matrix(rep);
  LiftResult out;
  out.coefficients.push_back(c);
  // factor[i][d] = coefficient of t^d in the factor multiplying rho(g_i).
  std::vector<Truncated> factor(s, Truncated(r, order));
  for (std::size_t i = 0; i < s; ++i) {
    factor[i][0] = KMatrix::identity(r);
    if (order >= 1) factor[i][1] = c[i];
  }
  for (std::size_t d = 2; d <= order; ++d) {
    std::vector<Truncated> images, inverses;
    for (std::size_t i = 0; i < s; ++i) {
      images.push_back(factor[i] * Truncated::constant(rep.matrix(i), order));
      Truncated x = factor[i];
      x[0] = KMatrix(r, r);
      inverses.push_back(Truncated::constant(rep.inverse_matrix(i), order) * one_plus_inverse(x));
    }
    std::vector<KMatrix> residuals;
    std::vector<NFElem> rhs;
    for (const auto& rel : rels) {
      Truncated prod = Truncated::constant(KMatrix::identity(r), order);
      for (int letter : rel) {
        const std::size_t i = static_cast<std::size_t>(std::abs(letter)) - 1;
        prod = prod * (letter > 0 ? images[i] : inverses[i]);
      }
      for (std::size_t lower = 1; lower < d; ++lower)
        if (!prod[lower].is_zero()) throw InvariantError("relator fails below the current lifting order");
      residuals.push_back(prod[d]);
      for (const auto& x : prod[d].data()) rhs.push_back(-x);
    }
    std::optional<std::vector<NFElem>> sol;
    if (rels.empty()) {
      sol = std::vector<NFElem>(s * r * r);
    } else {
      sol = solve(j, rhs);
    }
    if (!sol) {
      out.residuals = std::move(residuals);
      return out;
    }
    Cochain next = unflatten(*sol, s, r);
    for (std::size_t i = 0; i < s; ++i) factor[i][d] = next[i];
    out.coefficients.push_back(std::move(next));
    out.order_reached = d;
  }
  out.order_reached = order;
  out.success = true;
  return out;
}

}  // namespace hk
