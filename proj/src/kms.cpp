#include "hodgekit/kms.hpp"

#include <cmath>
#include <utility>

#include "hodgekit/matrix.hpp"

namespace hk {

namespace {

GaussianRational mul(const GaussianRational& x, const GaussianRational& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}

GaussianRational conj(const GaussianRational& x) { return {x.re, -x.im}; }

QMatrix exact_matrix(const GaussianRational& lambda) {
  const Rational& u = lambda.re;
  const Rational& v = lambda.im;
  const GaussianRational sq = mul(lambda, lambda);
  return QMatrix{{1, 2 * u, 2 * v}, {-u, 1 - sq.re, -sq.im}, {-v, -sq.im, 1 + sq.re}};
}

}  // namespace

WeightResidue kms_rescale(const WeightResidue& x, std::complex<double> lambda) {
  const auto alpha_bar = std::conj(x.residue);
  return {x.weight + 2 * (lambda * alpha_bar).real(), x.residue - x.weight * lambda - alpha_bar * lambda * lambda};
}

ExactWeightResidue kms_rescale(const ExactWeightResidue& x, const GaussianRational& lambda) {
  const GaussianRational alpha_bar = conj(x.residue);
  const GaussianRational la = mul(lambda, alpha_bar);
  const GaussianRational al2 = mul(alpha_bar, mul(lambda, lambda));
  return {x.weight + 2 * la.re,
          {x.residue.re - x.weight * lambda.re - al2.re, x.residue.im - x.weight * lambda.im - al2.im}};
}

std::array<std::array<double, 3>, 3> kms_matrix(std::complex<double> lambda) {
  const double u = lambda.real(), v = lambda.imag();
  const auto sq = lambda * lambda;
  return {{{1, 2 * u, 2 * v}, {-u, 1 - sq.real(), -sq.imag()}, {-v, -sq.imag(), 1 + sq.real()}}};
}

WeightResidue kms_unrescale(const WeightResidue& y, std::complex<double> lambda) {
  auto m = kms_matrix(lambda);
  std::array<double, 3> b{y.weight, y.residue.real(), y.residue.imag()};
  // Gaussian elimination with partial pivoting.
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    std::swap(m[piv], m[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = c + 1; r < 3; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < 3; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<double, 3> x{};
  for (std::size_t i = 3; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < 3; ++k) s -= m[i][k] * x[k];
    x[i] = s / m[i][i];
  }
  return {x[0], {x[1], x[2]}};
}

ExactWeightResidue kms_unrescale(const ExactWeightResidue& y, const GaussianRational& lambda) {
  const auto x = solve(exact_matrix(lambda), QVector{y.weight, y.residue.re, y.residue.im});
  if (!x) throw InvariantError("KMS map is singular");
  return {(*x)[0], {(*x)[1], (*x)[2]}};
}

Rational residue_exponential(const Rational& a) {
  Rational t = kResidueExponentSign * a;
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  t -= fl;
  t.canonicalize();
  return t;
}

std::vector<Rational> residue_exponential(const std::vector<Rational>& residues) {
  std::vector<Rational> out;
  out.reserve(residues.size());
  for (const auto& a : residues) out.push_back(residue_exponential(a));
  return out;
}

}  // namespace hk
