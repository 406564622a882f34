#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hodgekit/scalars.hpp"

namespace hk {

// Dense univariate polynomials, coefficients low to high, no trailing zeros.
template <class T>
using Poly = std::vector<T>;

template <class T>
void poly_trim(Poly<T>& p) {
  while (!p.empty() && is_zero(p.back())) p.pop_back();
}

template <class T>
Poly<T> poly_mul(const Poly<T>& a, const Poly<T>& b) {
  if (a.empty() || b.empty()) return {};
  Poly<T> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  poly_trim(out);
  return out;
}

template <class T>
Poly<T> poly_sub(Poly<T> a, const Poly<T>& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  poly_trim(a);
  return a;
}

/// (quotient, remainder) of a by nonzero b.
template <class T>
std::pair<Poly<T>, Poly<T>> poly_divmod(Poly<T> a, const Poly<T>& b) {
  poly_trim(a);
  if (b.empty()) throw ValidationError("polynomial division by zero");
  if (a.size() < b.size()) return {Poly<T>{}, std::move(a)};
  Poly<T> q(a.size() - b.size() + 1);
  while (!a.empty() && a.size() >= b.size()) {
    const T c = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    q[shift] = c;
    for (std::size_t k = 0; k < b.size(); ++k) a[shift + k] -= c * b[k];
    a.pop_back();
    poly_trim(a);
  }
  poly_trim(q);
  return {std::move(q), std::move(a)};
}

/// Product of (x - root) over the given roots.
template <class T>
Poly<T> poly_from_roots(const std::vector<T>& roots) {
  Poly<T> p{T(1)};
  for (const auto& r : roots) p = poly_mul(p, Poly<T>{-r, T(1)});
  return p;
}

using QPoly = Poly<Rational>;

/// The m-th cyclotomic polynomial.
QPoly cyclotomic(unsigned long m);

/// Euler's totient.
unsigned long euler_phi(unsigned long m);

/// If p (monic, nonzero constant term) factors over Q as a product of
/// cyclotomic polynomials, returns the multiplicity of each Phi_m.
std::optional<std::map<unsigned long, unsigned>> cyclotomic_factorization(const QPoly& p);

}  // namespace hk
