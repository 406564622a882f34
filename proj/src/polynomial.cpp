#include "hodgekit/polynomial.hpp"

namespace hk {

unsigned long euler_phi(unsigned long m) {
  unsigned long result = m;
  for (unsigned long d = 2; d * d <= m; ++d) {
    if (m % d) continue;
    while (m % d == 0) m /= d;
    result -= result / d;
  }
  if (m > 1) result -= result / m;
  return result;
}

QPoly cyclotomic(unsigned long m) {
  if (m == 0) throw ValidationError("cyclotomic(0)");
  // Moebius inversion: Phi_m = prod_{d | m} (x^d - 1)^{mu(m/d)}
  auto mobius = [](unsigned long n) {
    int mu = 1;
    for (unsigned long d = 2; d * d <= n; ++d) {
      if (n % d) continue;
      n /= d;
      if (n % d == 0) return 0;
      mu = -mu;
    }
    return n > 1 ? -mu : mu;
  };
  auto x_pow_minus_one = [](unsigned long d) {
    QPoly p(d + 1);
    p[0] = -1;
    p[d] = 1;
    return p;
  };
  QPoly num{1}, den{1};
  for (unsigned long d = 1; d <= m; ++d) {
    if (m % d) continue;
    const int mu = mobius(m / d);
    if (mu == 1) num = poly_mul(num, x_pow_minus_one(d));
    if (mu == -1) den = poly_mul(den, x_pow_minus_one(d));
  }
  return poly_divmod(num, den).first;
}

std::optional<std::map<unsigned long, unsigned>> cyclotomic_factorization(const QPoly& input) {
  QPoly p = input;
  poly_trim(p);
  if (p.empty()) return std::nullopt;
  std::map<unsigned long, unsigned> mult;
  const std::size_t deg = p.size() - 1;
  // phi(m) >= sqrt(m/2), so phi(m) <= deg forces m <= 2 deg^2
  const unsigned long bound = 2 * deg * deg + 2;
  for (unsigned long m = 1; m <= bound && p.size() > 1; ++m) {
    if (euler_phi(m) > p.size() - 1) continue;
    const QPoly phi = cyclotomic(m);
    for (;;) {
      auto [q, r] = poly_divmod(p, phi);
      if (!r.empty()) break;
      p = std::move(q);
      ++mult[m];
    }
  }
  if (p.size() != 1) return std::nullopt;
  return mult;
}

}  // namespace hk
