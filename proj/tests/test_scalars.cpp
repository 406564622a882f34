#include <doctest.h>

#include "hodgekit/polynomial.hpp"
#include "hodgekit/scalars.hpp"
#include "test_support.hpp"

using namespace hk;

TEST_CASE("valuation of rationals") {
  CHECK(valuation(ValuedScalar(4, PrimePlace(2))) == ExtInt::of(2));
  CHECK(valuation(ValuedScalar(Rational(3, 8), PrimePlace(2))) == ExtInt::of(-3));
  CHECK(valuation(ValuedScalar(0, PrimePlace(5))).infinite);
}

TEST_CASE("log_abs is minus the valuation") {
  CHECK(log_abs(ValuedScalar(4, PrimePlace(2))) == LogValue(Rational(-2)));
  CHECK(log_abs(ValuedScalar(Rational(1, 3), PrimePlace(3))) == LogValue(Rational(1)));
  CHECK(log_abs(ValuedScalar(7, PrimePlace(2))) == LogValue(Rational(0)));
  CHECK(log_abs(ValuedScalar(0, PrimePlace(2))).is_neg_inf());
}

TEST_CASE("prime place rejects composites") {
  CHECK_THROWS_AS(PrimePlace(1), ValidationError);
  CHECK_THROWS_AS(PrimePlace(9), ValidationError);
  CHECK(PrimePlace(7).q() == 7);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-4") == -4);
  CHECK(to_string(parse_rational("10/4")) == "5/2");
  CHECK_THROWS_AS(parse_rational("1/0"), ValidationError);
  CHECK_THROWS_AS(parse_rational("0.5"), ValidationError);
  CHECK_THROWS_AS(parse_rational(""), ValidationError);
  CHECK_THROWS_AS(parse_rational("1/-2"), ValidationError);
}

TEST_CASE("valuation is a valuation on random rationals") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const long p = rng.prime();
    const Rational x = rng.rational(200, 200), y = rng.rational(200, 200);
    CHECK(valuation(Rational(x * y), p) == valuation(x, p) + valuation(y, p));
    const ExtInt vs = valuation(Rational(x + y), p);
    const ExtInt vx = valuation(x, p), vy = valuation(y, p);
    CHECK(vs >= std::min(vx, vy));
    if (vx != vy) CHECK(vs == std::min(vx, vy));
  }
}

TEST_CASE("number field normalization") {
  auto gauss = std::make_shared<const NumberField>(std::vector<Rational>{1, 0, 1});
  const NFElem theta = NFElem::generator(gauss);
  CHECK(theta * theta == NFElem(-1));
  CHECK(nf_normalize(gauss, {0, 1}) == theta);
  // x^2 + x mod x^2 + 1: quotient 1, remainder x - 1
  const QPoly num{0, 1, 1}, mod{1, 0, 1};
  const auto [q, r] = poly_divmod(num, mod);
  CHECK(r == QPoly{-1, 1});
  CHECK(nf_normalize(gauss, {0, 1, 1}) == NFElem(gauss, r));
  const NFElem e = nf_normalize(gauss, {3, 2, 5, 1});
  CHECK(nf_normalize(gauss, e.coeffs()) == e);
  CHECK_THROWS_AS(nf_normalize(gauss, std::vector<Rational>(kMaxUnreducedDegree + 1, 1)), ValidationError);
}

TEST_CASE("number field construction checks") {
  CHECK_THROWS_AS(NumberField({1, 2, 1}), ValidationError);  // (x+1)^2
  CHECK_THROWS_AS(NumberField({1, 0, 2}), ValidationError);  // not monic
  CHECK_NOTHROW(NumberField({-2, 0, 1}));
}

TEST_CASE("number field arithmetic satisfies field axioms") {
  auto field = std::make_shared<const NumberField>(std::vector<Rational>{-2, 0, 0, 1});  // x^3 - 2
  testing::Rng rng(5);
  auto random_elem = [&] {
    return NFElem(field, {rng.rational(9, 5), rng.rational(9, 5), rng.rational(9, 5)});
  };
  for (int trial = 0; trial < 60; ++trial) {
    const NFElem a = random_elem(), b = random_elem(), c = random_elem();
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK(a - a == NFElem());
    if (!a.is_zero()) CHECK(a * a.inverse() == NFElem(1));
  }
}

TEST_CASE("cyclotomic polynomials") {
  CHECK(cyclotomic(1) == QPoly{-1, 1});
  CHECK(cyclotomic(4) == QPoly{1, 0, 1});
  CHECK(cyclotomic(6) == QPoly{1, -1, 1});
  CHECK(euler_phi(12) == 4);
  const auto f = cyclotomic_factorization(poly_mul(cyclotomic(4), cyclotomic(3)));
  REQUIRE(f.has_value());
  CHECK(f->at(4) == 1);
  CHECK(f->at(3) == 1);
  CHECK_FALSE(cyclotomic_factorization(QPoly{-2, 1}).has_value());
}
