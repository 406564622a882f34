#include "hodgekit/scalars.hpp"

#include <cctype>

namespace hk {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

void trim_zeros(std::vector<Rational>& c) {
  while (!c.empty() && sgn(c.back()) == 0) c.pop_back();
}

// Remainder of a modulo the monic polynomial m.
void reduce_mod(std::vector<Rational>& a, const std::vector<Rational>& m) {
  const std::size_t d = m.size() - 1;
  for (std::size_t top = a.size(); top-- > d;) {
    if (sgn(a[top]) == 0) continue;
    const Rational lead = a[top];
    for (std::size_t k = 0; k <= d; ++k) a[top - d + k] -= lead * m[k];
  }
  if (a.size() > d) a.resize(d);
  trim_zeros(a);
}

std::vector<Rational> poly_mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Rational> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Remainder of a by b (b nonzero), over Q.
std::vector<Rational> poly_rem(std::vector<Rational> a, const std::vector<Rational>& b) {
  trim_zeros(a);
  const std::size_t db = b.size() - 1;
  while (a.size() > db && !a.empty()) {
    const Rational f = a.back() / b.back();
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t k = 0; k <= db; ++k) a[shift + k] -= f * b[k];
    trim_zeros(a);
  }
  return a;
}

std::vector<Rational> poly_sub(std::vector<Rational> a, const std::vector<Rational>& b) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  trim_zeros(a);
  return a;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den))
    throw ValidationError("invalid rational \"" + std::string(text) + "\"");
  const Integer n{std::string(num)}, d{std::string(den)};
  if (d == 0) throw ValidationError("invalid rational \"" + std::string(text) + "\"");
  Rational r(n, d);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& x) { return x.get_str(); }

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimePlace::PrimePlace(long p) : p_(p) {
  if (!is_prime(p)) throw ValidationError("p = " + std::to_string(p) + " is not prime");
}

ExtInt operator+(const ExtInt& a, const ExtInt& b) {
  if (a.infinite || b.infinite) return ExtInt::inf();
  return ExtInt::of(a.value + b.value);
}

long valuation(const Integer& x, long p) {
  Integer rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), Integer(p).get_mpz_t()));
}

ExtInt valuation(const Rational& x, long p) {
  if (sgn(x) == 0) return ExtInt::inf();
  return ExtInt::of(valuation(x.get_num(), p) - valuation(x.get_den(), p));
}

const Rational& LogValue::value() const {
  if (!value_) throw InvariantError("LogValue::value() on -infinity");
  return *value_;
}

std::string LogValue::str() const { return value_ ? to_string(*value_) : std::string("-inf"); }

LogValue operator+(const LogValue& a, const Rational& shift) {
  if (a.is_neg_inf()) return a;
  return LogValue(a.value() + shift);
}

LogValue ValuedScalar::log_abs() const { return hk::log_abs(value_, place_.p()); }

LogValue log_abs(const Rational& x, long p) {
  const ExtInt v = valuation(x, p);
  if (v.infinite) return LogValue::neg_inf();
  return LogValue(Rational(-v.value));
}

// ---------------------------------------------------------------------------

NumberField::NumberField(std::vector<Rational> minpoly) : minpoly_(std::move(minpoly)) {
  trim_zeros(minpoly_);
  if (minpoly_.size() < 2) throw ValidationError("minimal polynomial must have degree >= 1");
  if (minpoly_.back() != 1) throw ValidationError("minimal polynomial must be monic");
  // squarefree: gcd(f, f') must be constant
  std::vector<Rational> a = minpoly_;
  std::vector<Rational> b(minpoly_.size() - 1);
  for (std::size_t i = 1; i < minpoly_.size(); ++i) b[i - 1] = minpoly_[i] * static_cast<long>(i);
  trim_zeros(b);
  while (!b.empty()) {
    auto r = poly_rem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (a.size() > 1) throw ValidationError("minimal polynomial is not squarefree");
}

std::shared_ptr<const NumberField> NumberField::rationals() {
  static const auto q = std::make_shared<const NumberField>(std::vector<Rational>{0, 1});
  return q;
}

NFElem::NFElem(FieldPtr field, std::vector<Rational> coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  if (field_ && field_->is_rationals()) field_.reset();
  reduce();
}

NFElem NFElem::generator(const FieldPtr& field) { return NFElem(field, {0, 1}); }

Rational NFElem::to_rational() const {
  if (!is_rational()) throw ValidationError("number field element " + str() + " is not rational");
  return coeffs_.empty() ? Rational(0) : coeffs_[0];
}

void NFElem::reduce() {
  if (coeffs_.size() > kMaxUnreducedDegree)
    throw ValidationError("number field element exceeds the unreduced degree bound");
  if (field_) reduce_mod(coeffs_, field_->minpoly());
  trim_zeros(coeffs_);
}

void NFElem::adopt(const NFElem& o) {
  if (!o.field_) return;
  if (!field_) {
    field_ = o.field_;
    return;
  }
  if (field_ != o.field_ && !(*field_ == *o.field_))
    throw ValidationError("arithmetic between elements of different number fields");
}

NFElem NFElem::operator-() const {
  NFElem r = *this;
  for (auto& c : r.coeffs_) c = -c;
  return r;
}

NFElem& NFElem::operator+=(const NFElem& o) {
  adopt(o);
  if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim_zeros(coeffs_);
  return *this;
}

NFElem& NFElem::operator-=(const NFElem& o) {
  adopt(o);
  if (coeffs_.size() < o.coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  trim_zeros(coeffs_);
  return *this;
}

NFElem& NFElem::operator*=(const NFElem& o) {
  adopt(o);
  if (is_rational() && o.is_rational()) {
    if (coeffs_.empty() || o.coeffs_.empty()) {
      coeffs_.clear();
    } else {
      coeffs_[0] *= o.coeffs_[0];
    }
    return *this;
  }
  coeffs_ = poly_mul(coeffs_, o.coeffs_);
  reduce();
  return *this;
}

NFElem NFElem::inverse() const {
  if (is_zero()) throw ValidationError("division by zero in number field");
  if (is_rational()) return NFElem(field_, {1 / coeffs_[0]});
  // extended Euclid: find s with s*a = 1 mod f
  const auto& f = field_->minpoly();
  std::vector<Rational> r0 = f, r1 = coeffs_;
  std::vector<Rational> s0, s1{1};
  while (!r1.empty()) {
    // quotient of r0 by r1
    std::vector<Rational> quo(r0.size() >= r1.size() ? r0.size() - r1.size() + 1 : 0);
    std::vector<Rational> rem = r0;
    while (rem.size() >= r1.size() && !rem.empty()) {
      const Rational c = rem.back() / r1.back();
      const std::size_t shift = rem.size() - r1.size();
      quo[shift] = c;
      for (std::size_t k = 0; k < r1.size(); ++k) rem[shift + k] -= c * r1[k];
      trim_zeros(rem);
    }
    trim_zeros(quo);
    auto s2 = poly_sub(s0, poly_mul(quo, s1));
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.size() != 1) throw ValidationError("element is a zero divisor: minimal polynomial is reducible");
  const Rational lead = r0[0];
  for (auto& c : s0) c /= lead;
  return NFElem(field_, std::move(s0));
}

NFElem& NFElem::operator/=(const NFElem& o) {
  adopt(o);
  NFElem inv = o;
  if (!inv.field_) inv.field_ = field_;
  return *this *= inv.inverse();
}

std::string NFElem::str() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (sgn(coeffs_[i]) == 0) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(coeffs_[i]) + ")";
    if (i == 1) out += "*t";
    if (i > 1) out += "*t^" + std::to_string(i);
  }
  return out;
}

NFElem nf_normalize(const FieldPtr& field, std::vector<Rational> coeffs) {
  return NFElem(field, std::move(coeffs));
}

}  // namespace hk
