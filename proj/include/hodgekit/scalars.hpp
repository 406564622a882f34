#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hk {

using Rational = mpq_class;
using Integer = mpz_class;

/// Raised when user-supplied data violates a documented precondition.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an internal invariant fails. Never expected on valid input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Parses "n", "-n" or "n/d". Rejects zero denominators, decimals and blanks.
Rational parse_rational(std::string_view text);
/// Reduced "n" or "n/d" form; inverse of parse_rational.
std::string to_string(const Rational& x);

bool is_prime(long n);

/// A p-adic place of Q. Log magnitudes are taken base q = p.
class PrimePlace {
 public:
  explicit PrimePlace(long p);

  long p() const { return p_; }
  long q() const { return p_; }

  friend bool operator==(const PrimePlace&, const PrimePlace&) = default;

 private:
  long p_;
};

/// Integer or +infinity; the value group of a discretely valued field.
struct ExtInt {
  bool infinite = false;
  long value = 0;

  static ExtInt inf() { return {true, 0}; }
  static ExtInt of(long v) { return {false, v}; }

  friend bool operator==(const ExtInt&, const ExtInt&) = default;
  friend std::strong_ordering operator<=>(const ExtInt& a, const ExtInt& b) {
    if (a.infinite || b.infinite) return a.infinite <=> b.infinite;
    return a.value <=> b.value;
  }
};

ExtInt operator+(const ExtInt& a, const ExtInt& b);

/// Exact p-adic valuation of a rational; +inf for zero.
ExtInt valuation(const Rational& x, long p);
/// Valuation of a nonzero integer.
long valuation(const Integer& x, long p);

/// log_q of an absolute value: a rational or -infinity.
///
/// Ordered with -infinity below every finite value.
class LogValue {
 public:
  LogValue() = default;  // -infinity
  LogValue(Rational v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  static LogValue neg_inf() { return LogValue{}; }

  bool is_neg_inf() const { return !value_.has_value(); }
  const Rational& value() const;

  friend bool operator==(const LogValue& a, const LogValue& b) { return a.value_ == b.value_; }
  friend bool operator<(const LogValue& a, const LogValue& b) {
    if (!b.value_) return false;
    if (!a.value_) return true;
    return *a.value_ < *b.value_;
  }
  friend bool operator>(const LogValue& a, const LogValue& b) { return b < a; }
  friend bool operator<=(const LogValue& a, const LogValue& b) { return !(b < a); }
  friend bool operator>=(const LogValue& a, const LogValue& b) { return !(a < b); }

  std::string str() const;

 private:
  std::optional<Rational> value_;
};

LogValue operator+(const LogValue& a, const Rational& shift);

/// A rational together with the place at which it is measured.
class ValuedScalar {
 public:
  ValuedScalar(Rational value, PrimePlace place) : value_(std::move(value)), place_(place) {}

  const Rational& value() const { return value_; }
  const PrimePlace& place() const { return place_; }

  /// v with |x| = q^(-v).
  ExtInt valuation() const { return hk::valuation(value_, place_.p()); }
  /// log_q |x| = -valuation.
  LogValue log_abs() const;

 private:
  Rational value_;
  PrimePlace place_;
};

inline ExtInt valuation(const ValuedScalar& x) { return x.valuation(); }
inline LogValue log_abs(const ValuedScalar& x) { return x.log_abs(); }
LogValue log_abs(const Rational& x, long p);

// ---------------------------------------------------------------------------
// Number fields Q[x]/(f)

/// Q[x]/(minpoly) for a monic squarefree rational polynomial.
///
/// Irreducibility is not checked; a reducible modulus surfaces as a
/// ValidationError the first time a zero divisor is inverted.
class NumberField {
 public:
  /// Coefficients low to high. Must be monic of degree >= 1 and squarefree.
  explicit NumberField(std::vector<Rational> minpoly);

  static std::shared_ptr<const NumberField> rationals();

  std::size_t degree() const { return minpoly_.size() - 1; }
  const std::vector<Rational>& minpoly() const { return minpoly_; }
  bool is_rationals() const { return degree() == 1 && minpoly_[0] == 0; }

  friend bool operator==(const NumberField& a, const NumberField& b) { return a.minpoly_ == b.minpoly_; }

 private:
  std::vector<Rational> minpoly_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

/// Upper bound on the coefficient count accepted by nf_normalize.
inline constexpr std::size_t kMaxUnreducedDegree = 4096;

/// Element of a number field in the power basis of its generator.
///
/// A default-constructed or integer-constructed element carries no field
/// and behaves as a rational constant; arithmetic adopts the field of the
/// other operand.
class NFElem {
 public:
  NFElem() = default;
  NFElem(long v) : NFElem(Rational(v)) {}  // NOLINT
  NFElem(const Rational& v) {               // NOLINT
    if (sgn(v) != 0) coeffs_.push_back(v);
  }
  NFElem(FieldPtr field, std::vector<Rational> coeffs);

  /// The generator theta of the field.
  static NFElem generator(const FieldPtr& field);

  const FieldPtr& field() const { return field_; }
  /// Reduced coefficients, low to high, without trailing zeros.
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_rational() const { return coeffs_.size() <= 1; }
  /// Requires is_rational().
  Rational to_rational() const;

  NFElem operator-() const;
  NFElem& operator+=(const NFElem& o);
  NFElem& operator-=(const NFElem& o);
  NFElem& operator*=(const NFElem& o);
  NFElem& operator/=(const NFElem& o);
  NFElem inverse() const;

  friend NFElem operator+(NFElem a, const NFElem& b) { return a += b; }
  friend NFElem operator-(NFElem a, const NFElem& b) { return a -= b; }
  friend NFElem operator*(NFElem a, const NFElem& b) { return a *= b; }
  friend NFElem operator/(NFElem a, const NFElem& b) { return a /= b; }
  friend bool operator==(const NFElem& a, const NFElem& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const NFElem& a, const NFElem& b) { return !(a == b); }

  std::string str() const;

 private:
  void adopt(const NFElem& o);
  void reduce();

  FieldPtr field_;
  std::vector<Rational> coeffs_;
};

/// Canonical representative of an element modulo the minimal polynomial.
/// Throws ValidationError if the input has more than kMaxUnreducedDegree coefficients.
NFElem nf_normalize(const FieldPtr& field, std::vector<Rational> coeffs);
inline NFElem nf_normalize(const NFElem& e) { return e; }

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const NFElem& x) { return x.is_zero(); }

}  // namespace hk
