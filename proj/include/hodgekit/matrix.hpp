#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hodgekit/scalars.hpp"

namespace hk {

/// Dense row-major matrix over an exact field (Rational or NFElem).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw ValidationError("matrix data size mismatch");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ValidationError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_columns(const std::vector<std::vector<T>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != rows) throw ValidationError("column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  void set_col(std::size_t j, std::span<const T> v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  const std::vector<T>& data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  Matrix select_columns(std::span<const std::size_t> idx) const {
    Matrix b(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = (*this)(i, idx[j]);
    return b;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return hk::is_zero(x); });
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  Matrix operator-() const {
    Matrix r = *this;
    for (auto& x : r.data_) x = -x;
    return r;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ValidationError("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (hk::is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
    if (a.cols_ != v.size()) throw ValidationError("matrix-vector dimension mismatch");
    std::vector<T> out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        if (!hk::is_zero(v[k])) out[i] += a(i, k) * v[k];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = Matrix<Rational>;
using KMatrix = Matrix<NFElem>;
using QVector = std::vector<Rational>;

template <class T>
struct RowEchelon {
  Matrix<T> reduced;                // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

/// Gauss-Jordan elimination; the first nonzero entry in a column is the pivot.
template <class T>
RowEchelon<T> rref(Matrix<T> m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t piv = r;
    while (piv < m.rows() && is_zero(m(piv, c))) ++piv;
    if (piv == m.rows()) continue;
    if (piv != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    const T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      const T f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

template <class T>
std::size_t rank(const Matrix<T>& m) {
  return rref(m).pivots.size();
}

/// Kernel basis as columns; one basis vector per free column, with that
/// free variable set to 1 and the other free variables set to 0.
template <class T>
Matrix<T> kernel(const Matrix<T>& m) {
  const auto [r, piv] = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : piv) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(m.cols());
    v[f] = T(1);
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -r(i, f);
    basis.push_back(std::move(v));
  }
  return Matrix<T>::from_columns(basis, m.cols());
}

/// Solves a x = b. Free variables are set to zero; nullopt if inconsistent.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& a, const std::vector<T>& b) {
  if (b.size() != a.rows()) throw ValidationError("solve: right-hand side size mismatch");
  Matrix<T> aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  const auto [r, piv] = rref(std::move(aug));
  if (!piv.empty() && piv.back() == a.cols()) return std::nullopt;
  std::vector<T> x(a.cols());
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = r(i, a.cols());
  return x;
}

template <class T>
T determinant(Matrix<T> m) {
  if (!m.square()) throw ValidationError("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && is_zero(m(piv, c))) ++piv;
    if (piv == n) return T{};
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    const T inv = T(1) / m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (is_zero(m(i, c))) continue;
      const T f = m(i, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Throws ValidationError(what) if singular.
template <class T>
Matrix<T> inverse(const Matrix<T>& m, const std::string& what = "matrix is singular") {
  if (!m.square()) throw ValidationError("inverse of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return m;
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  const auto [r, piv] = rref(std::move(aug));
  if (piv.size() < n || piv[n - 1] != n - 1) throw ValidationError(what);
  return r.block(0, n, n, n);
}

template <class T>
Matrix<T> power(const Matrix<T>& m, unsigned long e) {
  Matrix<T> result = Matrix<T>::identity(m.rows());
  Matrix<T> base = m;
  while (e) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

template <class T>
T trace(const Matrix<T>& m) {
  T t{};
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

/// Characteristic polynomial det(xI - m), coefficients low to high (monic).
/// Faddeev-LeVerrier recursion; valid in characteristic zero.
template <class T>
std::vector<T> characteristic_polynomial(const Matrix<T>& m) {
  if (!m.square()) throw ValidationError("characteristic polynomial of a non-square matrix");
  const std::size_t n = m.rows();
  std::vector<T> c(n + 1);
  c[n] = T(1);
  Matrix<T> mk(n, n);  // M_0 = 0
  const Matrix<T> id = Matrix<T>::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = m * mk + id * c[n - k + 1];
    const T tr = trace(Matrix<T>(m * mk));
    c[n - k] = -tr / T(static_cast<long>(k));
  }
  return c;
}

/// True iff (m - I)^n = 0.
template <class T>
bool is_unipotent(const Matrix<T>& m) {
  if (!m.square()) return false;
  return power(Matrix<T>(m - Matrix<T>::identity(m.rows())), m.rows()).is_zero();
}

template <class T>
bool is_nilpotent(const Matrix<T>& m) {
  if (!m.square()) return false;
  return power(m, m.rows()).is_zero();
}

/// Horizontal concatenation [a | b].
template <class T>
Matrix<T> hconcat(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.rows() != b.rows()) throw ValidationError("hconcat row mismatch");
  Matrix<T> c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, a.cols() + j) = b(i, j);
  }
  return c;
}

/// Vertical concatenation.
template <class T>
Matrix<T> vconcat(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols()) throw ValidationError("vconcat column mismatch");
  Matrix<T> c(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(a.rows() + i, j) = b(i, j);
  return c;
}

/// Basis (as columns) of the column span, in rref-pivot order of the input columns.
template <class T>
Matrix<T> column_basis(const Matrix<T>& m) {
  if (m.cols() == 0) return Matrix<T>(m.rows(), 0);
  const auto ech = rref(m);
  return m.select_columns(ech.pivots);
}

/// Extends the independent columns of `sub` to a basis of the ambient
/// space by appending standard vectors.
template <class T>
Matrix<T> extend_to_basis(const Matrix<T>& sub, std::size_t dim) {
  Matrix<T> cur = sub.cols() ? sub : Matrix<T>(dim, 0);
  return column_basis(hconcat(cur, Matrix<T>::identity(dim)));
}

/// Dimension of span(a) + span(b).
template <class T>
std::size_t span_rank(const Matrix<T>& a, const Matrix<T>& b) {
  return rank(hconcat(a, b));
}

/// True iff every column of b lies in the span of a.
template <class T>
bool span_contains(const Matrix<T>& a, const Matrix<T>& b) {
  if (b.cols() == 0) return true;
  if (a.cols() == 0) return b.is_zero();
  return rank(hconcat(a, b)) == rank(a);
}

/// Basis of span(a) ∩ span(b); both inputs must have independent columns.
template <class T>
Matrix<T> intersect_spans(const Matrix<T>& a, const Matrix<T>& b) {
  const std::size_t n = a.rows() ? a.rows() : b.rows();
  if (a.cols() == 0 || b.cols() == 0) return Matrix<T>(n, 0);
  const Matrix<T> k = kernel(hconcat(a, -b));
  return column_basis(Matrix<T>(a * k.block(0, 0, a.cols(), k.cols())));
}

template <class T, class U, class F>
Matrix<U> map_entries(const Matrix<T>& m, F&& f) {
  Matrix<U> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = f(m(i, j));
  return out;
}

inline KMatrix to_field(const QMatrix& m) {
  return map_entries<Rational, NFElem>(m, [](const Rational& x) { return NFElem(x); });
}

/// Throws ValidationError if some entry is irrational.
inline QMatrix to_rational(const KMatrix& m) {
  return map_entries<NFElem, Rational>(m, [](const NFElem& x) { return x.to_rational(); });
}

}  // namespace hk
