#pragma once

// Exact integer and rational linear algebra. Every routine in this header is
// exact: nothing rounds, and all rationals stay in canonical form.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "gapcover/error.hpp"

namespace gapcover {

using Int = mpz_class;
using Rat = mpq_class;
using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

// ---------------------------------------------------------------------------
// Scalars

/// Parses "p", "-p/q" or a finite decimal like "3.25" into a canonical Rat.
inline Rat parse_rat(const std::string& text) {
  auto fail = [&] { throw Error(Errc::parse, "not a rational: '" + text + "'"); };
  if (text.empty()) fail();
  const auto valid_int = [](const std::string& s, bool allow_sign) {
    std::size_t i = 0;
    if (allow_sign && i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto strip_plus = [](std::string s) {
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    return s;
  };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    std::string n = text.substr(0, slash), d = text.substr(slash + 1);
    if (!valid_int(n, true) || !valid_int(d, false)) fail();
    Int den(d);
    if (den == 0) throw Error(Errc::parse, "zero denominator in '" + text + "'");
    Rat r(Int(strip_plus(n)), den);
    r.canonicalize();
    return r;
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string ip = text.substr(0, dot), fp = text.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    std::string digits = ip + fp;
    if (fp.empty() || !valid_int(fp, false)) fail();
    if (ip.empty() || ip == "-" || ip == "+") digits = (neg ? "-0" : "0") + fp;
    if (!valid_int(digits, true)) fail();
    Int scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
    Rat r(Int(strip_plus(digits)), scale);
    r.canonicalize();
    return r;
  }
  if (!valid_int(text, true)) fail();
  return Rat(Int(strip_plus(text)));
}

/// Canonical "num/den" form; the denominator is always written.
inline std::string to_string(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Int floor(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

inline Int ceil(const Rat& r) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

/// Nearest integer, halves rounded up.
inline Int round_nearest(const Rat& r) { return floor(r + Rat(1, 2)); }

inline Int isqrt_floor(const Int& n) {
  Int s;
  mpz_sqrt(s.get_mpz_t(), n.get_mpz_t());
  return s;
}

inline Int isqrt_ceil(const Int& n) {
  Int s = isqrt_floor(n);
  if (s * s < n) ++s;
  return s;
}

inline bool is_perfect_square(const Int& n) {
  return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

/// Rational r with r >= sqrt(q), exact when q is a rational square, otherwise
/// within 2^-bits of sqrt(q).
inline Rat sqrt_upper(const Rat& q, unsigned bits = 40) {
  if (q < 0) throw Error(Errc::dimension, "sqrt of negative rational");
  if (is_perfect_square(q.get_num()) && is_perfect_square(q.get_den()))
    return Rat(isqrt_floor(q.get_num()), isqrt_floor(q.get_den()));
  Int scale = Int(1) << bits;
  Int s = isqrt_ceil(ceil(q * scale * scale));
  Rat r(s, scale);
  r.canonicalize();
  return r;
}

/// Rational r with r <= sqrt(q), exact when q is a rational square.
inline Rat sqrt_lower(const Rat& q, unsigned bits = 40) {
  if (q < 0) throw Error(Errc::dimension, "sqrt of negative rational");
  if (is_perfect_square(q.get_num()) && is_perfect_square(q.get_den()))
    return Rat(isqrt_floor(q.get_num()), isqrt_floor(q.get_den()));
  Int scale = Int(1) << bits;
  Int s = isqrt_floor(floor(q * scale * scale));
  Rat r(s, scale);
  r.canonicalize();
  return r;
}

/// Best continued-fraction convergent of x whose denominator is at most cap.
inline Rat rationalize(double x, const Int& cap = Int(1) << 48) {
  Rat exact(x);  // doubles are dyadic rationals, so this is exact
  if (exact.get_den() <= cap) return exact;
  Int h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  Rat rem = exact;
  while (true) {
    Int a = floor(rem);
    Int h = a * h_prev + h_prev2;
    Int k = a * k_prev + k_prev2;
    if (k > cap) break;
    h_prev2 = h_prev, h_prev = h;
    k_prev2 = k_prev, k_prev = k;
    Rat frac = rem - a;
    if (frac == 0) break;
    rem = 1 / frac;
  }
  Rat r(h_prev, k_prev);
  r.canonicalize();
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// ---------------------------------------------------------------------------
// Dense matrices

/// Row-major dense matrix with dimensions fixed at construction.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw Error(Errc::dimension, "ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (rows[i].size() != m.cols_) throw Error(Errc::dimension, "ragged row list");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return {data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_};
  }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  void set_row(std::size_t i, const std::vector<T>& v) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(i, j) = v[j];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(Errc::dimension, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& x) {
    if (a.cols_ != x.size()) throw Error(Errc::dimension, "matrix-vector shape mismatch");
    std::vector<T> y(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) y[i] += a(i, j) * x[j];
    return y;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(Errc::dimension, "matrix sum shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend Matrix operator-(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(Errc::dimension, "matrix difference shape mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend Matrix operator*(const T& s, Matrix m) {
    for (auto& e : m.data_) e *= s;
    return m;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  const std::vector<T>& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Mat = Matrix<Rat>;
using IntMat = Matrix<Int>;

inline Mat to_rat(const IntMat& m) {
  Mat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

inline bool is_integral(const Mat& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](const Rat& r) { return r.get_den() == 1; });
}

inline IntMat to_int(const Mat& m) {
  if (!is_integral(m)) throw Error(Errc::representation, "matrix has non-integer entries");
  IntMat r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).get_num();
  return r;
}

inline RatVec to_rat(const IntVec& v) { return {v.begin(), v.end()}; }

/// Least common multiple of all denominators in m.
inline Int common_denominator(const Mat& m) {
  Int d = 1;
  for (const auto& e : m.data()) d = lcm(d, e.get_den());
  return d;
}

/// A square integer matrix with determinant exactly +1 or -1.
class UnimodularMat {
 public:
  explicit UnimodularMat(IntMat m);
  static UnimodularMat identity(std::size_t n) { return UnimodularMat(IntMat::identity(n), 1); }

  const IntMat& matrix() const noexcept { return m_; }
  std::size_t size() const noexcept { return m_.rows(); }
  int det_sign() const noexcept { return sign_; }
  const Int& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  friend bool operator==(const UnimodularMat& a, const UnimodularMat& b) { return a.m_ == b.m_; }

 private:
  UnimodularMat(IntMat m, int sign) : m_(std::move(m)), sign_(sign) {}
  IntMat m_;
  int sign_;
};

// ---------------------------------------------------------------------------
// Fraction-free elimination

namespace detail {

struct BareissResult {
  std::size_t rank = 0;
  int sign = 1;  // parity of row swaps
  std::vector<std::size_t> pivot_cols;
};

/// In-place Bareiss forward elimination over the first `ncols` columns.
/// Rows below the rank end up zero in those columns; divisions are exact.
inline BareissResult bareiss_forward(IntMat& m, std::size_t ncols) {
  BareissResult res;
  Int prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r) {
      m.swap_rows(p, r);
      res.sign = -res.sign;
    }
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      for (std::size_t j = c + 1; j < m.cols(); ++j) {
        Int v = m(i, j) * m(r, c) - m(i, c) * m(r, j);
        mpz_divexact(m(i, j).get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
      }
      m(i, c) = 0;
    }
    prev = m(r, c);
    res.pivot_cols.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

/// Scales each row of m by the lcm of its denominators.
inline IntMat integerize_rows(const Mat& m, std::vector<Int>* scales = nullptr) {
  IntMat out(m.rows(), m.cols());
  if (scales) scales->assign(m.rows(), Int(1));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int s = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) s = lcm(s, m(i, j).get_den());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Rat v = m(i, j) * s;
      out(i, j) = v.get_num();
    }
    if (scales) (*scales)[i] = s;
  }
  return out;
}

}  // namespace detail

inline Int det(const IntMat& m) {
  if (!m.square()) throw Error(Errc::dimension, "determinant of non-square matrix");
  if (m.rows() == 0) return 1;
  IntMat w = m;
  auto res = detail::bareiss_forward(w, w.cols());
  if (res.rank < w.rows()) return 0;
  return res.sign * w(w.rows() - 1, w.cols() - 1);
}

inline Rat det(const Mat& m) {
  if (!m.square()) throw Error(Errc::dimension, "determinant of non-square matrix");
  std::vector<Int> scales;
  IntMat w = detail::integerize_rows(m, &scales);
  Rat d(det(w));
  for (const auto& s : scales) d /= s;
  return d;
}

inline std::size_t rank(const Mat& m) {
  IntMat w = detail::integerize_rows(m);
  return detail::bareiss_forward(w, w.cols()).rank;
}

inline std::size_t rank(const IntMat& m) {
  IntMat w = m;
  return detail::bareiss_forward(w, w.cols()).rank;
}

/// Solves A·X = B for square nonsingular A.
inline Mat solve(const Mat& a, const Mat& b) {
  if (!a.square()) throw Error(Errc::dimension, "solve needs a square system matrix");
  if (b.rows() != a.rows()) throw Error(Errc::dimension, "right-hand side row count mismatch");
  const std::size_t n = a.rows(), p = b.cols();
  Mat aug(n, n + p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    for (std::size_t j = 0; j < p; ++j) aug(i, n + j) = b(i, j);
  }
  IntMat w = detail::integerize_rows(aug);
  auto res = detail::bareiss_forward(w, n);
  if (res.rank < n) throw Error(Errc::singular, "matrix is singular");
  Mat x(n, p);
  for (std::size_t c = 0; c < p; ++c) {
    for (std::size_t i = n; i-- > 0;) {
      Rat acc(w(i, n + c));
      for (std::size_t j = i + 1; j < n; ++j) acc -= Rat(w(i, j)) * x(j, c);
      x(i, c) = acc / Rat(w(i, i));
    }
  }
  return x;
}

inline RatVec solve(const Mat& a, const RatVec& b) {
  Mat rhs(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
  return solve(a, rhs).col(0);
}

inline Mat inverse(const Mat& m) {
  if (!m.square()) throw Error(Errc::dimension, "inverse of non-square matrix");
  return solve(m, Mat::identity(m.rows()));
}

// ---------------------------------------------------------------------------
// Hermite normal form

/// General row-echelon Hermite form H = U·A: pivots positive and strictly
/// increasing in column, entries above each pivot reduced into [0, pivot),
/// rows at and beyond `rank` are zero. Works for any shape and rank.
struct EchelonForm {
  IntMat h;
  IntMat u;
  std::size_t rank = 0;
};

inline EchelonForm echelon_hnf(const IntMat& a) {
  const std::size_t m = a.rows(), n = a.cols();
  IntMat h = a, u = IntMat::identity(m);
  auto combine = [&](std::size_t r, std::size_t i, const Int& s, const Int& t, const Int& p,
                     const Int& q) {
    // row_r <- s·row_r + t·row_i ; row_i <- p·row_r + q·row_i
    for (auto* mat : {&h, &u}) {
      for (std::size_t j = 0; j < mat->cols(); ++j) {
        Int x = (*mat)(r, j), y = (*mat)(i, j);
        (*mat)(r, j) = s * x + t * y;
        (*mat)(i, j) = p * x + q * y;
      }
    }
  };
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    for (std::size_t i = r + 1; i < m; ++i) {
      if (h(i, c) == 0) continue;
      Int a0 = h(r, c), b0 = h(i, c), g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a0.get_mpz_t(), b0.get_mpz_t());
      Int p = -b0 / g, q = a0 / g;
      combine(r, i, s, t, p, q);
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) {
      for (std::size_t j = 0; j < n; ++j) h(r, j) = -h(r, j);
      for (std::size_t j = 0; j < m; ++j) u(r, j) = -u(r, j);
    }
    for (std::size_t i = 0; i < r; ++i) {
      Int q = floor(Rat(h(i, c), h(r, c)));
      if (q == 0) continue;
      for (std::size_t j = 0; j < n; ++j) h(i, j) -= q * h(r, j);
      for (std::size_t j = 0; j < m; ++j) u(i, j) -= q * u(r, j);
    }
    ++r;
  }
  return {std::move(h), std::move(u), r};
}

struct HermiteForm {
  IntMat h;
  UnimodularMat u;
};

/// Lower-triangular row Hermite form of a full-row-rank integer matrix:
/// H = U·m, pivots positive, entries below each pivot reduced into [0, pivot).
/// Two matrices generate the same row lattice iff their forms are equal.
inline HermiteForm hnf(const IntMat& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntMat rev(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) rev(i, j) = m(i, cols - 1 - j);
  auto ef = echelon_hnf(rev);
  if (ef.rank < rows) throw Error(Errc::rank, "hnf: matrix does not have full row rank");
  IntMat h(rows, cols), u(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t src = rows - 1 - i;
    for (std::size_t j = 0; j < cols; ++j) h(i, j) = ef.h(src, cols - 1 - j);
    for (std::size_t j = 0; j < rows; ++j) u(i, j) = ef.u(src, j);
  }
  return {std::move(h), UnimodularMat(std::move(u))};
}

inline UnimodularMat::UnimodularMat(IntMat m) : m_(std::move(m)), sign_(0) {
  if (!m_.square()) throw Error(Errc::dimension, "unimodular matrix must be square");
  Int d = det(m_);
  if (d == 1)
    sign_ = 1;
  else if (d == -1)
    sign_ = -1;
  else
    throw Error(Errc::lattices_differ, "determinant is " + d.get_str() + ", not +-1");
}

/// Basis (as rows) of the integer left kernel {y in Z^m : y·A = 0}.
inline IntMat left_kernel(const IntMat& a) {
  auto ef = echelon_hnf(a);
  IntMat k(a.rows() - ef.rank, a.rows());
  for (std::size_t i = ef.rank; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) k(i - ef.rank, j) = ef.u(i, j);
  return k;
}

/// Basis (as rows) of Z^n intersected with the rational row span of `rows`.
inline IntMat saturated_basis(const IntMat& rows) {
  const std::size_t n = rows.cols();
  IntMat orth = left_kernel(rows.transpose());  // rows orthogonal to span
  if (orth.rows() == 0) return IntMat::identity(n);
  return left_kernel(orth.transpose());
}

/// True iff the rows of x and y generate the same lattice. Both are scaled by
/// a common denominator and compared through their echelon Hermite forms.
inline bool same_lattice(const Mat& x, const Mat& y) {
  if (x.cols() != y.cols()) return false;
  Int d = lcm(common_denominator(x), common_denominator(y));
  auto ex = echelon_hnf(to_int(Rat(d) * x));
  auto ey = echelon_hnf(to_int(Rat(d) * y));
  if (ex.rank != ey.rank) return false;
  for (std::size_t i = 0; i < ex.rank; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j)
      if (ex.h(i, j) != ey.h(i, j)) return false;
  return true;
}

/// The unique T with T·x = x2, certified integral with |det T| = 1.
inline UnimodularMat unimodular_solve(const Mat& x, const Mat& x2) {
  if (!x.square() || !x2.square() || x.rows() != x2.rows())
    throw Error(Errc::dimension, "unimodular_solve needs two square matrices of equal size");
  Mat t = x2 * inverse(x);
  if (!is_integral(t))
    throw Error(Errc::lattices_differ, "lattices differ: transform is not integral");
  IntMat ti = to_int(t);
  Int d = det(ti);
  if (d != 1 && d != -1)
    throw Error(Errc::lattices_differ, "lattices differ: transform has determinant " + d.get_str());
  return UnimodularMat(std::move(ti));
}

inline Rat dot(const RatVec& a, const RatVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Int dot(const IntVec& a, const IntVec& b) {
  Int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace gapcover
