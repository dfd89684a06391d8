#pragma once

// Lattice bases, exact-rational LLL reduction, and a brute-force successive
// minima search for small dimensions.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "gapcover/error.hpp"
#include "gapcover/exact.hpp"

namespace gapcover {

/// d linearly independent rational vectors of dimension d, stored as rows.
class LatticeBasis {
 public:
  explicit LatticeBasis(Mat rows) : rows_(std::move(rows)) {
    if (!rows_.square() || rows_.rows() == 0)
      throw Error(Errc::dimension, "lattice basis must be a nonempty square matrix");
    if (det(rows_) == 0) throw Error(Errc::rank, "lattice basis vectors are dependent");
  }
  static LatticeBasis from_rows(const std::vector<RatVec>& rows) {
    return LatticeBasis(Mat::from_rows(rows));
  }

  std::size_t dim() const noexcept { return rows_.rows(); }
  const Mat& matrix() const noexcept { return rows_; }
  RatVec vector(std::size_t i) const { return rows_.row(i); }

  friend bool operator==(const LatticeBasis& a, const LatticeBasis& b) {
    return a.rows_ == b.rows_;
  }

 private:
  Mat rows_;
};

struct GramSchmidt {
  Mat mu;         // mu(i, j) = <b_i, b*_j> / |b*_j|^2 for j < i
  RatVec norms;   // |b*_i|^2
};

inline GramSchmidt gram_schmidt(const Mat& b) {
  const std::size_t m = b.rows(), n = b.cols();
  GramSchmidt gs{Mat(m, m), RatVec(m)};
  std::vector<RatVec> star(m);
  for (std::size_t i = 0; i < m; ++i) {
    star[i] = b.row(i);
    for (std::size_t j = 0; j < i; ++j) {
      Rat mu = dot(b.row(i), star[j]) / gs.norms[j];
      gs.mu(i, j) = mu;
      for (std::size_t k = 0; k < n; ++k) star[i][k] -= mu * star[j][k];
    }
    gs.mu(i, i) = 1;
    gs.norms[i] = dot(star[i], star[i]);
  }
  return gs;
}

/// Size reduction |mu_ij| <= 1/2 and the Lovasz condition with parameter delta.
inline bool is_lll_reduced(const LatticeBasis& basis, const Rat& delta) {
  auto gs = gram_schmidt(basis.matrix());
  const std::size_t m = basis.dim();
  for (std::size_t i = 1; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (abs(gs.mu(i, j)) > Rat(1, 2)) return false;
    Rat mu = gs.mu(i, i - 1);
    if (gs.norms[i] < (delta - mu * mu) * gs.norms[i - 1]) return false;
  }
  return true;
}

struct LllResult {
  LatticeBasis basis;
  UnimodularMat transform;  // transform · input = basis
};

/// LLL reduction in exact rational arithmetic.
inline LllResult lll_reduce(const LatticeBasis& input, const Rat& delta = Rat(99, 100)) {
  if (delta <= Rat(1, 4) || delta >= 1)
    throw Error(Errc::dimension, "lll: delta must lie in (1/4, 1)");
  const std::size_t m = input.dim(), n = input.matrix().cols();
  Mat b = input.matrix();
  IntMat t = IntMat::identity(m);
  GramSchmidt gs = gram_schmidt(b);

  auto reduce = [&](std::size_t k, std::size_t j) {
    Int q = round_nearest(gs.mu(k, j));
    if (q == 0) return;
    Rat qr(q);
    for (std::size_t c = 0; c < n; ++c) b(k, c) -= qr * b(j, c);
    for (std::size_t c = 0; c < m; ++c) t(k, c) -= q * t(j, c);
    for (std::size_t i = 0; i < j; ++i) gs.mu(k, i) -= qr * gs.mu(j, i);
    gs.mu(k, j) -= qr;
  };

  std::size_t k = 1;
  while (k < m) {
    reduce(k, k - 1);
    Rat mu = gs.mu(k, k - 1);
    if (gs.norms[k] < (delta - mu * mu) * gs.norms[k - 1]) {
      b.swap_rows(k, k - 1);
      t.swap_rows(k, k - 1);
      gs = gram_schmidt(b);
      k = std::max<std::size_t>(k - 1, 1);
    } else {
      for (std::size_t j = k - 1; j-- > 0;) reduce(k, j);
      ++k;
    }
  }
  LllResult out{LatticeBasis(b), UnimodularMat(std::move(t))};
  if (to_rat(out.transform.matrix()) * input.matrix() != b)
    throw Error(Errc::certification, "lll: transform does not map input to output");
  return out;
}

/// Exact data behind the product-of-norms certificate. The squared quantities
/// are exact; norm_product and ratio are rational upper bounds of their
/// square roots (exact whenever the square is a rational square).
struct ReductionCert {
  Rat norm_product_sq;
  Rat norm_product;
  Rat det_abs;
  Rat ratio_sq;
  Rat ratio;
};

inline ReductionCert certify_reduction(const LatticeBasis& v) {
  ReductionCert c;
  c.norm_product_sq = 1;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    RatVec r = v.vector(i);
    c.norm_product_sq *= dot(r, r);
  }
  c.det_abs = abs(det(v.matrix()));
  c.ratio_sq = c.norm_product_sq / (c.det_abs * c.det_abs);
  c.norm_product = sqrt_upper(c.norm_product_sq);
  c.ratio = sqrt_upper(c.ratio_sq);
  return c;
}

struct SuccessiveMinima {
  std::vector<RatVec> vectors;
  RatVec norms_sq;  // lambda_i^2, nondecreasing
};

/// Lattice vectors achieving lambda_1 <= ... <= lambda_d, found by exhaustive
/// enumeration of coefficient vectors. The search radius is the longest vector
/// of an LLL-reduced basis, which is a certified bound on lambda_d because that
/// basis already supplies d independent lattice vectors of at most that length.
inline SuccessiveMinima successive_minima_bruteforce(const LatticeBasis& basis) {
  const std::size_t d = basis.dim();
  if (d > 4) throw Error(Errc::unsupported, "successive minima oracle supports d <= 4 only");
  const Mat b = lll_reduce(basis).basis.matrix();
  Rat radius_sq = 0;
  for (std::size_t i = 0; i < d; ++i) radius_sq = std::max(radius_sq, dot(b.row(i), b.row(i)));

  // x = c·B with |x| <= R gives |c_i| <= R·|column i of B^{-1}|
  const Mat binv = inverse(b);
  IntVec bound(d);
  for (std::size_t i = 0; i < d; ++i) {
    RatVec col = binv.col(i);
    bound[i] = isqrt_floor(floor(radius_sq * dot(col, col)));
  }
  const Int den = common_denominator(b);
  const IntMat bi = to_int(Rat(den) * b);
  const Int limit = floor(radius_sq * den * den);

  std::vector<std::pair<Int, IntVec>> found;  // (|x|^2 scaled, coefficients)
  IntVec c(d);
  for (std::size_t i = 0; i < d; ++i) c[i] = -bound[i];
  while (true) {
    // keep one of each +-pair: first nonzero coefficient positive
    auto nz = std::find_if(c.begin(), c.end(), [](const Int& v) { return v != 0; });
    if (nz != c.end() && *nz > 0) {
      Int norm = 0;
      for (std::size_t k = 0; k < d; ++k) {
        Int xk = 0;
        for (std::size_t i = 0; i < d; ++i) xk += c[i] * bi(i, k);
        norm += xk * xk;
      }
      if (norm <= limit) found.emplace_back(norm, c);
    }
    std::size_t i = 0;
    while (i < d && c[i] == bound[i]) {
      c[i] = -bound[i];
      ++i;
    }
    if (i == d) break;
    ++c[i];
  }
  std::sort(found.begin(), found.end());

  SuccessiveMinima out;
  std::vector<RatVec> rows;
  for (const auto& [norm, coef] : found) {
    RatVec x(d, Rat(0));
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t i = 0; i < d; ++i) x[k] += Rat(coef[i]) * b(i, k);
    rows.push_back(x);
    if (rank(Mat::from_rows(rows)) == rows.size()) {
      out.vectors.push_back(x);
      out.norms_sq.push_back(Rat(norm) / (Rat(den) * Rat(den)));
      if (out.vectors.size() == d) break;
    } else {
      rows.pop_back();
    }
  }
  if (out.vectors.size() != d)
    throw Error(Errc::certification, "successive minima search radius too small");
  return out;
}

}  // namespace gapcover
