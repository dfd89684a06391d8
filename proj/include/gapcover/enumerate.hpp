#pragma once

// Exact lattice point enumeration: the ground truth behind every cardinality
// the pipeline reports.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gapcover/error.hpp"
#include "gapcover/exact.hpp"
#include "gapcover/geometry.hpp"

namespace gapcover {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// Deduplicated integer points of a fixed dimension, kept in descending
/// lexicographic order (the order enum_body scans in).
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  /// Sorts and deduplicates; `removed` reports how many duplicates were dropped.
  static PointSet from_points(std::size_t dim, std::vector<IntVec> pts,
                              std::size_t* removed = nullptr) {
    for (const auto& p : pts)
      if (p.size() != dim) throw Error(Errc::dimension, "point has wrong dimension");
    std::sort(pts.begin(), pts.end(), std::greater<>());
    const std::size_t before = pts.size();
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (removed) *removed = before - pts.size();
    PointSet s(dim);
    s.points_ = std::move(pts);
    return s;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::vector<IntVec>& points() const noexcept { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  bool contains(const IntVec& x) const {
    return std::binary_search(points_.begin(), points_.end(), x, std::greater<>());
  }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.dim_ == b.dim_ && a.points_ == b.points_;
  }

 private:
  friend PointSet enum_body(const ConvexBody&, std::uint64_t);
  std::size_t dim_ = 0;
  std::vector<IntVec> points_;
};

/// Number of integer points in prod [-b_k, b_k].
inline Int box_count(const IntVec& halfwidths) {
  Int n = 1;
  for (const auto& b : halfwidths) n *= 2 * b + 1;
  return n;
}

namespace detail {

/// Lattice points of an ellipsoid, coordinate by coordinate. The projection of
/// {x^T A x <= 1} onto the first j coordinates is the ellipsoid whose form is
/// the inverse of the leading j x j block of A^{-1}; fixing x_1..x_{j-1}
/// leaves an interval for x_j, found exactly from that form. Every visited
/// prefix extends to a point of the body, so the work tracks the output size.
/// `cap` bounds the number of visited prefixes.
inline void enum_ellipsoid(const Ellipsoid& e, std::uint64_t cap, std::vector<IntVec>& out) {
  const std::size_t d = e.dim();
  const Mat& inv = e.inverse_form();
  std::vector<IntMat> form(d);
  std::vector<Int> rhs(d);
  for (std::size_t j = 0; j < d; ++j) {
    Mat lead(j + 1, j + 1);
    for (std::size_t a = 0; a <= j; ++a)
      for (std::size_t b = 0; b <= j; ++b) lead(a, b) = inv(a, b);
    Mat bj = inverse(lead);
    rhs[j] = common_denominator(bj);
    form[j] = to_int(Rat(rhs[j]) * bj);
  }

  std::uint64_t visited = 0;
  IntVec x(d);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    const IntMat& f = form[j];
    // f restricted to (x_1..x_j) is a x_j^2 + 2 b x_j + c
    const Int& a = f(j, j);
    Int b = 0, c = 0;
    for (std::size_t i = 0; i < j; ++i) {
      if (x[i] == 0) continue;
      b += f(j, i) * x[i];
      Int row = 0;
      for (std::size_t l = 0; l < j; ++l) row += f(i, l) * x[l];
      c += x[i] * row;
    }
    auto fits = [&](const Int& t) { return a * t * t + 2 * b * t + c <= rhs[j]; };
    const Int disc = b * b - a * (c - rhs[j]);
    if (disc < 0) return;
    const Int s = isqrt_floor(disc);
    Int hi = floor(Rat(-b + s, a)), lo = ceil(Rat(-b - s, a));
    while (fits(hi + 1)) ++hi;
    while (hi >= lo && !fits(hi)) --hi;
    while (fits(lo - 1)) --lo;
    while (lo <= hi && !fits(lo)) ++lo;
    for (Int t = hi; t >= lo; --t) {
      if (++visited > cap)
        throw Error(Errc::budget, "enumeration visited more than " + std::to_string(cap) + " points");
      x[j] = t;
      if (j + 1 == d) out.push_back(x);
      else rec(j + 1);
    }
    x[j] = 0;
  };
  rec(0);
}

}  // namespace detail

/// All integer points of the body in descending lexicographic order. Ellipsoids
/// are enumerated layer by layer; other bodies by scanning their integer
/// bounding box with an exact membership test.
inline PointSet enum_body(const ConvexBody& body, std::uint64_t cap = kDefaultBudget) {
  const std::size_t d = body.dim();
  PointSet out(d);
  if (const auto* e = std::get_if<Ellipsoid>(&body.rep())) {
    detail::enum_ellipsoid(*e, cap, out.points_);
    return out;
  }
  const IntVec bound = integer_bounding_box(body);
  if (box_count(bound) > Int(std::to_string(cap)))
    throw Error(Errc::budget, "enumeration box holds " + box_count(bound).get_str() +
                                  " points, above the budget of " + std::to_string(cap));
  LatticeMembership inside(body);
  IntVec x(bound);
  while (true) {
    if (inside(x)) out.points_.push_back(x);
    std::size_t k = d;
    while (k-- > 0) {
      if (x[k] != -bound[k]) break;
      x[k] = bound[k];
      if (k == 0) return out;
    }
    --x[k];
  }
}

/// {base + sum m_i w_i : |m_i| <= n_i}, the centrally symmetric form of a GAP.
class Gap {
 public:
  Gap(IntVec base, std::vector<IntVec> diffs, IntVec halfsides)
      : base_(std::move(base)), diffs_(std::move(diffs)), halfsides_(std::move(halfsides)) {
    if (diffs_.size() != halfsides_.size())
      throw Error(Errc::dimension, "gap needs one half-side per difference vector");
    for (const auto& w : diffs_)
      if (w.size() != base_.size()) throw Error(Errc::dimension, "difference vector has wrong dimension");
    for (const auto& n : halfsides_)
      if (n < 0) throw Error(Errc::representation, "gap half-side is negative");
  }

  std::size_t dim() const noexcept { return base_.size(); }
  std::size_t rank() const noexcept { return diffs_.size(); }
  const IntVec& base() const noexcept { return base_; }
  const std::vector<IntVec>& diffs() const noexcept { return diffs_; }
  const IntVec& halfsides() const noexcept { return halfsides_; }

  /// prod (2 n_i + 1): the size of the GAP when it is proper.
  Int listed_count() const { return box_count(halfsides_); }

  bool independent_diffs() const {
    if (diffs_.empty()) return true;
    IntMat w(diffs_.size(), dim());
    for (std::size_t i = 0; i < diffs_.size(); ++i)
      for (std::size_t k = 0; k < dim(); ++k) w(i, k) = diffs_[i][k];
    return gapcover::rank(w) == diffs_.size();
  }

  /// Difference vectors as the columns of a dim x rank matrix.
  IntMat diff_matrix() const {
    IntMat w(dim(), rank());
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t k = 0; k < dim(); ++k) w(k, i) = diffs_[i][k];
    return w;
  }

  /// Same differences, doubled base and half-sides; as a set this is P + P.
  Gap doubled() const {
    IntVec n2 = halfsides_;
    for (auto& n : n2) n *= 2;
    IntVec b2 = base_;
    for (auto& b : b2) b *= 2;
    return Gap(b2, diffs_, n2);
  }

  friend bool operator==(const Gap& a, const Gap& b) {
    return a.base_ == b.base_ && a.diffs_ == b.diffs_ && a.halfsides_ == b.halfsides_;
  }

 private:
  IntVec base_;
  std::vector<IntVec> diffs_;
  IntVec halfsides_;
};

struct GapEnumeration {
  PointSet points;
  bool proper = true;  // no two coefficient vectors gave the same point
};

inline GapEnumeration enum_gap(const Gap& p, std::uint64_t budget = kDefaultBudget) {
  if (p.listed_count() > Int(std::to_string(budget)))
    throw Error(Errc::budget, "gap lists " + p.listed_count().get_str() +
                                  " points, above the budget of " + std::to_string(budget));
  const std::size_t d = p.dim(), r = p.rank();
  std::vector<IntVec> pts;
  pts.reserve(p.listed_count().get_ui());
  IntVec m(r);
  for (std::size_t i = 0; i < r; ++i) m[i] = -p.halfsides()[i];
  while (true) {
    IntVec x = p.base();
    for (std::size_t i = 0; i < r; ++i)
      if (m[i] != 0)
        for (std::size_t k = 0; k < d; ++k) x[k] += m[i] * p.diffs()[i][k];
    pts.push_back(std::move(x));
    std::size_t i = 0;
    while (i < r && m[i] == p.halfsides()[i]) {
      m[i] = -p.halfsides()[i];
      ++i;
    }
    if (i == r) break;
    ++m[i];
  }
  std::size_t removed = 0;
  GapEnumeration out{PointSet::from_points(d, std::move(pts), &removed), true};
  out.proper = removed == 0;
  return out;
}

/// Exact membership in a GAP. With independent differences the coefficients
/// of x - base are unique and found through a rational left inverse; they must
/// be integral and within the half-sides. Dependent differences fall back to
/// explicit enumeration.
class GapMembership {
 public:
  explicit GapMembership(const Gap& p, std::uint64_t budget = kDefaultBudget) : gap_(p) {
    if (p.independent_diffs()) {
      if (p.rank() > 0) {
        Mat w = to_rat(p.diff_matrix());
        Mat wt = w.transpose();
        left_inverse_ = inverse(wt * w) * wt;
      }
    } else {
      listed_ = enum_gap(p, budget).points;
    }
  }

  /// Coefficients m with x = base + W m, if x lies in the lattice coset at all.
  std::optional<IntVec> coefficients(const IntVec& x) const {
    if (listed_) throw Error(Errc::representation, "coefficients need independent differences");
    RatVec off(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) off[k] = x[k] - gap_.base()[k];
    IntVec m;
    if (gap_.rank() > 0) {
      RatVec mr = left_inverse_ * off;
      for (const auto& v : mr) {
        if (v.get_den() != 1) return std::nullopt;
        m.push_back(v.get_num());
      }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
      Int acc = 0;
      for (std::size_t i = 0; i < m.size(); ++i) acc += m[i] * gap_.diffs()[i][k];
      if (Rat(acc) != off[k]) return std::nullopt;
    }
    return m;
  }

  bool operator()(const IntVec& x) const {
    if (listed_) return listed_->contains(x);
    auto m = coefficients(x);
    if (!m) return false;
    for (std::size_t i = 0; i < m->size(); ++i)
      if (abs((*m)[i]) > gap_.halfsides()[i]) return false;
    return true;
  }

 private:
  Gap gap_;
  Mat left_inverse_;
  std::optional<PointSet> listed_;
};

struct SubsetResult {
  bool ok = true;
  std::optional<IntVec> witness;  // first point (in set order) failing the predicate
};

inline SubsetResult subset_check(const PointSet& a,
                                 const std::function<bool(const IntVec&)>& in_b) {
  for (const auto& x : a)
    if (!in_b(x)) return {false, x};
  return {};
}

struct ProjectionCount {
  std::size_t image_count = 0;
  std::size_t max_fiber = 0;
};

/// #phi(s) and the largest fiber #(phi^{-1}(t) ∩ s).
inline ProjectionCount project_count(const PointSet& s, const IntVec& phi) {
  if (phi.size() != s.dim()) throw Error(Errc::dimension, "functional has wrong dimension");
  std::map<Int, std::size_t> fibers;
  for (const auto& x : s) ++fibers[dot(phi, x)];
  ProjectionCount out;
  out.image_count = fibers.size();
  for (const auto& [value, count] : fibers) out.max_fiber = std::max(out.max_fiber, count);
  return out;
}

namespace detail {

// Mixed-radix key of x - lo with digit i in [0, range_i). Keys of A and B add
// to the key of the sum, since no digit can carry.
struct RadixCode {
  std::vector<std::int64_t> lo, weight;
};

inline std::optional<RadixCode> radix_code(const PointSet& a, const PointSet& b) {
  const std::size_t d = a.dim();
  IntVec lo_a = a.points().front(), hi_a = lo_a, lo_b = b.points().front(), hi_b = lo_b;
  for (const auto& x : a)
    for (std::size_t k = 0; k < d; ++k) {
      lo_a[k] = std::min(lo_a[k], x[k]);
      hi_a[k] = std::max(hi_a[k], x[k]);
    }
  for (const auto& x : b)
    for (std::size_t k = 0; k < d; ++k) {
      lo_b[k] = std::min(lo_b[k], x[k]);
      hi_b[k] = std::max(hi_b[k], x[k]);
    }
  RadixCode code;
  Int w = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (!lo_a[k].fits_slong_p() || !lo_b[k].fits_slong_p()) return std::nullopt;
    code.lo.push_back(lo_a[k].get_si());
    code.lo.push_back(lo_b[k].get_si());
    code.weight.push_back(w.get_si());
    w *= hi_a[k] - lo_a[k] + hi_b[k] - lo_b[k] + 1;
    if (w > Int(1) << 62) return std::nullopt;
  }
  return code;
}

}  // namespace detail

/// {a + b : a in A, b in B}.
inline PointSet sumset(const PointSet& a, const PointSet& b, std::uint64_t budget = kDefaultBudget) {
  if (a.dim() != b.dim()) throw Error(Errc::dimension, "sumset of different dimensions");
  if (Int(a.size()) * Int(b.size()) > Int(std::to_string(budget)))
    throw Error(Errc::budget, "sumset pair count above budget");
  const std::size_t d = a.dim();
  if (a.empty() || b.empty()) return PointSet(d);

  if (auto code = detail::radix_code(a, b)) {
    auto encode = [&](const PointSet& s, std::size_t side) {
      std::vector<std::int64_t> keys;
      keys.reserve(s.size());
      for (const auto& x : s) {
        std::int64_t key = 0;
        for (std::size_t k = 0; k < d; ++k)
          key += (x[k].get_si() - code->lo[2 * k + side]) * code->weight[k];
        keys.push_back(key);
      }
      return keys;
    };
    const auto ka = encode(a, 0), kb = encode(b, 1);
    std::vector<std::int64_t> sums;
    sums.reserve(ka.size() * kb.size());
    for (auto x : ka)
      for (auto y : kb) sums.push_back(x + y);
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
    std::vector<IntVec> pts;
    pts.reserve(sums.size());
    for (auto key : sums) {
      IntVec z(d);
      for (std::size_t k = d; k-- > 0;) {
        z[k] = key / code->weight[k] + code->lo[2 * k] + code->lo[2 * k + 1];
        key %= code->weight[k];
      }
      pts.push_back(std::move(z));
    }
    return PointSet::from_points(d, std::move(pts));
  }

  std::vector<IntVec> pts;
  pts.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) {
      IntVec z = x;
      for (std::size_t k = 0; k < z.size(); ++k) z[k] += y[k];
      pts.push_back(std::move(z));
    }
  return PointSet::from_points(d, std::move(pts));
}

}  // namespace gapcover
