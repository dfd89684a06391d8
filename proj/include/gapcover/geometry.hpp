#pragma once

// Centrally symmetric convex bodies, the enclosing ellipsoid, and the
// parallelotope circumscribing it. Floating point appears only inside mvee()
// and circumscribe_parallelotope(); everything they return is re-certified in
// exact arithmetic before it leaves this header.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "gapcover/error.hpp"
#include "gapcover/exact.hpp"

namespace gapcover {

/// {x : x^T A x <= 1} for a symmetric positive-definite rational A.
class Ellipsoid {
 public:
  explicit Ellipsoid(Mat form) : form_(std::move(form)) {
    if (!form_.square() || form_.rows() == 0)
      throw Error(Errc::dimension, "ellipsoid form must be square and nonempty");
    for (std::size_t i = 0; i < form_.rows(); ++i)
      for (std::size_t j = i + 1; j < form_.cols(); ++j)
        if (form_(i, j) != form_(j, i))
          throw Error(Errc::representation, "ellipsoid form is not symmetric");
    for (std::size_t k = 1; k <= form_.rows(); ++k) {
      Mat lead(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) lead(i, j) = form_(i, j);
      if (det(lead) <= 0)
        throw Error(Errc::representation, "ellipsoid form is not positive definite");
    }
    inverse_ = inverse(form_);
  }

  std::size_t dim() const noexcept { return form_.rows(); }
  const Mat& form() const noexcept { return form_; }

  Rat quadratic(const RatVec& x) const {
    Rat s = 0;
    for (std::size_t i = 0; i < dim(); ++i) {
      Rat row = 0;
      for (std::size_t j = 0; j < dim(); ++j) row += form_(i, j) * x[j];
      s += x[i] * row;
    }
    return s;
  }

  bool contains(const RatVec& x) const { return quadratic(x) <= 1; }

  /// Squared support function c^T A^{-1} c, i.e. (max over E of c.x)^2.
  Rat support_sq(const RatVec& c) const {
    const Mat& inv = inverse_;
    Rat s = 0;
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) s += c[i] * inv(i, j) * c[j];
    return s;
  }

  const Mat& inverse_form() const noexcept { return inverse_; }

 private:
  Mat form_;
  Mat inverse_;
};

/// Convex hull of the listed points and their negatives.
struct VertexRep {
  std::vector<RatVec> points;
};

/// Axis box prod [-h_i, h_i].
struct BoxRep {
  RatVec halfwidths;
};

class ConvexBody {
 public:
  using Rep = std::variant<VertexRep, Ellipsoid, BoxRep>;

  static ConvexBody vertices(std::size_t dim, std::vector<RatVec> points) {
    if (dim == 0) throw Error(Errc::dimension, "body dimension must be positive");
    if (points.empty()) throw Error(Errc::representation, "vertex list is empty");
    for (const auto& p : points)
      if (p.size() != dim) throw Error(Errc::dimension, "vertex has wrong dimension");
    return ConvexBody(dim, VertexRep{std::move(points)});
  }
  static ConvexBody ellipsoid(Ellipsoid e) {
    std::size_t d = e.dim();
    return ConvexBody(d, std::move(e));
  }
  static ConvexBody box(RatVec halfwidths) {
    if (halfwidths.empty()) throw Error(Errc::dimension, "body dimension must be positive");
    for (const auto& h : halfwidths)
      if (h < 0) throw Error(Errc::representation, "box half-width is negative");
    std::size_t d = halfwidths.size();
    return ConvexBody(d, BoxRep{std::move(halfwidths)});
  }
  static ConvexBody ball(std::size_t dim, const Rat& radius) {
    if (radius <= 0) throw Error(Errc::representation, "ball radius must be positive");
    return ellipsoid(Ellipsoid(Rat(1) / (radius * radius) * Mat::identity(dim)));
  }

  std::size_t dim() const noexcept { return dim_; }
  const Rep& rep() const noexcept { return rep_; }

  bool is_vertices() const { return std::holds_alternative<VertexRep>(rep_); }
  bool is_ellipsoid() const { return std::holds_alternative<Ellipsoid>(rep_); }
  bool is_box() const { return std::holds_alternative<BoxRep>(rep_); }

 private:
  ConvexBody(std::size_t dim, Rep rep) : dim_(dim), rep_(std::move(rep)) {}
  std::size_t dim_;
  Rep rep_;
};

/// {sum l_i u_i : l_i in [-1, 1]} for linearly independent generators u_i.
class Parallelotope {
 public:
  explicit Parallelotope(std::vector<RatVec> gens) : gens_(std::move(gens)) {
    const std::size_t d = gens_.size();
    if (d == 0) throw Error(Errc::dimension, "parallelotope needs generators");
    for (const auto& g : gens_)
      if (g.size() != d) throw Error(Errc::dimension, "generator has wrong dimension");
    if (det(generator_matrix()) == 0)
      throw Error(Errc::rank, "parallelotope generators are linearly dependent");
  }

  std::size_t dim() const noexcept { return gens_.size(); }
  const std::vector<RatVec>& generators() const noexcept { return gens_; }

  /// Columns are the generators; rows are the coordinate vectors.
  Mat generator_matrix() const {
    const std::size_t d = gens_.size();
    Mat u(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) u(j, i) = gens_[i][j];
    return u;
  }

 private:
  std::vector<RatVec> gens_;
};

// ---------------------------------------------------------------------------
// Exact linear programming

/// Is there y >= 0 with A·y = b? Phase-one simplex over the rationals with
/// Bland's rule, so it terminates and never rounds.
inline bool lp_feasible(const Mat& a, const RatVec& b) {
  const std::size_t m = a.rows(), n = a.cols();
  if (b.size() != m) throw Error(Errc::dimension, "lp right-hand side size mismatch");
  const std::size_t width = n + m + 1;  // originals, artificials, rhs
  Mat t(m + 1, width);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t(i, j) = flip ? Rat(-a(i, j)) : a(i, j);
    t(i, n + i) = 1;
    t(i, width - 1) = flip ? Rat(-b[i]) : b[i];
    basis[i] = n + i;
  }
  // reduced costs of the phase-one objective (sum of artificials)
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= n && j < n + m) continue;
    Rat s = 0;
    for (std::size_t i = 0; i < m; ++i) s -= t(i, j);
    t(m, j) = s;
  }
  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j)
      if (t(m, j) < 0) {
        enter = j;
        break;
      }
    if (enter == width) break;
    std::size_t leave = m;
    Rat best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t(i, enter) <= 0) continue;
      Rat ratio = t(i, width - 1) / t(i, enter);
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen in phase one
    Rat piv = t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t(i, enter) == 0) continue;
      Rat f = t(i, enter);
      for (std::size_t j = 0; j < width; ++j) t(i, j) -= f * t(leave, j);
    }
    basis[leave] = enter;
  }
  return t(m, width - 1) == 0;
}

/// x in conv(+-points): exists lambda with sum |lambda_i| <= 1 and
/// sum lambda_i p_i = x.
inline bool hull_contains(const std::vector<RatVec>& points, const RatVec& x) {
  const std::size_t d = x.size(), n = points.size();
  Mat a(d + 1, 2 * n + 1);
  RatVec b(d + 1);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      a(k, i) = points[i][k];
      a(k, n + i) = -points[i][k];
    }
    b[k] = x[k];
  }
  for (std::size_t j = 0; j < 2 * n + 1; ++j) a(d, j) = 1;
  b[d] = 1;
  return lp_feasible(a, b);
}

// ---------------------------------------------------------------------------
// Membership

inline bool contains_point(const ConvexBody& body, const RatVec& x) {
  if (x.size() != body.dim()) throw Error(Errc::dimension, "point dimension mismatch");
  return std::visit(
      [&](const auto& rep) -> bool {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, VertexRep>) {
          return hull_contains(rep.points, x);
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return rep.contains(x);
        } else {
          for (std::size_t i = 0; i < x.size(); ++i)
            if (abs(x[i]) > rep.halfwidths[i]) return false;
          return true;
        }
      },
      body.rep());
}

/// Coefficients l with U·l = x, where U has the generators as columns.
inline RatVec parallelotope_coordinates(const Parallelotope& q, const RatVec& x) {
  if (x.size() != q.dim()) throw Error(Errc::dimension, "point dimension mismatch");
  return solve(q.generator_matrix(), x);
}

inline bool parallelotope_contains(const Parallelotope& q, const RatVec& x) {
  auto l = parallelotope_coordinates(q, x);
  return std::all_of(l.begin(), l.end(), [](const Rat& v) { return abs(v) <= 1; });
}

/// 2^d |det(generators)|.
inline Rat volume(const Parallelotope& q) {
  Rat v = abs(det(q.generator_matrix()));
  for (std::size_t i = 0; i < q.dim(); ++i) v *= 2;
  return v;
}

/// Points whose symmetric hull is the body (box corners for a box).
inline std::vector<RatVec> hull_points(const ConvexBody& body) {
  if (const auto* v = std::get_if<VertexRep>(&body.rep())) return v->points;
  if (const auto* b = std::get_if<BoxRep>(&body.rep())) {
    const std::size_t d = body.dim();
    std::vector<RatVec> corners;
    // one representative per +- pair: first coordinate positive
    for (std::size_t mask = 0; mask < (std::size_t(1) << (d - 1)); ++mask) {
      RatVec c(d);
      c[0] = b->halfwidths[0];
      for (std::size_t k = 1; k < d; ++k)
        c[k] = (mask >> (k - 1)) & 1 ? Rat(-b->halfwidths[k]) : b->halfwidths[k];
      corners.push_back(std::move(c));
    }
    return corners;
  }
  throw Error(Errc::representation, "ellipsoid body has no vertex list");
}

/// Largest integer |x_k| any point of the body can have, per coordinate.
inline IntVec integer_bounding_box(const ConvexBody& body) {
  const std::size_t d = body.dim();
  IntVec out(d, Int(0));
  if (const auto* v = std::get_if<VertexRep>(&body.rep())) {
    for (const auto& p : v->points)
      for (std::size_t k = 0; k < d; ++k) out[k] = std::max(out[k], floor(abs(p[k])));
  } else if (const auto* e = std::get_if<Ellipsoid>(&body.rep())) {
    const Mat& inv = e->inverse_form();
    for (std::size_t k = 0; k < d; ++k) out[k] = isqrt_floor(floor(inv(k, k)));
  } else {
    const auto& b = std::get<BoxRep>(body.rep());
    for (std::size_t k = 0; k < d; ++k) out[k] = floor(b.halfwidths[k]);
  }
  return out;
}

/// Membership test for integer points, compiled once per body. Vertex bodies
/// are converted to their facet inequalities when the hull is full-dimensional
/// and the candidate count is small; otherwise each query runs the exact LP.
class LatticeMembership {
 public:
  explicit LatticeMembership(const ConvexBody& body, std::size_t max_facet_candidates = 200000)
      : body_(body) {
    if (const auto* e = std::get_if<Ellipsoid>(&body.rep())) {
      denom_ = common_denominator(e->form());
      form_ = to_int(Rat(denom_) * e->form());
    } else if (const auto* v = std::get_if<VertexRep>(&body.rep())) {
      compile_facets(*v, max_facet_candidates);
    } else {
      box_ = IntVec();
      for (const auto& h : std::get<BoxRep>(body.rep()).halfwidths) box_->push_back(floor(h));
    }
  }

  bool operator()(const IntVec& x) const {
    if (box_) {
      for (std::size_t k = 0; k < x.size(); ++k)
        if (abs(x[k]) > (*box_)[k]) return false;
      return true;
    }
    if (form_.rows() > 0) {
      Int s = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        Int row = 0;
        for (std::size_t j = 0; j < x.size(); ++j) row += form_(i, j) * x[j];
        s += x[i] * row;
      }
      return s <= denom_;
    }
    if (facets_) {
      for (const auto& [normal, rhs] : *facets_)
        if (dot(normal, x) > rhs) return false;
      return true;
    }
    return hull_contains(std::get<VertexRep>(body_.rep()).points, to_rat(x));
  }

  bool uses_facets() const noexcept { return facets_.has_value(); }
  std::size_t facet_count() const noexcept { return facets_ ? facets_->size() : 0; }

 private:
  void compile_facets(const VertexRep& v, std::size_t max_candidates) {
    const std::size_t d = body_.dim();
    std::vector<RatVec> pts;
    {
      std::set<RatVec> seen;
      for (const auto& p : v.points) {
        if (std::all_of(p.begin(), p.end(), [](const Rat& r) { return r == 0; })) continue;
        RatVec n = p;
        for (auto& c : n) c = -c;
        if (seen.insert(p).second) pts.push_back(p);
        if (seen.insert(n).second) pts.push_back(n);
      }
    }
    if (pts.size() < d) return;
    {
      Mat all(pts.size(), d);
      for (std::size_t i = 0; i < pts.size(); ++i) all.set_row(i, pts[i]);
      if (rank(all) < d) return;
    }
    // binomial(pts, d) with early exit once it passes the cap
    double combos = 1;
    for (std::size_t i = 0; i < d; ++i) combos = combos * double(pts.size() - i) / double(i + 1);
    if (combos > double(max_candidates)) return;

    std::set<RatVec> normals;
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    const RatVec ones(d, Rat(1));
    while (true) {
      Mat sub(d, d);
      for (std::size_t i = 0; i < d; ++i) sub.set_row(i, pts[idx[i]]);
      if (det(sub) != 0) {
        RatVec a = solve(sub, ones);
        bool supporting = std::all_of(pts.begin(), pts.end(),
                                      [&](const RatVec& p) { return dot(a, p) <= 1; });
        if (supporting) normals.insert(a);
      }
      std::size_t k = d;
      while (k > 0 && idx[k - 1] == k - 1 + pts.size() - d) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    facets_.emplace();
    for (const auto& a : normals) {
      Int den = 1;
      for (const auto& c : a) den = lcm(den, c.get_den());
      IntVec normal;
      for (const auto& c : a) normal.push_back(Rat(c * den).get_num());
      facets_->emplace_back(std::move(normal), den);
    }
  }

  ConvexBody body_;
  Int denom_ = 1;
  IntMat form_;
  std::optional<IntVec> box_;
  std::optional<std::vector<std::pair<IntVec, Int>>> facets_;
};

// ---------------------------------------------------------------------------
// Minimum-volume enclosing ellipsoid

struct MveeResult {
  Ellipsoid ellipsoid;
  std::size_t iterations = 0;
  double final_excess = 0;  // max_i g_i / d - 1 at exit, floating diagnostic
};

/// Khachiyan's barycentric coordinate ascent for the origin-centred minimum
/// volume ellipsoid of +-points, followed by exact rationalisation and a
/// post-inflation so that every point satisfies x^T A x <= 1 exactly.
inline MveeResult mvee_solve(const std::vector<RatVec>& points, const Rat& eps,
                             std::size_t max_iterations = 100000) {
  if (points.empty()) throw Error(Errc::rank, "mvee: no points");
  if (eps <= 0 || eps >= 1) throw Error(Errc::dimension, "mvee: eps must lie in (0, 1)");
  const std::size_t d = points.front().size(), n = points.size();
  {
    Mat all(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      if (points[i].size() != d) throw Error(Errc::dimension, "mvee: ragged point list");
      all.set_row(i, points[i]);
    }
    if (rank(all) < d) throw Error(Errc::rank, "mvee: points are not full-dimensional");
  }

  if (d == 1) {
    Rat m = 0;
    for (const auto& p : points) m = std::max(m, Rat(p[0] * p[0]));
    return {Ellipsoid(Mat{{1 / m}}), 0, 0.0};
  }

  Eigen::MatrixXd p(d, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) p(k, i) = points[i][k].get_d();
  const double tol = double(d) * (1.0 + eps.get_d());
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  Eigen::MatrixXd m_inv;
  Eigen::VectorXd g(n);
  std::size_t it = 0;
  double gmax = 0;
  for (;; ++it) {
    Eigen::MatrixXd m = p * u.asDiagonal() * p.transpose();
    m_inv = m.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
    g = (p.transpose() * m_inv * p).diagonal();
    Eigen::Index j;
    gmax = g.maxCoeff(&j);
    if (gmax <= tol) break;
    if (it >= max_iterations) throw Error(Errc::convergence, "mvee: iteration cap reached");
    const double step = (gmax - double(d)) / (double(d) * (gmax - 1.0));
    u *= (1.0 - step);
    u(j) += step;
  }
  Eigen::MatrixXd af = m_inv / gmax;

  Mat a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = i; k < d; ++k) a(i, k) = a(k, i) = rationalize(af(i, k));
  Rat worst = 0;
  for (const auto& pt : points) {
    Rat q = 0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) q += pt[i] * a(i, k) * pt[k];
    worst = std::max(worst, q);
  }
  if (worst > 1) {
    Int scale = Int(1) << 40;
    Rat up(ceil(worst * scale), scale);
    up.canonicalize();
    a = (1 / up) * a;
  }
  try {
    return {Ellipsoid(std::move(a)), it, gmax / double(d) - 1.0};
  } catch (const Error&) {
    throw Error(Errc::convergence, "mvee: rationalised form is not positive definite");
  }
}

inline Ellipsoid mvee(const std::vector<RatVec>& points, const Rat& eps) {
  return mvee_solve(points, eps).ellipsoid;
}

// ---------------------------------------------------------------------------
// Circumscribed parallelotope

/// Exact check that inflation·E is inside Q: every facet slab of Q is at least
/// as wide as the support function of inflation·E in its normal direction,
/// and the scaled axis endpoints along each generator direction lie in Q.
inline bool certify_circumscribed(const Parallelotope& q, const Ellipsoid& e,
                                  const Rat& inflation) {
  if (q.dim() != e.dim()) throw Error(Errc::dimension, "parallelotope/ellipsoid dimension mismatch");
  Mat w_inv = inverse(q.generator_matrix());
  const Rat s2 = inflation * inflation;
  for (std::size_t i = 0; i < q.dim(); ++i)
    if (s2 * e.support_sq(w_inv.row(i)) > 1) return false;
  // Endpoint check: the point of inflation·E farthest along each generator
  // direction, rounded inward, must be in Q. This is implied by the slab test
  // and guards the slab computation itself.
  for (const auto& g : q.generators()) {
    Rat qg = e.quadratic(g);
    Rat t = sqrt_lower(s2 / qg);  // t·g on or inside the boundary of inflation·E
    RatVec x = g;
    for (auto& c : x) c *= t;
    if (!parallelotope_contains(q, x)) return false;
  }
  return true;
}

/// Q with generators along the principal axes of E, each slab tightened to the
/// support function of inflation·E, so that Q contains inflation·E exactly.
inline Parallelotope circumscribe_parallelotope(const Ellipsoid& e, const Rat& inflation) {
  if (inflation < 1) throw Error(Errc::dimension, "inflation must be at least 1");
  const std::size_t d = e.dim();
  Eigen::MatrixXd af(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) af(i, j) = e.form()(i, j).get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(af);
  if (eig.info() != Eigen::Success)
    throw Error(Errc::certification, "eigen-decomposition failed");

  const double s = inflation.get_d();
  std::vector<RatVec> gens(d, RatVec(d));
  for (std::size_t i = 0; i < d; ++i) {
    const double lambda = eig.eigenvalues()(Eigen::Index(i));
    if (!(lambda > 0)) throw Error(Errc::certification, "non-positive eigenvalue");
    const double r = s / std::sqrt(lambda);
    for (std::size_t k = 0; k < d; ++k) {
      double c = eig.eigenvectors()(Eigen::Index(k), Eigen::Index(i));
      if (std::abs(c) < 1e-15) c = 0;
      gens[i][k] = rationalize(r * c);
    }
  }
  Mat w(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) w(k, i) = gens[i][k];
  if (det(w) == 0) throw Error(Errc::certification, "rationalised eigenvectors are dependent");

  // Scaling generator i by t only scales row i of W^{-1} by 1/t, so each slab
  // is fixed independently: choose t_i >= s·h_E(row_i).
  Mat w_inv = inverse(w);
  const Rat s2 = inflation * inflation;
  for (std::size_t i = 0; i < d; ++i) {
    Rat need = s2 * e.support_sq(w_inv.row(i));
    Rat t = sqrt_upper(need, 32);
    for (auto& c : gens[i]) c *= t;
  }
  Parallelotope q(std::move(gens));
  if (!certify_circumscribed(q, e, inflation))
    throw Error(Errc::certification, "parallelotope does not contain the ellipsoid");
  return q;
}

}  // namespace gapcover
