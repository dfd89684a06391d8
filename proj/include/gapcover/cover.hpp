#pragma once

// Covering the lattice points of a symmetric convex body by a GAP, with every
// step certified in exact arithmetic:
//
//   C = K ∩ Z^d  ⊂  Q ∩ Z^d  =  T^{-1}(TQ) ∩ Z^d  ⊂  T^{-1}(B ∩ Z^d)  =: P
//
// Q is a parallelotope around the outer ellipsoid of K, T a unimodular matrix
// that LLL-reduces the coordinate rows of Q's generator matrix, and B the
// axis box around TQ.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapcover/enumerate.hpp"
#include "gapcover/error.hpp"
#include "gapcover/exact.hpp"
#include "gapcover/geometry.hpp"
#include "gapcover/lattice.hpp"

namespace gapcover {

// Constants of the ratio bounds (see README for the measured values and why
// these are safe). k is the dimension of span(C).
//   #P / #C  <= c1 · k^{3k}
//   |Q|      <= (c3 · k)^k · #C            (#C stands in for |K|)
//   |B|      <= (c2 · k)^{2k} · |TQ|
//   #P       <= 2^k · |B|
// c1 cannot be below 1: a one-dimensional C is its own cover.
inline Rat constant_c1() { return Rat(1); }
inline Rat constant_c2() { return Rat(1); }
inline Rat constant_c3() { return Rat(2); }

inline Rat pow_rat(const Rat& base, std::size_t e) {
  Rat r(1);
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

/// c1 · k^{3k}, with k = 0 treated as 1.
inline Rat ratio_bound(std::size_t k) {
  const std::size_t kk = std::max<std::size_t>(k, 1);
  return constant_c1() * pow_rat(Rat(kk), 3 * kk);
}

// ---------------------------------------------------------------------------
// Passing to span(C)

struct SubspaceReduction {
  std::size_t k = 0;                 // dim span(C)
  IntMat embed;                      // d x k, columns a basis of Z^d ∩ span(C)
  std::optional<ConvexBody> body;    // body in Z^k coordinates; absent when k = 0
  bool identity = false;
  PointSet points;                   // C itself, ambient coordinates
};

/// Z^d ∩ span(C) from the HNF of C's points. A full-dimensional C keeps the
/// original body; otherwise the restricted body is conv(±C) pulled back to
/// Z^k, whose lattice points are exactly the preimages of C.
inline SubspaceReduction restrict_to_span(const ConvexBody& body,
                                          std::uint64_t budget = kDefaultBudget) {
  const std::size_t d = body.dim();
  SubspaceReduction out;
  out.points = enum_body(body, budget);
  std::vector<IntVec> nonzero;
  for (const auto& x : out.points)
    if (std::any_of(x.begin(), x.end(), [](const Int& c) { return c != 0; })) nonzero.push_back(x);
  if (nonzero.empty()) {
    out.embed = IntMat(d, 0);
    return out;
  }
  IntMat rows(nonzero.size(), d);
  for (std::size_t i = 0; i < nonzero.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) rows(i, j) = nonzero[i][j];
  out.k = rank(rows);
  if (out.k == d) {
    out.embed = IntMat::identity(d);
    out.body = body;
    out.identity = true;
    return out;
  }

  IntMat basis = saturated_basis(rows);  // k x d
  for (std::size_t i = 0; i < basis.rows(); ++i) {
    std::size_t j = 0;
    while (basis(i, j) == 0) ++j;
    if (basis(i, j) < 0)
      for (std::size_t c = 0; c < d; ++c) basis(i, c) = -basis(i, c);
  }
  out.embed = basis.transpose();

  // y = (S S^T)^{-1} S x, integral because the rows of S are saturated
  Mat s = to_rat(basis);
  Mat left = inverse(s * s.transpose()) * s;
  std::vector<RatVec> pre;
  for (const auto& x : nonzero) {
    if (x < IntVec(d, Int(0))) continue;  // the body is symmetric; keep one of each pair
    RatVec y = left * to_rat(x);
    for (const auto& c : y)
      if (c.get_den() != 1) throw Error(Errc::certification, "span basis is not saturated");
    pre.push_back(std::move(y));
  }
  out.body = ConvexBody::vertices(out.k, std::move(pre));
  return out;
}

// ---------------------------------------------------------------------------
// The pipeline

struct StageDiagnostics {
  Rat eps;
  Rat volume_Q;        // |Q| = 2^k |det U|
  Rat volume_TQ;       // |TQ|, equal to |Q|
  Rat volume_B;        // 2^k prod a_j
  Rat reduction_ratio_sq;
  Rat reduction_ratio;  // upper bound of the square root
  RatVec a;             // box half-widths a_j = |v^j|_1
  IntVec halfsides;     // floor(a_j)
  bool a_below_one = false;
  bool chain_Q = false;  // |Q| <= (c3 k)^k #C
  bool chain_B = false;  // |B| <= (c2 k)^{2k} |TQ|
  bool chain_P = false;  // #P <= 2^k |B|
  std::size_t mvee_iterations = 0;
  double mvee_excess = 0;
};

struct StageTimes {
  double restrict_ms = 0, ellipsoid_ms = 0, reduce_ms = 0, box_ms = 0, certify_ms = 0;
};

struct CoverReport {
  std::size_t dim = 0;
  std::size_t intrinsic_dim = 0;
  Int card_C = 0;
  Int card_P = 0;
  Rat ratio;
  Rat bound_value;
  bool contained = false;
  bool proper = true;
  std::optional<IntVec> witness;
  std::optional<StageDiagnostics> stages;
  StageTimes times;
};

/// Exact intermediate objects, kept so every step can be re-checked.
struct CoverCertificate {
  IntMat embed;  // d x k
  Mat u;         // generators of Q as columns
  Mat v;         // T·U
  IntMat t;
  IntMat t_inv;
  IntVec halfsides;
};

/// p ∈ P iff p = E y for an integral y with |(T y)_j| <= n_j.
class CoverMembership {
 public:
  explicit CoverMembership(const CoverCertificate& c)
      : embed_(c.embed), t_(c.t), n_(c.halfsides) {
    if (embed_.cols() > 0) {
      Mat e = to_rat(embed_);
      Mat et = e.transpose();
      left_ = inverse(et * e) * et;
    }
  }

  bool operator()(const IntVec& x) const {
    const std::size_t k = embed_.cols();
    IntVec y(k);
    if (k > 0) {
      RatVec yr = left_ * to_rat(x);
      for (std::size_t i = 0; i < k; ++i) {
        if (yr[i].get_den() != 1) return false;
        y[i] = yr[i].get_num();
      }
    }
    for (std::size_t r = 0; r < x.size(); ++r) {
      Int acc = 0;
      for (std::size_t i = 0; i < k; ++i) acc += embed_(r, i) * y[i];
      if (acc != x[r]) return false;
    }
    for (std::size_t j = 0; j < k; ++j) {
      Int m = 0;
      for (std::size_t i = 0; i < k; ++i) m += t_(j, i) * y[i];
      if (abs(m) > n_[j]) return false;
    }
    return true;
  }

 private:
  IntMat embed_;
  IntMat t_;
  IntVec n_;
  Mat left_;
};

struct CoverResult {
  Gap gap;
  CoverReport report;
  CoverCertificate cert;
};

namespace detail {

class StageClock {
 public:
  StageClock() : start_(std::chrono::steady_clock::now()) {}
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

template <class F>
auto run_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(name);
  }
}

}  // namespace detail

inline CoverResult cover(const ConvexBody& body, const Rat& eps = Rat(1, 100),
                         std::uint64_t budget = kDefaultBudget) {
  const std::size_t d = body.dim();
  detail::StageClock clock;
  CoverReport rep;
  rep.dim = d;

  SubspaceReduction sub = detail::run_stage("restrict", [&] { return restrict_to_span(body, budget); });
  const std::size_t k = sub.k;
  rep.intrinsic_dim = k;
  rep.card_C = Int(sub.points.size());
  rep.bound_value = ratio_bound(k);
  rep.times.restrict_ms = clock.lap();

  if (k == 0) {
    Gap gap(IntVec(d, Int(0)), {}, {});
    rep.card_P = 1;
    rep.ratio = Rat(rep.card_P) / Rat(rep.card_C);
    rep.contained = sub.points.size() == 1 && gap.listed_count() == 1;
    CoverCertificate cert{IntMat(d, 0), Mat(0, 0), Mat(0, 0), IntMat(0, 0), IntMat(0, 0), {}};
    return {std::move(gap), std::move(rep), std::move(cert)};
  }

  StageDiagnostics st;
  st.eps = eps;

  // (1) outer ellipsoid and a parallelotope around it
  const ConvexBody& kbody = *sub.body;
  Parallelotope q = detail::run_stage("ellipsoid", [&] {
    if (const auto* e = std::get_if<Ellipsoid>(&kbody.rep())) return circumscribe_parallelotope(*e, Rat(1));
    MveeResult m = mvee_solve(hull_points(kbody), eps);
    st.mvee_iterations = m.iterations;
    st.mvee_excess = m.final_excess;
    return circumscribe_parallelotope(m.ellipsoid, Rat(1));
  });
  const Mat u = q.generator_matrix();
  st.volume_Q = volume(q);
  rep.times.ellipsoid_ms = clock.lap();

  // (2)+(3) reduce the coordinate rows u^j of U; T·U = V
  Mat v(k, k);
  IntMat t(k, k);
  detail::run_stage("reduce", [&] {
    LllResult r = lll_reduce(LatticeBasis(u));
    v = r.basis.matrix();
    t = r.transform.matrix();
    UnimodularMat solved = unimodular_solve(u, v);
    if (solved.matrix() != t)
      throw Error(Errc::certification, "reduction transform disagrees with the solved transform");
    if (to_rat(t) * u != v) throw Error(Errc::certification, "T·U != V");
    Int dt = det(t);
    if (dt != 1 && dt != -1) throw Error(Errc::certification, "det T is not +-1");
    ReductionCert rc = certify_reduction(r.basis);
    st.reduction_ratio_sq = rc.ratio_sq;
    st.reduction_ratio = rc.ratio;
    return 0;
  });
  st.volume_TQ = pow_rat(Rat(2), k) * abs(det(v));
  if (st.volume_TQ != st.volume_Q)
    throw Error(Errc::certification, "|TQ| != |Q|", "reduce");
  rep.times.reduce_ms = clock.lap();

  // (4) the box B = prod [-a_j, a_j] around TQ, a_j = |v^j|_1
  st.a.resize(k);
  st.halfsides.resize(k);
  st.volume_B = pow_rat(Rat(2), k);
  for (std::size_t j = 0; j < k; ++j) {
    Rat a = 0;
    for (std::size_t i = 0; i < k; ++i) a += abs(v(j, i));
    st.a[j] = a;
    st.halfsides[j] = floor(a);
    st.volume_B *= a;
    if (a < 1) st.a_below_one = true;
  }

  // (5) P = T^{-1}(B ∩ Z^k), pushed forward by the embedding
  IntMat t_inv = to_int(inverse(to_rat(t)));
  IntMat diffs_ambient = sub.embed * t_inv;  // d x k, columns are the differences
  std::vector<IntVec> diffs(k, IntVec(d));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < d; ++r) diffs[i][r] = diffs_ambient(r, i);
  Gap gap(IntVec(d, Int(0)), std::move(diffs), st.halfsides);
  rep.card_P = gap.listed_count();
  rep.ratio = Rat(rep.card_P) / Rat(rep.card_C);
  rep.times.box_ms = clock.lap();

  const Rat kk(static_cast<unsigned long>(k));
  st.chain_Q = st.volume_Q <= pow_rat(constant_c3() * kk, k) * Rat(rep.card_C);
  st.chain_B = st.volume_B <= pow_rat(constant_c2() * kk, 2 * k) * st.volume_TQ;
  st.chain_P = Rat(rep.card_P) <= pow_rat(Rat(2), k) * st.volume_B;

  CoverCertificate cert{sub.embed, u, v, t, t_inv, st.halfsides};
  detail::run_stage("certify", [&] {
    CoverMembership in(cert);
    SubsetResult s = subset_check(sub.points, [&](const IntVec& x) { return in(x); });
    rep.contained = s.ok;
    rep.witness = s.witness;
    return 0;
  });
  rep.times.certify_ms = clock.lap();
  rep.stages = std::move(st);
  return {std::move(gap), std::move(rep), std::move(cert)};
}

// ---------------------------------------------------------------------------
// Independent re-verification

/// Enumerates C afresh and tests each point against P. #P is the listed count
/// when the differences are independent (P is then proper) and the size of
/// the explicit listing otherwise.
inline CoverReport verify_cover(const ConvexBody& body, const Gap& p,
                                std::uint64_t budget = kDefaultBudget) {
  if (p.dim() != body.dim()) throw Error(Errc::dimension, "gap and body dimensions differ");
  CoverReport rep;
  rep.dim = body.dim();
  PointSet c = enum_body(body, budget);
  rep.card_C = Int(c.size());
  {
    std::vector<IntVec> pts(c.begin(), c.end());
    IntMat rows(pts.size(), body.dim());
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < body.dim(); ++j) rows(i, j) = pts[i][j];
    rep.intrinsic_dim = rank(rows);
  }
  rep.bound_value = ratio_bound(rep.intrinsic_dim);
  GapMembership in(p, budget);
  SubsetResult s = subset_check(c, [&](const IntVec& x) { return in(x); });
  rep.contained = s.ok;
  rep.witness = s.witness;
  if (p.independent_diffs()) {
    rep.card_P = p.listed_count();
  } else {
    GapEnumeration e = enum_gap(p, budget);
    rep.card_P = Int(e.points.size());
    rep.proper = e.proper;
  }
  rep.ratio = Rat(rep.card_P) / Rat(rep.card_C);
  return rep;
}

// ---------------------------------------------------------------------------
// Projections

struct ProjectionReport {
  Int image_C = 0;     // #phi(C)
  Int image_P = 0;     // #phi(P)
  Int m = 0;           // largest fibre of C
  Int m_prime = 0;     // largest fibre of P
  Int card_C = 0;
  Int card_P = 0;
  Int card_PP = 0;     // #(P+P), or an upper bound of it when degraded
  std::string pp_method;  // "sumset", "doubled-gap" or "listed-bound"
  bool degraded = false;
  bool m_prime_ge_m = false;
  bool doubling = false;     // #phi(P)·m' <= #(P+P)
  bool sumset_bound = false;  // #(P+P)·m <= 2^k #P·m'
  bool ratio_ok = false;      // #phi(P) <= c1 k^{3k} #phi(C)
  std::optional<bool> fibres_doubled;  // every fibre of P+P over phi(P) has >= m' points
  Rat bound_value;
  bool holds() const {
    return m_prime_ge_m && doubling && sumset_bound && ratio_ok && fibres_doubled.value_or(true);
  }
};

inline ProjectionReport verify_projection(const ConvexBody& body, const Gap& p, const IntVec& phi,
                                          std::uint64_t budget = kDefaultBudget) {
  if (p.dim() != body.dim() || phi.size() != body.dim())
    throw Error(Errc::dimension, "projection: dimensions differ");
  ProjectionReport r;
  PointSet c = enum_body(body, budget);
  PointSet pts = enum_gap(p, budget).points;
  auto pc = project_count(c, phi);
  auto pp = project_count(pts, phi);
  r.card_C = Int(c.size());
  r.card_P = Int(pts.size());
  r.image_C = Int(pc.image_count);
  r.image_P = Int(pp.image_count);
  r.m = Int(pc.max_fiber);
  r.m_prime = Int(pp.max_fiber);

  const Int budget_i(std::to_string(budget));
  Gap twice = p.doubled();
  if (r.card_P * r.card_P <= budget_i) {
    PointSet sum = sumset(pts, pts, budget);
    r.card_PP = Int(sum.size());
    r.pp_method = "sumset";
    std::map<Int, std::size_t> fib;
    for (const auto& x : sum) ++fib[dot(phi, x)];
    bool ok = true;
    for (const auto& x : pts)
      if (Int(fib[dot(phi, x)]) < r.m_prime) ok = false;
    r.fibres_doubled = ok;
  } else if (twice.independent_diffs()) {
    r.card_PP = twice.listed_count();
    r.pp_method = "doubled-gap";
  } else if (twice.listed_count() <= budget_i) {
    r.card_PP = Int(enum_gap(twice, budget).points.size());
    r.pp_method = "doubled-gap";
  } else {
    r.card_PP = twice.listed_count();
    r.pp_method = "listed-bound";
    r.degraded = true;
  }

  std::size_t k = 0;
  {
    IntMat rows(c.size(), body.dim());
    std::size_t i = 0;
    for (const auto& x : c) {
      for (std::size_t j = 0; j < body.dim(); ++j) rows(i, j) = x[j];
      ++i;
    }
    k = rank(rows);
  }
  r.bound_value = ratio_bound(k);
  r.m_prime_ge_m = r.m_prime >= r.m;
  r.doubling = r.image_P * r.m_prime <= r.card_PP;
  Int two_k = 1;
  for (std::size_t i = 0; i < std::max<std::size_t>(k, p.rank()); ++i) two_k *= 2;
  r.sumset_bound = r.card_PP * r.m <= two_k * r.card_P * r.m_prime;
  r.ratio_ok = Rat(r.image_P) <= r.bound_value * Rat(r.image_C);
  return r;
}

}  // namespace gapcover
