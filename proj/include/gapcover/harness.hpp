#pragma once

// Instances in and reports out: the JSON schema, a portable seeded generator,
// batch runs with exit codes, and CSV rows.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gapcover/cover.hpp"
#include "gapcover/enumerate.hpp"
#include "gapcover/error.hpp"
#include "gapcover/exact.hpp"
#include "gapcover/geometry.hpp"

namespace gapcover {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// PRNG

/// 64-bit Mersenne Twister (its output sequence is fixed by the C++ standard)
/// with integers drawn by rejection, so that every platform draws the same
/// values. std::uniform_int_distribution is implementation-defined and is not
/// used here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [lo, hi].
  long uniform(long lo, long hi) {
    if (lo > hi) throw Error(Errc::generation, "empty range");
    const std::uint64_t span = std::uint64_t(hi) - std::uint64_t(lo) + 1;
    if (span == 0) return long(next());  // the full 64-bit range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return long(std::uint64_t(lo) + x % span);
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Instances

struct InstanceSpec {
  explicit InstanceSpec(ConvexBody b) : body(std::move(b)) {}

  ConvexBody body;
  std::optional<Rat> eps;
  std::optional<IntVec> phi;
  std::optional<std::uint64_t> budget;
  std::string kind = "input";
  std::optional<std::uint64_t> seed;
  std::optional<Gap> gap;  // a GAP to check instead of computing one

  std::size_t dim() const { return body.dim(); }
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what) {
  throw Error(Errc::parse, (path.empty() ? std::string("document") : path) + ": " + what);
}

inline std::string at(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}
inline std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline Rat json_rat(const Json& j, const std::string& path) {
  if (j.is_number_float()) parse_fail(path, "floating-point numbers are not accepted; write \"p/q\"");
  if (j.is_number_integer()) return j.is_number_unsigned() ? Rat(Int(std::to_string(j.get<std::uint64_t>())))
                                                           : Rat(Int(std::to_string(j.get<std::int64_t>())));
  if (j.is_string()) {
    try {
      return parse_rat(j.get<std::string>());
    } catch (const Error& e) {
      parse_fail(path, e.what());
    }
  }
  parse_fail(path, "expected a rational");
}

inline Int json_int(const Json& j, const std::string& path) {
  Rat r = json_rat(j, path);
  if (r.get_den() != 1) parse_fail(path, "expected an integer");
  return r.get_num();
}

inline const Json& member(const Json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(at(path, key), "missing");
  return *it;
}

inline const Json& array_of(const Json& j, const std::string& path, std::optional<std::size_t> len = {}) {
  if (!j.is_array()) parse_fail(path, "expected an array");
  if (len && j.size() != *len)
    parse_fail(path, "expected " + std::to_string(*len) + " entries, found " + std::to_string(j.size()));
  return j;
}

inline RatVec json_rat_vec(const Json& j, const std::string& path, std::size_t len) {
  array_of(j, path, len);
  RatVec v;
  for (std::size_t i = 0; i < len; ++i) v.push_back(json_rat(j[i], at(path, i)));
  return v;
}

inline IntVec json_int_vec(const Json& j, const std::string& path, std::size_t len) {
  array_of(j, path, len);
  IntVec v;
  for (std::size_t i = 0; i < len; ++i) v.push_back(json_int(j[i], at(path, i)));
  return v;
}

inline void only_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) parse_fail(at(path, it.key()), "unknown field");
  }
}

inline ConvexBody parse_body(const Json& j, std::size_t d, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  const Json& type = member(j, "type", path);
  if (!type.is_string()) parse_fail(at(path, "type"), "expected a string");
  const std::string t = type.get<std::string>();
  if (t == "vertices") {
    only_keys(j, path, {"type", "points"});
    const std::string p = at(path, "points");
    const Json& pts = array_of(member(j, "points", path), p);
    if (pts.empty()) parse_fail(p, "no points");
    std::vector<RatVec> v;
    for (std::size_t i = 0; i < pts.size(); ++i) v.push_back(json_rat_vec(pts[i], at(p, i), d));
    return ConvexBody::vertices(d, std::move(v));
  }
  if (t == "ellipsoid") {
    only_keys(j, path, {"type", "form"});
    const std::string p = at(path, "form");
    const Json& rows = array_of(member(j, "form", path), p, d);
    Mat a(d, d);
    for (std::size_t i = 0; i < d; ++i) a.set_row(i, json_rat_vec(rows[i], at(p, i), d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = i + 1; k < d; ++k)
        if (a(i, k) != a(k, i)) parse_fail(at(at(p, i), k), "form is not symmetric");
    try {
      return ConvexBody::ellipsoid(Ellipsoid(std::move(a)));
    } catch (const Error& e) {
      parse_fail(p, e.what());
    }
  }
  if (t == "box") {
    only_keys(j, path, {"type", "halfwidths"});
    const std::string p = at(path, "halfwidths");
    RatVec h = json_rat_vec(member(j, "halfwidths", path), p, d);
    for (std::size_t i = 0; i < d; ++i)
      if (h[i] < 0) parse_fail(at(p, i), "negative half-width");
    return ConvexBody::box(std::move(h));
  }
  if (t == "ball") {
    only_keys(j, path, {"type", "radius"});
    Rat r = json_rat(member(j, "radius", path), at(path, "radius"));
    if (r <= 0) parse_fail(at(path, "radius"), "radius must be positive");
    return ConvexBody::ball(d, r);
  }
  parse_fail(at(path, "type"), "unknown body type '" + t + "'");
}

inline Gap parse_gap(const Json& j, std::size_t d, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  only_keys(j, path, {"base", "diffs", "halfsides"});
  IntVec base = json_int_vec(member(j, "base", path), at(path, "base"), d);
  const std::string dp = at(path, "diffs");
  const Json& dj = array_of(member(j, "diffs", path), dp);
  std::vector<IntVec> diffs;
  for (std::size_t i = 0; i < dj.size(); ++i) diffs.push_back(json_int_vec(dj[i], at(dp, i), d));
  IntVec n = json_int_vec(member(j, "halfsides", path), at(path, "halfsides"), diffs.size());
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] < 0) parse_fail(at(at(path, "halfsides"), i), "negative half-side");
  return Gap(std::move(base), std::move(diffs), std::move(n));
}

}  // namespace detail

inline InstanceSpec parse_instance_json(const Json& j, const std::string& path = "") {
  using namespace detail;
  if (!j.is_object()) parse_fail(path, "expected an object");
  only_keys(j, path, {"dim", "body", "eps", "phi", "budget", "kind", "seed", "gap"});
  const Json& dj = member(j, "dim", path);
  if (!dj.is_number_integer() || dj.get<std::int64_t>() < 1) parse_fail(at(path, "dim"), "expected a positive integer");
  const std::size_t d = dj.get<std::size_t>();
  InstanceSpec s(parse_body(member(j, "body", path), d, at(path, "body")));
  if (j.contains("eps")) {
    Rat e = json_rat(j["eps"], at(path, "eps"));
    if (e <= 0 || e >= 1) parse_fail(at(path, "eps"), "eps must lie in (0, 1)");
    s.eps = e;
  }
  if (j.contains("phi")) s.phi = json_int_vec(j["phi"], at(path, "phi"), d);
  if (j.contains("budget")) {
    Int b = json_int(j["budget"], at(path, "budget"));
    if (b < 1 || !b.fits_ulong_p()) parse_fail(at(path, "budget"), "budget must be a positive 64-bit integer");
    s.budget = b.get_ui();
  }
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) parse_fail(at(path, "kind"), "expected a string");
    s.kind = j["kind"].get<std::string>();
  }
  if (j.contains("seed")) {
    Int b = json_int(j["seed"], at(path, "seed"));
    if (b < 0 || !b.fits_ulong_p()) parse_fail(at(path, "seed"), "seed must be a 64-bit unsigned integer");
    s.seed = b.get_ui();
  }
  if (j.contains("gap")) s.gap = parse_gap(j["gap"], d, at(path, "gap"));
  return s;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::parse, std::string("malformed JSON: ") + e.what());
  }
}

inline InstanceSpec parse_instance(const std::string& text) { return parse_instance_json(parse_json_text(text)); }

/// A single instance object, an array of them, or {"instances": [...]}.
inline std::vector<InstanceSpec> parse_instances(const std::string& text) {
  Json j = parse_json_text(text);
  std::string path;
  if (j.is_object() && j.contains("instances") && !j.contains("dim")) {
    path = "instances";
    j = j["instances"];
  }
  std::vector<InstanceSpec> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_instance_json(j[i], detail::at(path, i)));
  } else {
    out.push_back(parse_instance_json(j, path));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline Json int_json(const Int& x) {
  if (x.fits_slong_p()) return Json(static_cast<std::int64_t>(x.get_si()));
  return Json(x.get_str());
}

inline Json int_vec_json(const IntVec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(int_json(x));
  return a;
}

inline Json rat_vec_json(const RatVec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

}  // namespace detail

inline Json gap_json(const Gap& g) {
  Json diffs = Json::array();
  for (const auto& w : g.diffs()) diffs.push_back(detail::int_vec_json(w));
  return Json{{"base", detail::int_vec_json(g.base())}, {"diffs", diffs},
              {"halfsides", detail::int_vec_json(g.halfsides())}};
}

inline Json body_json(const ConvexBody& b) {
  if (const auto* v = std::get_if<VertexRep>(&b.rep())) {
    Json pts = Json::array();
    for (const auto& p : v->points) pts.push_back(detail::rat_vec_json(p));
    return Json{{"type", "vertices"}, {"points", pts}};
  }
  if (const auto* e = std::get_if<Ellipsoid>(&b.rep())) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < e->dim(); ++i) rows.push_back(detail::rat_vec_json(e->form().row(i)));
    return Json{{"type", "ellipsoid"}, {"form", rows}};
  }
  return Json{{"type", "box"}, {"halfwidths", detail::rat_vec_json(std::get<BoxRep>(b.rep()).halfwidths)}};
}

inline Json instance_json(const InstanceSpec& s) {
  Json j{{"dim", s.dim()}, {"body", body_json(s.body)}};
  if (s.eps) j["eps"] = to_string(*s.eps);
  if (s.phi) j["phi"] = detail::int_vec_json(*s.phi);
  if (s.budget) j["budget"] = *s.budget;
  j["kind"] = s.kind;
  if (s.seed) j["seed"] = *s.seed;
  if (s.gap) j["gap"] = gap_json(*s.gap);
  return j;
}

// ---------------------------------------------------------------------------
// Random instances

struct GenParams {
  std::string kind = "lattice-ball";  // lattice-ball | random-vertices | random-ellipsoid
  std::size_t dim = 2;
  std::uint64_t seed = 0;
  long h = 3;           // entry bound of the lattice basis / ellipsoid factor
  Rat radius = 4;       // ball radius (lattice-ball, random-ellipsoid)
  std::size_t points = 0;  // random-vertices: point count, 0 means 2·dim
  long coord = 5;       // random-vertices: coordinate bound
};

/// lattice-ball: B(0, R) ∩ L for L spanned by the rows of a random integer
/// matrix with entries in [-h, h], written in the coordinates of that basis,
/// i.e. the ellipsoid z^T (L L^T / R^2) z <= 1 in Z^d. The uniform-entry basis
/// is a stand-in for a random lattice, not any particular distribution.
/// random-vertices: conv(±p_i) for integer points with coordinates in
/// [-coord, coord], redrawn until they span. random-ellipsoid:
/// z^T (M^T M + I) z <= R^2 for M with entries in [-h, h].
inline InstanceSpec gen_random(const GenParams& g) {
  if (g.dim < 1) throw Error(Errc::generation, "dimension must be positive");
  const std::size_t d = g.dim;
  Rng rng(g.seed);
  auto draw_matrix = [&](long h) {
    IntMat m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) m(i, k) = rng.uniform(-h, h);
    return m;
  };
  std::optional<ConvexBody> body;
  if (g.kind == "lattice-ball") {
    if (g.radius <= 0) throw Error(Errc::generation, "radius must be positive");
    for (int attempt = 0; attempt < 100 && !body; ++attempt) {
      IntMat l = draw_matrix(g.h);
      if (det(l) == 0) continue;
      Mat a = (1 / (g.radius * g.radius)) * to_rat(l * l.transpose());
      body = ConvexBody::ellipsoid(Ellipsoid(std::move(a)));
    }
    if (!body) throw Error(Errc::generation, "lattice basis singular after 100 draws");
  } else if (g.kind == "random-vertices") {
    const std::size_t n = g.points ? g.points : 2 * d;
    if (n < d) throw Error(Errc::generation, "fewer points than the dimension cannot span");
    for (int attempt = 0; attempt < 100 && !body; ++attempt) {
      std::vector<RatVec> pts(n, RatVec(d));
      for (auto& p : pts)
        for (auto& c : p) c = rng.uniform(-g.coord, g.coord);
      if (rank(Mat::from_rows(pts)) < d) continue;
      body = ConvexBody::vertices(d, std::move(pts));
    }
    if (!body) throw Error(Errc::generation, "points failed to span after 100 draws");
  } else if (g.kind == "random-ellipsoid") {
    if (g.radius <= 0) throw Error(Errc::generation, "radius must be positive");
    IntMat m = draw_matrix(g.h);
    Mat a = (1 / (g.radius * g.radius)) * to_rat(m.transpose() * m + IntMat::identity(d));
    body = ConvexBody::ellipsoid(Ellipsoid(std::move(a)));
  } else {
    throw Error(Errc::generation, "unknown generator kind '" + g.kind + "'");
  }
  InstanceSpec s(std::move(*body));
  s.kind = g.kind;
  s.seed = g.seed;
  return s;
}

/// The fixed 150-instance corpus: 50 instances in each of d = 2, 3, 4,
/// cycling through the three generator kinds, seed 1000·d + i.
inline std::vector<InstanceSpec> acceptance_corpus() {
  std::vector<InstanceSpec> out;
  for (std::size_t d = 2; d <= 4; ++d)
    for (std::size_t i = 0; i < 50; ++i) {
      GenParams g;
      g.dim = d;
      g.seed = 1000 * d + i;
      switch (i % 3) {
        case 0:
          g.kind = "lattice-ball";
          g.h = 3;
          g.radius = d == 2 ? 9 : d == 3 ? 7 : 6;
          break;
        case 1:
          g.kind = "random-vertices";
          g.points = d + 2;
          g.coord = d == 4 ? 4 : 6;
          break;
        default:
          g.kind = "random-ellipsoid";
          g.h = 2;
          g.radius = d == 2 ? 8 : d == 3 ? 6 : 4;
          break;
      }
      out.push_back(gen_random(g));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

enum class Mode { cover, verify, project };

struct RunOptions {
  Mode mode = Mode::cover;
  std::optional<Rat> eps;  // overrides the instance's eps
  std::optional<std::uint64_t> budget;
  bool fail_fast = false;
  bool allow_skip = false;
};

enum class Status { certified, failed, error, budget, skipped, not_run };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::certified: return "certified";
    case Status::failed: return "failed";
    case Status::error: return "error";
    case Status::budget: return "budget";
    case Status::skipped: return "skipped";
    case Status::not_run: return "not_run";
  }
  return "unknown";
}

struct InstanceOutcome {
  std::size_t index = 0;
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::size_t dim = 0;
  Status status = Status::not_run;
  std::optional<CoverReport> report;
  std::optional<Gap> gap;
  std::optional<ProjectionReport> projection;
  std::optional<Error> error;
  double runtime_ms = 0;
};

/// Measured exponents-free constants: ratio / k^{3k} exactly, and the
/// per-stage constants as the k-th roots they imply (floating).
struct MeasuredConstants {
  Rat c1;
  double c2 = 0, c3 = 0;
};

inline MeasuredConstants measured_constants(const CoverReport& r) {
  MeasuredConstants m;
  const std::size_t k = std::max<std::size_t>(r.intrinsic_dim, 1);
  m.c1 = r.ratio / pow_rat(Rat(k), 3 * k);
  if (r.stages) {
    const auto& st = *r.stages;
    const double kd = double(k);
    m.c2 = std::pow(Rat(st.volume_B / st.volume_TQ).get_d(), 1.0 / (2 * kd)) / kd;
    m.c3 = std::pow(Rat(st.volume_Q / Rat(r.card_C)).get_d(), 1.0 / kd) / kd;
  }
  return m;
}

struct BatchReport {
  std::vector<InstanceOutcome> outcomes;
  std::size_t certified = 0, failed = 0, errors = 0, budget = 0, skipped = 0;
  std::optional<Rat> max_ratio;
  std::optional<Rat> max_c1;  // max ratio / k^{3k}
  double max_c2 = 0, max_c3 = 0;
  bool chains_hold = true;  // every per-stage inequality held with the pinned constants
  int exit_code = 0;
};

inline InstanceOutcome run_instance(const InstanceSpec& s, const RunOptions& opt, std::size_t index = 0) {
  InstanceOutcome o;
  o.index = index;
  o.kind = s.kind;
  o.seed = s.seed;
  o.dim = s.dim();
  const std::uint64_t budget = opt.budget ? *opt.budget : s.budget ? *s.budget : kDefaultBudget;
  const Rat eps = opt.eps ? *opt.eps : s.eps ? *s.eps : Rat(1, 100);
  const auto start = std::chrono::steady_clock::now();
  try {
    bool ok = false;
    if (opt.mode == Mode::verify) {
      if (!s.gap) throw Error(Errc::representation, "verify needs a gap in the instance");
      o.gap = s.gap;
      o.report = verify_cover(s.body, *s.gap, budget);
      ok = o.report->contained;
    } else {
      if (opt.mode == Mode::project && !s.phi) throw Error(Errc::representation, "project needs phi in the instance");
      if (s.gap && opt.mode == Mode::project) {
        o.gap = s.gap;
        o.report = verify_cover(s.body, *s.gap, budget);
      } else {
        CoverResult r = cover(s.body, eps, budget);
        CoverReport check = verify_cover(s.body, r.gap, budget);
        if (check.card_P != r.report.card_P || check.card_C != r.report.card_C || check.contained != r.report.contained)
          throw Error(Errc::certification, "independent re-verification disagrees with the pipeline", "verify");
        o.gap = std::move(r.gap);
        o.report = std::move(r.report);
      }
      ok = o.report->contained;
      if (s.phi) {
        o.projection = verify_projection(s.body, *o.gap, *s.phi, budget);
        ok = ok && o.projection->holds();
      }
    }
    o.status = ok ? Status::certified : Status::failed;
  } catch (const Error& e) {
    o.error = e;
    if (e.code() == Errc::budget) o.status = opt.allow_skip ? Status::skipped : Status::budget;
    else o.status = Status::error;
  }
  o.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return o;
}

inline BatchReport run_batch(const std::vector<InstanceSpec>& specs, const RunOptions& opt) {
  BatchReport b;
  bool stop = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (stop) {
      InstanceOutcome o;
      o.index = i;
      o.kind = specs[i].kind;
      o.seed = specs[i].seed;
      o.dim = specs[i].dim();
      b.outcomes.push_back(std::move(o));
      continue;
    }
    InstanceOutcome o = run_instance(specs[i], opt, i);
    switch (o.status) {
      case Status::certified: ++b.certified; break;
      case Status::failed: ++b.failed; break;
      case Status::error: ++b.errors; break;
      case Status::budget: ++b.budget; break;
      case Status::skipped: ++b.skipped; break;
      case Status::not_run: break;
    }
    if (o.report && o.status != Status::error) {
      const auto& r = *o.report;
      if (!b.max_ratio || r.ratio > *b.max_ratio) b.max_ratio = r.ratio;
      MeasuredConstants m = measured_constants(r);
      if (!b.max_c1 || m.c1 > *b.max_c1) b.max_c1 = m.c1;
      b.max_c2 = std::max(b.max_c2, m.c2);
      b.max_c3 = std::max(b.max_c3, m.c3);
      if (r.stages && !(r.stages->chain_Q && r.stages->chain_B && r.stages->chain_P)) b.chains_hold = false;
    }
    if (opt.fail_fast && o.status != Status::certified && o.status != Status::skipped) stop = true;
    b.outcomes.push_back(std::move(o));
  }
  if (b.failed + b.errors > 0) b.exit_code = 1;
  else if (b.budget > 0) b.exit_code = 3;
  return b;
}

// ---------------------------------------------------------------------------
// Reports

inline Json report_json(const CoverReport& r) {
  Json j{{"dim", r.dim},
         {"intrinsic_dim", r.intrinsic_dim},
         {"card_C", detail::int_json(r.card_C)},
         {"card_P", detail::int_json(r.card_P)},
         {"ratio", to_string(r.ratio)},
         {"bound", to_string(r.bound_value)},
         {"contained", r.contained},
         {"proper", r.proper},
         {"witness", r.witness ? detail::int_vec_json(*r.witness) : Json(nullptr)}};
  if (r.stages) {
    const auto& st = *r.stages;
    j["stages"] = Json{{"eps", to_string(st.eps)},
                       {"volume_Q", to_string(st.volume_Q)},
                       {"volume_TQ", to_string(st.volume_TQ)},
                       {"volume_B", to_string(st.volume_B)},
                       {"reduction_ratio_sq", to_string(st.reduction_ratio_sq)},
                       {"reduction_ratio", to_string(st.reduction_ratio)},
                       {"a", detail::rat_vec_json(st.a)},
                       {"halfsides", detail::int_vec_json(st.halfsides)},
                       {"a_below_one", st.a_below_one},
                       {"chain", Json{{"Q", st.chain_Q}, {"B", st.chain_B}, {"P", st.chain_P}}}};
  }
  MeasuredConstants m = measured_constants(r);
  Json approx{{"ratio", r.ratio.get_d()}, {"c1", m.c1.get_d()}};
  if (r.stages) {
    approx["c2"] = m.c2;
    approx["c3"] = m.c3;
    approx["mvee_iterations"] = r.stages->mvee_iterations;
    approx["mvee_excess"] = r.stages->mvee_excess;
  }
  j["approx"] = approx;
  return j;
}

inline Json projection_json(const ProjectionReport& p) {
  return Json{{"image_C", detail::int_json(p.image_C)},
              {"image_P", detail::int_json(p.image_P)},
              {"m", detail::int_json(p.m)},
              {"m_prime", detail::int_json(p.m_prime)},
              {"card_P", detail::int_json(p.card_P)},
              {"card_PP", detail::int_json(p.card_PP)},
              {"pp_method", p.pp_method},
              {"degraded", p.degraded},
              {"bound", to_string(p.bound_value)},
              {"checks", Json{{"m_prime_ge_m", p.m_prime_ge_m},
                              {"doubling", p.doubling},
                              {"sumset_bound", p.sumset_bound},
                              {"ratio", p.ratio_ok},
                              {"fibres_doubled", p.fibres_doubled ? Json(*p.fibres_doubled) : Json(nullptr)}}},
              {"holds", p.holds()}};
}

inline Json outcome_json(const InstanceOutcome& o, bool timing) {
  Json j{{"index", o.index}, {"kind", o.kind}};
  j["seed"] = o.seed ? Json(*o.seed) : Json(nullptr);
  j["dim"] = o.dim;
  j["status"] = std::string(to_string(o.status));
  if (o.error)
    j["error"] = Json{{"code", std::string(to_string(o.error->code()))},
                      {"stage", o.error->stage()},
                      {"message", o.error->what()}};
  if (o.report) j["report"] = report_json(*o.report);
  if (o.gap) j["gap"] = gap_json(*o.gap);
  if (o.projection) j["projection"] = projection_json(*o.projection);
  if (timing) {
    Json t{{"total", o.runtime_ms}};
    if (o.report && o.report->stages) {
      const auto& s = o.report->times;
      t["restrict"] = s.restrict_ms;
      t["ellipsoid"] = s.ellipsoid_ms;
      t["reduce"] = s.reduce_ms;
      t["box"] = s.box_ms;
      t["certify"] = s.certify_ms;
    }
    j["timing_ms"] = t;
  }
  return j;
}

inline Json batch_json(const BatchReport& b, bool timing = false) {
  Json items = Json::array();
  Json failures = Json::array();
  bool lattice_ball = false;
  for (const auto& o : b.outcomes) {
    items.push_back(outcome_json(o, timing));
    lattice_ball = lattice_ball || o.kind == "lattice-ball";
    if (o.status == Status::failed || o.status == Status::error || o.status == Status::budget) {
      Json f{{"index", o.index}, {"status", std::string(to_string(o.status))}};
      if (o.report && o.report->witness) f["witness"] = detail::int_vec_json(*o.report->witness);
      if (o.error) f["message"] = o.error->what();
      failures.push_back(f);
    }
  }
  Json agg{{"count", b.outcomes.size()},
           {"certified", b.certified},
           {"failed", b.failed},
           {"errors", b.errors},
           {"budget", b.budget},
           {"skipped", b.skipped},
           {"max_ratio", b.max_ratio ? Json(to_string(*b.max_ratio)) : Json(nullptr)},
           {"max_c1", b.max_c1 ? Json(to_string(*b.max_c1)) : Json(nullptr)},
           {"chains_hold", b.chains_hold},
           {"constants", Json{{"c1", to_string(constant_c1())},
                              {"c2", to_string(constant_c2())},
                              {"c3", to_string(constant_c3())}}},
           {"approx", Json{{"max_c2", b.max_c2}, {"max_c3", b.max_c3}}}};
  Json j{{"instances", items}, {"aggregate", agg}, {"failures", failures}, {"exit_code", b.exit_code}};
  if (lattice_ball)
    j["notes"] = Json::array({"lattice-ball instances use a uniform-entry integer basis as a stand-in random lattice"});
  return j;
}

inline std::string csv_header() {
  return "dim,kind,seed,card_C,card_P,ratio_num,ratio_den,contained,a_min,reduction_ratio,runtime_ms\n";
}

/// One row per outcome; runtime_ms stays empty unless timing is requested so
/// that default output is reproducible byte for byte.
inline std::string csv_rows(const BatchReport& b, bool timing = false) {
  std::ostringstream out;
  for (const auto& o : b.outcomes) {
    out << o.dim << ',' << o.kind << ',';
    if (o.seed) out << *o.seed;
    out << ',';
    if (o.report) {
      const auto& r = *o.report;
      out << r.card_C << ',' << r.card_P << ',' << r.ratio.get_num() << ',' << r.ratio.get_den() << ','
          << (r.contained ? "true" : "false") << ',';
      if (r.stages && !r.stages->a.empty())
        out << to_string(*std::min_element(r.stages->a.begin(), r.stages->a.end()));
      out << ',';
      if (r.stages) out << to_string(r.stages->reduction_ratio);
    } else {
      out << ",,,,,,";
    }
    out << ',';
    if (timing) out << o.runtime_ms;
    out << '\n';
  }
  return out.str();
}

}  // namespace gapcover
