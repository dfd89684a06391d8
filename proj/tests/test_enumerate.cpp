#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gapcover/enumerate.hpp"
#include "oracles.hpp"

using namespace gapcover;

namespace {

std::size_t count_disk(long r) {
  std::size_t n = 0;
  for (long x = -r; x <= r; ++x)
    for (long y = -r; y <= r; ++y)
      if (x * x + y * y <= r * r) ++n;
  return n;
}

PointSet grid3x3() { return enum_gap(Gap({0, 0}, {{1, 0}, {0, 1}}, {1, 1})).points; }

}  // namespace

TEST(EnumBody, Examples) {
  auto disk = enum_body(ConvexBody::ball(2, 2));
  EXPECT_EQ(disk.size(), count_disk(2));
  EXPECT_EQ(disk.size(), 13u);
  EXPECT_EQ(enum_body(ConvexBody::box({1, 1})).size(), 9u);
  auto seg = enum_body(ConvexBody::box({3}));
  EXPECT_EQ(seg.size(), 7u);
  EXPECT_EQ(seg.points().front(), (IntVec{3}));
  EXPECT_EQ(seg.points().back(), (IntVec{-3}));
}

TEST(EnumBody, BudgetExceeded) {
  try {
    enum_body(ConvexBody::ball(3, 100), 1000);
    FAIL() << "expected budget error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::budget);
  }
}

TEST(EnumBody, DescendingLexicographicOrder) {
  auto s = enum_body(ConvexBody::ball(2, 2));
  EXPECT_EQ(s.points().front(), (IntVec{2, 0}));
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end(), std::greater<>()));
}

TEST(EnumBody, MatchesBruteForceOnRandomEllipsoids) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    // A = (M^T M + I) / r^2
    std::size_t d = 2 + trial % 2;
    IntMat m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = oracle::uniform(rng, -2, 2);
    Mat a = to_rat(m.transpose() * m + IntMat::identity(d));
    Rat r2 = oracle::uniform(rng, 4, 30);
    Ellipsoid e((1 / r2) * a);
    auto s = enum_body(ConvexBody::ellipsoid(e));
    std::size_t brute = 0;
    long b = 8;
    IntVec x(d);
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == d) {
        brute += e.contains(to_rat(x));
        return;
      }
      for (long v = -b; v <= b; ++v) {
        x[k] = v;
        rec(k + 1);
      }
    };
    rec(0);
    EXPECT_EQ(s.size(), brute);
  }
}

TEST(EnumBody, SymmetricAndMonotone) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    std::size_t d = 2 + trial % 2;
    std::vector<RatVec> pts;
    for (int i = 0; i < 4; ++i) {
      RatVec p(d);
      for (auto& c : p) c = Rat(oracle::uniform(rng, -9, 9), 2);
      pts.push_back(p);
    }
    Mat all = Mat::from_rows(pts);
    if (rank(all) < d) continue;
    auto small = enum_body(ConvexBody::vertices(d, pts));
    for (const auto& x : small) {
      IntVec neg = x;
      for (auto& c : neg) c = -c;
      EXPECT_TRUE(small.contains(neg));
    }
    // doubling every vertex gives a superset
    auto big_pts = pts;
    for (auto& p : big_pts)
      for (auto& c : p) c *= 2;
    auto big = enum_body(ConvexBody::vertices(d, big_pts));
    for (const auto& x : small) EXPECT_TRUE(big.contains(x));
    EXPECT_GE(big.size(), small.size());
  }
}

TEST(EnumGap, Examples) {
  auto g = enum_gap(Gap({0, 0}, {{1, 0}, {0, 1}}, {1, 1}));
  EXPECT_EQ(g.points, enum_body(ConvexBody::box({1, 1})));
  EXPECT_TRUE(g.proper);

  auto h = enum_gap(Gap({0, 0}, {{1, 0}, {1, 2}}, {1, 1}));
  EXPECT_EQ(h.points.size(), 9u);
  EXPECT_TRUE(h.proper);
  EXPECT_TRUE(h.points.contains({2, 2}));
  EXPECT_TRUE(h.points.contains({0, -2}));

  auto line = enum_gap(Gap({0}, {{2}}, {3}));
  EXPECT_EQ(line.points.points(),
            (std::vector<IntVec>{{6}, {4}, {2}, {0}, {-2}, {-4}, {-6}}));
}

TEST(EnumGap, ImproperDetected) {
  auto g = enum_gap(Gap({0}, {{1}, {2}}, {2, 1}));
  EXPECT_FALSE(g.proper);
  EXPECT_EQ(g.points.size(), 9u);  // {-4..4}
  EXPECT_THROW(enum_gap(Gap({0}, {{1}}, {100}), 50), Error);
}

TEST(EnumGap, CardinalityIsProductWhenIndependent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t d = 1 + trial % 3;
    std::vector<IntVec> diffs(d, IntVec(d));
    IntVec n(d), base(d);
    for (auto& w : diffs)
      for (auto& c : w) c = oracle::uniform(rng, -4, 4);
    for (auto& v : n) v = oracle::uniform(rng, 0, 3);
    for (auto& v : base) v = oracle::uniform(rng, -5, 5);
    Gap p(base, diffs, n);
    auto e = enum_gap(p);
    if (p.independent_diffs()) {
      EXPECT_TRUE(e.proper);
      EXPECT_EQ(Int(e.points.size()), p.listed_count());
    } else {
      EXPECT_LE(Int(e.points.size()), p.listed_count());
    }
    // membership agrees with the explicit listing
    GapMembership in(p);
    for (int q = 0; q < 100; ++q) {
      IntVec x(d);
      for (auto& c : x) c = oracle::uniform(rng, -15, 15);
      EXPECT_EQ(in(x), e.points.contains(x));
    }
    for (const auto& x : e.points) EXPECT_TRUE(in(x));
  }
}

TEST(GapMembership, LowerRankGapInHigherDimension) {
  Gap p({0, 0, 0}, {{1, 1, 0}, {0, 1, 1}}, {2, 1});
  GapMembership in(p);
  EXPECT_TRUE(in({2, 3, 1}));
  EXPECT_FALSE(in({1, 0, 0}));   // off the plane
  EXPECT_FALSE(in({3, 3, 0}));   // coefficient 3 > 2
  auto m = in.coefficients({2, 3, 1});
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(*m, (IntVec{2, 1}));
  EXPECT_EQ(enum_gap(p).points.size(), 15u);
}

TEST(SubsetCheck, Examples) {
  auto disk = enum_body(ConvexBody::ball(2, 2));
  auto box = ConvexBody::box({2, 2});
  EXPECT_TRUE(subset_check(disk, [&](const IntVec& x) {
                return contains_point(box, to_rat(x));
              }).ok);

  auto unit = ConvexBody::ball(2, 1);
  auto r = subset_check(grid3x3(), [&](const IntVec& x) { return contains_point(unit, to_rat(x)); });
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(*r.witness, (IntVec{1, 1}));
}

TEST(ProjectCount, Examples) {
  auto grid = grid3x3();
  auto p = project_count(grid, {1, 1});
  EXPECT_EQ(p.image_count, 5u);
  EXPECT_EQ(p.max_fiber, 3u);

  auto z = project_count(grid, {0, 0});
  EXPECT_EQ(z.image_count, 1u);
  EXPECT_EQ(z.max_fiber, grid.size());

  auto disk = enum_body(ConvexBody::ball(2, 2));
  auto x = project_count(disk, {1, 0});
  EXPECT_EQ(x.image_count, 5u);
  EXPECT_EQ(x.max_fiber, 5u);  // the fibre x = 0 is {(0,-2),...,(0,2)}
}

TEST(ProjectCount, FibresAccountForEveryPoint) {
  std::mt19937_64 rng(19);
  auto disk = enum_body(ConvexBody::ball(3, 3));
  for (int trial = 0; trial < 30; ++trial) {
    IntVec phi{oracle::uniform(rng, -5, 5), oracle::uniform(rng, -5, 5), oracle::uniform(rng, -5, 5)};
    auto pc = project_count(disk, phi);
    std::map<Int, std::size_t> fib;
    for (const auto& x : disk) ++fib[dot(phi, x)];
    std::size_t total = 0;
    for (const auto& [k, v] : fib) total += v;
    EXPECT_EQ(total, disk.size());
    EXPECT_EQ(pc.image_count, fib.size());
    EXPECT_GE(pc.max_fiber * pc.image_count, disk.size());
  }
}

TEST(Sumset, DoubledGapEqualsExplicitSumset) {
  Gap p({1, 0}, {{1, 0}, {1, 2}}, {1, 2});
  auto pts = enum_gap(p).points;
  EXPECT_EQ(sumset(pts, pts), enum_gap(p.doubled()).points);
}

TEST(Sumset, MatchesPairwiseOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t d = 1 + trial % 4;
    // every fourth trial uses coordinates too wide for the packed keys
    Int scale = trial % 4 == 3 ? Int(1) << 40 : Int(1);
    auto draw = [&](int n) {
      std::vector<IntVec> pts;
      for (int i = 0; i < n; ++i) {
        IntVec x(d);
        for (auto& c : x) c = scale * oracle::uniform(rng, -6, 6);
        pts.push_back(x);
      }
      return pts;
    };
    auto a = draw(1 + trial), b = draw(3 + trial % 7);
    std::set<IntVec> expected;
    for (const auto& x : a)
      for (const auto& y : b) {
        IntVec z(d);
        for (std::size_t k = 0; k < d; ++k) z[k] = x[k] + y[k];
        expected.insert(z);
      }
    auto got = sumset(PointSet::from_points(d, a), PointSet::from_points(d, b));
    EXPECT_EQ(got.size(), expected.size());
    for (const auto& z : expected) EXPECT_TRUE(got.contains(z));
  }
}
