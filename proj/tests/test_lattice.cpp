#include <gtest/gtest.h>

#include <random>

#include "gapcover/lattice.hpp"
#include "oracles.hpp"

using namespace gapcover;

namespace {

LatticeBasis random_basis(std::mt19937_64& rng, std::size_t d, long h) {
  while (true) {
    Mat m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = oracle::uniform(rng, -h, h);
    if (det(m) != 0) return LatticeBasis(m);
  }
}

Rat pow2(long e) {
  Rat r(1);
  for (long i = 0; i < e; ++i) r *= 2;
  return r;
}

/// Shortest pair of basis vectors (by sorted squared norms) among integer
/// combinations with coefficients in [-range, range].
std::pair<Rat, Rat> shortest_basis_norms_2d(const Mat& b, long range) {
  std::vector<RatVec> vs;
  for (long p = -range; p <= range; ++p)
    for (long q = -range; q <= range; ++q) {
      if (p == 0 && q == 0) continue;
      vs.push_back({p * b(0, 0) + q * b(1, 0), p * b(0, 1) + q * b(1, 1)});
    }
  Rat target = abs(det(b));
  std::pair<Rat, Rat> best{-1, -1};
  for (const auto& x : vs)
    for (const auto& y : vs) {
      if (abs(x[0] * y[1] - x[1] * y[0]) != target) continue;
      Rat nx = dot(x, x), ny = dot(y, y);
      if (nx > ny) std::swap(nx, ny);
      if (best.first < 0 || ny < best.second || (ny == best.second && nx < best.first))
        best = {nx, ny};
    }
  return best;
}

}  // namespace

TEST(Lll, IdentityIsFixed) {
  auto r = lll_reduce(LatticeBasis(Mat::identity(3)));
  EXPECT_EQ(r.basis.matrix(), Mat::identity(3));
  EXPECT_EQ(r.transform.matrix(), IntMat::identity(3));
}

TEST(Lll, ShearIsUndone) {
  LatticeBasis in(Mat{{1, 0}, {4, 1}});
  auto r = lll_reduce(in);
  EXPECT_EQ(r.basis.matrix(), Mat::identity(2));
  EXPECT_EQ(r.transform.matrix(), (IntMat{{1, 0}, {-4, 1}}));
  EXPECT_EQ(to_rat(r.transform.matrix()) * in.matrix(), r.basis.matrix());
}

TEST(Lll, FindsShortestBasisInTwoDimensions) {
  LatticeBasis in(Mat{{1, 1}, {0, 2}});
  auto r = lll_reduce(in);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(dot(r.basis.vector(i), r.basis.vector(i)), 2);
  EXPECT_TRUE(same_lattice(in.matrix(), r.basis.matrix()));
  auto best = shortest_basis_norms_2d(in.matrix(), 4);
  EXPECT_EQ(best, std::make_pair(Rat(2), Rat(2)));
}

TEST(Lll, RejectsBadDelta) {
  EXPECT_THROW(lll_reduce(LatticeBasis(Mat::identity(2)), Rat(1, 4)), Error);
  EXPECT_THROW(lll_reduce(LatticeBasis(Mat::identity(2)), Rat(1)), Error);
  EXPECT_THROW(LatticeBasis(Mat{{1, 2}, {2, 4}}), Error);
}

TEST(Lll, RandomBasesAreReducedAndPreserveTheLattice) {
  std::mt19937_64 rng(2024);
  const Rat delta(99, 100);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t d = 1 + trial % 6;
    LatticeBasis in = random_basis(rng, d, 50);
    auto r = lll_reduce(in, delta);
    EXPECT_TRUE(is_lll_reduced(r.basis, delta));
    EXPECT_TRUE(same_lattice(in.matrix(), r.basis.matrix()));
    EXPECT_EQ(abs(det(in.matrix())), abs(det(r.basis.matrix())));
    auto cert = certify_reduction(r.basis);
    EXPECT_LE(cert.ratio_sq, pow2(long(d * (d - 1) / 2)));
    EXPECT_GE(cert.ratio_sq, 1);
  }
}

TEST(Lll, RationalBases) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 2 + trial % 3;
    Mat m = random_basis(rng, d, 9).matrix();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) /= oracle::uniform(rng, 1, 11);
    if (det(m) == 0) continue;
    LatticeBasis in(m);
    auto r = lll_reduce(in);
    EXPECT_TRUE(is_lll_reduced(r.basis, Rat(99, 100)));
    EXPECT_TRUE(same_lattice(m, r.basis.matrix()));
  }
}

TEST(Certify, Examples) {
  auto id = certify_reduction(LatticeBasis(Mat::identity(3)));
  EXPECT_EQ(id.ratio, Rat(1));
  EXPECT_EQ(id.det_abs, Rat(1));

  auto skew = certify_reduction(LatticeBasis(Mat{{1, 0}, {1, 1}}));
  EXPECT_EQ(skew.ratio_sq, Rat(2));
  EXPECT_GE(skew.ratio * skew.ratio, 2);
  EXPECT_NEAR(skew.ratio.get_d(), std::sqrt(2.0), 1e-9);

  auto bad = certify_reduction(LatticeBasis(Mat{{1, 0}, {100, 1}}));
  EXPECT_EQ(bad.norm_product_sq, Rat(10001));
  EXPECT_NEAR(bad.ratio.get_d(), 100.005, 1e-3);
  EXPECT_GE(bad.ratio * bad.ratio, Rat(10001));
}

TEST(SuccessiveMinima, Examples) {
  auto id = successive_minima_bruteforce(LatticeBasis(Mat::identity(2)));
  EXPECT_EQ(id.norms_sq, (RatVec{1, 1}));
  auto shear = successive_minima_bruteforce(LatticeBasis(Mat{{1, 0}, {4, 1}}));
  EXPECT_EQ(shear.norms_sq, (RatVec{1, 1}));
  auto rect = successive_minima_bruteforce(LatticeBasis(Mat{{2, 0}, {0, 3}}));
  EXPECT_EQ(rect.norms_sq, (RatVec{4, 9}));
  EXPECT_THROW(successive_minima_bruteforce(LatticeBasis(Mat::identity(5))), Error);
}

TEST(SuccessiveMinima, VectorsAreIndependentLatticeVectors) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 1 + trial % 4;
    LatticeBasis in = random_basis(rng, d, 12);
    auto sm = successive_minima_bruteforce(in);
    ASSERT_EQ(sm.vectors.size(), d);
    EXPECT_EQ(rank(Mat::from_rows(sm.vectors)), d);
    Mat binv = inverse(in.matrix());
    for (std::size_t i = 0; i < d; ++i) {
      // integral coordinates in the input basis
      Mat row(1, d);
      row.set_row(0, sm.vectors[i]);
      EXPECT_TRUE(is_integral(row * binv));
      EXPECT_EQ(dot(sm.vectors[i], sm.vectors[i]), sm.norms_sq[i]);
      if (i > 0) {
        EXPECT_LE(sm.norms_sq[i - 1], sm.norms_sq[i]);
      }
    }
  }
}

TEST(SuccessiveMinima, SandwichLllAndMinkowskiBounds) {
  std::mt19937_64 rng(66);
  // rational lower bounds on the unit-ball volume for d = 1..4 (pi > 314159/100000)
  const Rat pi_lo(314159, 100000);
  const Rat omega_lo[] = {0, 2, pi_lo, Rat(4, 3) * pi_lo, pi_lo * pi_lo / 2};
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t d = 1 + trial % 4;
    LatticeBasis in = random_basis(rng, d, 20);
    auto sm = successive_minima_bruteforce(in);
    Rat prod_sq = 1;
    for (const auto& n : sm.norms_sq) prod_sq *= n;
    auto cert = certify_reduction(lll_reduce(in).basis);
    EXPECT_LE(prod_sq, cert.norm_product_sq);
    EXPECT_LE(cert.norm_product_sq, pow2(long(d * (d - 1) / 2)) * prod_sq);
    // Hadamard on the minima vectors: prod lambda_i >= det
    EXPECT_GE(prod_sq, cert.det_abs * cert.det_abs);
    // Minkowski's second theorem: prod lambda_i * vol(B_d) <= 2^d det
    EXPECT_LE(prod_sq * omega_lo[d] * omega_lo[d], pow2(long(2 * d)) * cert.det_abs * cert.det_abs);
  }
}
