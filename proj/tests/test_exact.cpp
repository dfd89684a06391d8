#include <gtest/gtest.h>

#include <random>

#include "gapcover/exact.hpp"
#include "oracles.hpp"

using namespace gapcover;

namespace {

IntMat random_int_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, long lo, long hi) {
  IntMat m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = oracle::uniform(rng, lo, hi);
  return m;
}

Mat random_rat_matrix(std::mt19937_64& rng, std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat v(oracle::uniform(rng, -9, 9), oracle::uniform(rng, 1, 7));
      v.canonicalize();
      m(i, j) = v;
    }
  return m;
}

}  // namespace

TEST(ParseRat, AcceptedForms) {
  EXPECT_EQ(parse_rat("7/2"), Rat(7, 2));
  EXPECT_EQ(parse_rat("-6/4"), Rat(-3, 2));
  EXPECT_EQ(parse_rat("12"), Rat(12));
  EXPECT_EQ(parse_rat("3.25"), Rat(13, 4));
  EXPECT_EQ(parse_rat("-0.5"), Rat(-1, 2));
  EXPECT_EQ(to_string(parse_rat("4/2")), "2/1");
  EXPECT_THROW(parse_rat("1/0"), Error);
  EXPECT_THROW(parse_rat("abc"), Error);
  EXPECT_THROW(parse_rat("1/-2"), Error);
  EXPECT_THROW(parse_rat(""), Error);
}

TEST(Scalars, SqrtBoundsBracketTheRoot) {
  EXPECT_EQ(sqrt_upper(Rat(9, 4)), Rat(3, 2));
  EXPECT_EQ(sqrt_lower(Rat(9, 4)), Rat(3, 2));
  for (int n = 2; n < 50; ++n) {
    Rat q(n, 3);
    q.canonicalize();
    Rat up = sqrt_upper(q), lo = sqrt_lower(q);
    EXPECT_GE(up * up, q);
    EXPECT_LE(lo * lo, q);
    EXPECT_LT(up - lo, Rat(1, 1000000));
  }
}

TEST(Scalars, RationalizeRespectsCap) {
  Rat r = rationalize(3.14159265358979, Int(1000));
  EXPECT_EQ(r, Rat(355, 113));
  EXPECT_EQ(rationalize(0.5), Rat(1, 2));
  Rat fine = rationalize(1.0 / 3.0);
  EXPECT_EQ(fine, Rat(1, 3));
}

TEST(Det, Examples) {
  EXPECT_EQ(det(Mat{{2, 0}, {0, 3}}), Rat(6));
  EXPECT_EQ(det(Mat::identity(4)), Rat(1));
  Mat m{{1, 2}, {3, 4}};
  EXPECT_EQ(det(m), oracle::det2_cofactor(m));
  EXPECT_EQ(det(m), Rat(-2));
  EXPECT_THROW(det(Mat(2, 3)), Error);
}

TEST(Det, MatchesLaplaceExpansionAndTranspose) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = 1 + trial % 4;
    Mat m = random_rat_matrix(rng, n);
    Rat d = det(m);
    EXPECT_EQ(d, oracle::det_laplace(m));
    EXPECT_EQ(d, det(m.transpose()));
  }
}

TEST(Det, SingularIsZero) {
  EXPECT_EQ(det(Mat{{1, 2}, {2, 4}}), Rat(0));
  EXPECT_EQ(det(Mat{{0, 0, 1}, {0, 0, 2}, {1, 1, 1}}), Rat(0));
}

TEST(Inverse, Examples) {
  EXPECT_EQ(inverse(Mat::identity(3)), Mat::identity(3));
  EXPECT_EQ(inverse(Mat{{1, 0}, {-4, 1}}), (Mat{{1, 0}, {4, 1}}));
  Mat m{{2, 1}, {1, 1}};
  EXPECT_EQ(inverse(m), oracle::inverse2_adjugate(m));
  EXPECT_EQ(inverse(m), (Mat{{1, -1}, {-1, 2}}));
  EXPECT_THROW(inverse(Mat{{1, 2}, {2, 4}}), Error);
}

TEST(Inverse, ProductIsIdentityAndDetsMultiplyToOne) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    Mat m = random_rat_matrix(rng, 1 + trial % 5);
    Rat d = det(m);
    if (d == 0) {
      EXPECT_THROW(inverse(m), Error);
      continue;
    }
    Mat inv = inverse(m);
    EXPECT_EQ(m * inv, Mat::identity(m.rows()));
    EXPECT_EQ(d * det(inv), Rat(1));
    ++checked;
  }
  EXPECT_GT(checked, 60);
}

TEST(Hnf, Examples) {
  auto id = hnf(IntMat::identity(3));
  EXPECT_EQ(id.h, IntMat::identity(3));
  EXPECT_EQ(id.u.matrix(), IntMat::identity(3));

  auto swap = hnf(IntMat{{0, 1}, {1, 0}});
  EXPECT_EQ(swap.h, IntMat::identity(2));

  IntMat m{{2, 4}, {6, 8}};
  auto f = hnf(m);
  EXPECT_EQ(abs(det(f.h)), Int(8));
  EXPECT_EQ(f.h, oracle::lower_hnf2_bruteforce(m));
  EXPECT_EQ(f.u.matrix() * m, f.h);
}

TEST(Hnf, RankDeficientRejected) {
  try {
    hnf(IntMat{{1, 2}, {2, 4}});
    FAIL() << "expected rank error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::rank);
  }
}

TEST(Hnf, ShapeIdempotenceAndBruteForceAgreement) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + trial % 5;
    IntMat m = random_int_matrix(rng, n, n, -12, 12);
    if (det(m) == 0) continue;
    auto f = hnf(m);
    EXPECT_EQ(f.u.matrix() * m, f.h);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GT(f.h(i, i), 0);
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(f.h(i, j), 0);
      for (std::size_t k = i + 1; k < n; ++k) {
        EXPECT_GE(f.h(k, i), 0);
        EXPECT_LT(f.h(k, i), f.h(i, i));
      }
    }
    EXPECT_EQ(hnf(f.h).h, f.h);
    if (n == 2) {
      EXPECT_EQ(f.h, oracle::lower_hnf2_bruteforce(m));
    }
  }
}

TEST(Hnf, InvariantUnderUnimodularLeftMultiplication) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + trial % 3;
    IntMat m = random_int_matrix(rng, n, n, -9, 9);
    if (det(m) == 0) continue;
    IntMat w = oracle::random_unimodular(rng, n, 6);
    EXPECT_EQ(hnf(w * m).h, hnf(m).h);
  }
}

TEST(Kernel, SaturatedBasisOfDiagonalLine) {
  IntMat b = saturated_basis(IntMat{{2, 2}, {-4, -4}});
  ASSERT_EQ(b.rows(), 1u);
  EXPECT_EQ(abs(b(0, 0)), 1);
  EXPECT_EQ(b(0, 0), b(0, 1));
  IntMat full = saturated_basis(IntMat{{1, 0}, {0, 3}});
  EXPECT_EQ(abs(det(full)), 1);
}

TEST(Kernel, SaturatedBasisContainsEveryIntegerPointOfTheSpan) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    IntMat gens = random_int_matrix(rng, 2, 4, -3, 3);
    if (rank(gens) < 2) continue;
    IntMat b = saturated_basis(gens);
    ASSERT_EQ(b.rows(), 2u);
    // every generator/g is an integer combination of the saturated basis
    for (std::size_t i = 0; i < gens.rows(); ++i) {
      Mat stacked(3, 4);
      for (std::size_t j = 0; j < 4; ++j) {
        stacked(0, j) = Rat(b(0, j));
        stacked(1, j) = Rat(b(1, j));
        stacked(2, j) = Rat(gens(i, j));
      }
      EXPECT_EQ(rank(stacked), 2u);
    }
    // saturation: the basis lattice has no proper integer superlattice in the span
    EXPECT_TRUE(oracle::is_saturated(b));
  }
}

TEST(UnimodularSolve, Examples) {
  auto t = unimodular_solve(Mat::identity(2), Mat{{0, 1}, {1, 0}});
  EXPECT_EQ(t.matrix(), (IntMat{{0, 1}, {1, 0}}));
  EXPECT_EQ(t.det_sign(), -1);

  try {
    unimodular_solve(Mat::identity(2), Rat(2) * Mat::identity(2));
    FAIL() << "expected lattices-differ error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::lattices_differ);
  }

  Mat x{{1, 0}, {4, 1}};
  auto s = unimodular_solve(x, Mat::identity(2));
  EXPECT_EQ(s.matrix(), (IntMat{{1, 0}, {-4, 1}}));
  EXPECT_EQ(to_rat(s.matrix()) * x, Mat::identity(2));
}

TEST(UnimodularSolve, SucceedsIffHermiteFormsAgree) {
  std::mt19937_64 rng(77);
  int successes = 0, rejections = 0;
  for (int trial = 0; trial < 120; ++trial) {
    std::size_t n = 2 + trial % 3;
    IntMat x = random_int_matrix(rng, n, n, -6, 6);
    if (det(x) == 0) continue;
    IntMat x2;
    if (trial % 2 == 0) {
      x2 = oracle::random_unimodular(rng, n, 5) * x;
    } else {
      x2 = random_int_matrix(rng, n, n, -6, 6);
      if (det(x2) == 0) continue;
    }
    bool same = hnf(x).h == hnf(x2).h;
    bool solved = true;
    try {
      auto t = unimodular_solve(to_rat(x), to_rat(x2));
      EXPECT_EQ(t.matrix() * x, x2);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::lattices_differ);
      solved = false;
    }
    EXPECT_EQ(same, solved);
    EXPECT_EQ(same, same_lattice(to_rat(x), to_rat(x2)));
    (solved ? successes : rejections)++;
  }
  EXPECT_GT(successes, 20);
  EXPECT_GT(rejections, 20);
}

TEST(UnimodularSolve, RationalBases) {
  Mat x{{Rat(1, 2), Rat(1, 3)}, {0, Rat(5, 7)}};
  IntMat w{{2, 1}, {1, 1}};
  Mat x2 = to_rat(w) * x;
  EXPECT_EQ(unimodular_solve(x, x2).matrix(), w);
  EXPECT_TRUE(same_lattice(x, x2));
  EXPECT_FALSE(same_lattice(x, Rat(1, 2) * x));
}
