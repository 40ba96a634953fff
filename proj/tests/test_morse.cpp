#include <gtest/gtest.h>

#include <cmath>

#include "fgo/morse.hpp"

using namespace fgo;

TEST(MorseFunction, ParseRoundTrip) {
  auto f = MorseFunction::named("t2-tilt");
  auto g = MorseFunction::parse(f.to_text());
  EXPECT_EQ(g.dim, 2);
  ASSERT_EQ(g.terms.size(), f.terms.size());
  Vec x(2);
  x << 0.31, 0.77;
  EXPECT_DOUBLE_EQ(f.value(x), g.value(x));
}

TEST(MorseFunction, UnknownNameFails) { EXPECT_ANY_THROW(MorseFunction::named("no-such-function")); }

TEST(MorseFunction, GradientMatchesDifferences) {
  auto f = MorseFunction::named("t2-tilt");
  Vec x(2);
  x << 0.13, 0.58;
  Vec g = f.gradient(x);
  for (int i = 0; i < 2; ++i) {
    Vec e = Vec::Zero(2);
    e[i] = 1e-6;
    EXPECT_NEAR(g[i], (f.value(x + e) - f.value(x - e)) / 2e-6, 1e-5);
  }
}

TEST(CriticalPoints, CosineOnCircle) {
  auto cp = critical_points(MorseFunction::named("t1-cos"));
  ASSERT_EQ(cp.size(), 2u);
  EXPECT_EQ(cp[0].index, 0);
  EXPECT_NEAR(cp[0].position[0], 0.5, 1e-10);
  EXPECT_EQ(cp[1].index, 1);
  EXPECT_NEAR(cp[1].position[0], 0.0, 1e-10);
}

TEST(CriticalPoints, FramesAreOrthonormal) {
  for (auto& c : critical_points(MorseFunction::named("t2-tilt"))) {
    Mat frame(2, 2);
    frame << c.unstable, c.stable;
    EXPECT_NEAR((frame.transpose() * frame - Mat::Identity(2, 2)).norm(), 0, 1e-10);
    EXPECT_GT(frame.determinant(), 0);
  }
}

TEST(CriticalPoints, DegenerateFunctionIsRejected) {
  // cos(2 pi x) + cos(4 pi x) / 4 has a degenerate critical point at x = 1/2
  auto f = MorseFunction::parse("dim 1\n1 1 0\n2 0.25 0\n");
  try {
    critical_points(f);
    FAIL() << "expected a Morse error";
  } catch (const MorseError& e) {
    EXPECT_EQ(e.kind, MorseError::Kind::NonMorse);
  }
}

TEST(MorseComplex, CircleRanks) {
  for (auto name : {"t1-cos", "t1-double"}) {
    auto mc = morse_complex(MorseFunction::named(name));
    EXPECT_TRUE(mc.squares_to_zero());
    EXPECT_EQ(mc.homology_ranks(), (std::vector<int>{1, 1})) << name;
  }
}

TEST(MorseComplex, TorusRanks) {
  for (auto name : {"t2-coscos", "t2-tilt"}) {
    auto mc = morse_complex(MorseFunction::named(name));
    EXPECT_TRUE(mc.squares_to_zero());
    EXPECT_EQ(mc.homology_ranks(), (std::vector<int>{1, 2, 1})) << name;
  }
}

TEST(MorseComplex, DoubleWellHasNonzeroDifferential) {
  auto mc = morse_complex(MorseFunction::named("t1-double"));
  ASSERT_EQ(mc.generators.size(), 4u);
  long long nonzero = 0;
  for (auto& row : mc.codifferential)
    for (auto x : row) nonzero += x != 0;
  EXPECT_EQ(nonzero, 4);
}

TEST(MorseComplex, StableUnderHalvedTolerance) {
  for (auto name : {"t1-double", "t2-split"}) {
    CountOptions loose, tight;
    loose.flow.abs_tol = loose.flow.rel_tol = 1e-10;
    tight.flow.abs_tol = tight.flow.rel_tol = 5e-11;
    auto a = morse_complex(MorseFunction::named(name), loose);
    auto b = morse_complex(MorseFunction::named(name), tight);
    EXPECT_EQ(a.codifferential, b.codifferential) << name;
  }
}

TEST(MorseComplex, CountNeedsAdjacentIndices) {
  auto f = MorseFunction::named("t2-coscos");
  auto cp = critical_points(f);
  EXPECT_THROW(count_trajectories(f, cp, 0, 3), MorseError);
}

TEST(Flow, ExponentialDecay) {
  VectorField lin = [](double, const Vec& x, Vec& v, Mat* j) {
    v = -x;
    if (j) *j = -Mat::Identity(x.size(), x.size());
  };
  Vec x0(1);
  x0 << 1.0;
  auto r = flow(x0, lin, 0, 2);
  EXPECT_NEAR(r.x[0], std::exp(-2.0), 1e-10);
  EXPECT_NEAR(r.jacobian(0, 0), std::exp(-2.0), 1e-10);
}

TEST(Algebra, RationalRank) {
  EXPECT_EQ(rational_rank({{1, 2}, {2, 4}}), 1);
  EXPECT_EQ(rational_rank({{1, 0}, {0, 2}}), 2);
  EXPECT_EQ(rational_rank(zeros(3, 2)), 0);
}

TEST(Continuation, CircleShift) {
  auto a = morse_complex(MorseFunction::named("t1-cos"));
  auto b = morse_complex(MorseFunction::named("t1-cos-shift"));
  auto psi = continuation_map(a, b);
  EXPECT_TRUE(is_chain_map(a, b, psi));
  EXPECT_TRUE(is_quasi_isomorphism(a, b, psi));
}

TEST(Continuation, IdentityOnTheSameFunction) {
  auto a = morse_complex(MorseFunction::named("t1-double"));
  auto psi = continuation_map(a, a);
  for (std::size_t i = 0; i < psi.size(); ++i)
    for (std::size_t j = 0; j < psi[i].size(); ++j) EXPECT_EQ(psi[i][j], i == j ? 1 : 0);
}
