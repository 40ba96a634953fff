#include <gtest/gtest.h>

#include "fgo/flow_graph.hpp"
#include "fgo/moduli_complex.hpp"

using namespace fgo;

namespace {

const MorseComplex& torus() {
  static MorseComplex mc = morse_complex(MorseFunction::named("t2-coscos"));
  return mc;
}

const MorseComplex& circle() {
  static MorseComplex mc = morse_complex(MorseFunction::named("t1-double"));
  return mc;
}

}  // namespace

TEST(FlowGraph, ExpectedDimension) {
  auto t = tripod();
  // two saddles in, maximum out on the torus: rigid, with |E| = 3 external lengths
  EXPECT_EQ(expected_dimension(t, {1, 1}, {2}, 2), 3);
  EXPECT_EQ(expected_dimension(t, {0, 0}, {0}, 2), 3);
  EXPECT_EQ(expected_dimension(t, {1, 1}, {1}, 2), 2);
}

TEST(FlowGraph, Cutoff) {
  EXPECT_EQ(cutoff(0), 1);
  EXPECT_EQ(cutoff(1), 1);
  EXPECT_EQ(cutoff(-1), 1);
  EXPECT_EQ(cutoff(2), 0);
  EXPECT_EQ(cutoff(-3), 0);
  EXPECT_GT(cutoff(1.5), 0);
  EXPECT_LT(cutoff(1.5), 1);
}

TEST(Perturbation, DeterministicAndBounded) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 2);
  for (auto& cell : cx.cells) {
    auto a = build_perturbation(7, cell.graph, 2);
    auto b = build_perturbation(7, cell.graph, 2);
    EXPECT_EQ(a.fields, b.fields);
    for (auto& [k, f] : a.fields) EXPECT_LE(f.bound(), 0.05 + 1e-12) << k;
    auto c = build_perturbation(11, cell.graph, 2);
    EXPECT_NE(a.fields, c.fields);
  }
}

TEST(Perturbation, RestrictsToCollapsedGraphs) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 2);
  for (auto& cell : cx.cells) {
    if (cell.codim != 0) continue;
    auto full = build_perturbation(7, cell.graph, 2);
    for (int e : cell.graph.internal_edges()) {
      auto col = collapse_edge(cell.graph, e);
      auto small = build_perturbation(7, col.graph, 2);
      for (auto& [k, f] : small.fields) {
        ASSERT_TRUE(full.fields.count(k)) << k;
        EXPECT_EQ(full.fields.at(k), f) << k;
      }
    }
  }
}

TEST(Perturbation, ReversalFlipsTheField) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 2);
  auto& g = cx.cells[0].graph;
  auto p = build_perturbation(7, g, 2);
  int h = g.internal_edges()[0];
  auto fwd = p.internal_field(0, h, 1.0), bwd = p.internal_field(0, g.iota[h], 1.0);
  Vec x(2), a, b;
  x << 0.2, 0.7;
  for (double t : {0.0, 0.3, 0.8}) {
    fwd(t, x, a, nullptr);
    bwd(1 - t, x, b, nullptr);
    EXPECT_NEAR((a + b).norm(), 0, 1e-14);
  }
}

TEST(FlowGraph, TripodCupOnTorus) {
  auto& mc = torus();
  auto t = tripod();
  auto pert = build_perturbation(7, t, 2);
  // generators: 0 min, 1 and 2 saddles, 3 max
  FlowGraphSystem sys(t, {1, 2, 3}, mc, pert, {});
  ASSERT_TRUE(sys.rigid());
  auto sols = sys.solve();
  ASSERT_EQ(sols.size(), 1u);
  FlowOptions tight;
  tight.abs_tol = tight.rel_tol = 1e-13;
  EXPECT_LT(sys.verify(sols[0], tight), 1e-8);
  // a saddle against itself: solutions cancel in pairs
  FlowGraphSystem same(t, {1, 1, 3}, mc, pert, {});
  int total = 0;
  for (auto& s : same.solve()) total += same.sign(s, reference_orientation(t));
  EXPECT_EQ(total, 0);
}

TEST(FlowGraph, SignLawsUnderRelabeling) {
  auto& mc = circle();
  auto cx = build_complex(SurfaceType::disk(3, 1), 1);
  auto& cell = cx.cells[0];
  auto pert = build_perturbation(7, cell.graph, 1);
  FlowGraphSystem sys(cell.graph, {0, 0, 2, 2}, mc, pert, {1.0});
  ASSERT_TRUE(sys.rigid());
  auto sols = sys.solve();
  ASSERT_FALSE(sols.empty());
  auto gr = sys.grading();
  for (auto& s : sols) {
    int base = sys.sign(s, cell.ref);
    for (unsigned long long k = 0; k < 1000; ++k) {
      auto od = random_relabel(cell.graph, cell.ref, k);
      ASSERT_EQ(sys.sign(s, od), base * relabel_sign(cell.graph, cell.ref, od, SignLevel::Flow, gr)) << k;
    }
  }
}

TEST(FlowGraph, BoundaryStrataOfTheTripod) {
  auto& mc = torus();
  auto strata = boundary_strata(tripod(), {1, 2, 3}, mc);
  // no internal edge to collapse; every stratum is a breaking
  EXPECT_FALSE(strata.empty());
  for (auto& s : strata) EXPECT_NE(s.kind, Stratum::Kind::Collapse);
}

TEST(FlowGraph, RejectsMismatchedLegs) {
  auto& mc = torus();
  auto t = tripod();
  auto pert = build_perturbation(7, t, 2);
  EXPECT_ANY_THROW(FlowGraphSystem(t, {1, 2}, mc, pert, {}));
}
