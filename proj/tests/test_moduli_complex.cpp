#include <gtest/gtest.h>

#include "fgo/moduli_complex.hpp"

using namespace fgo;

namespace {

std::vector<SurfaceType> small_surfaces() {
  return {SurfaceType::disk(2, 1),
          SurfaceType::disk(3, 1),
          SurfaceType::disk(4, 1),
          SurfaceType::disk(2, 2),
          SurfaceType::from_counts(0, {2, 0}),
          SurfaceType::from_counts(0, {1, 1}),
          SurfaceType::from_counts(1, {1}),
          SurfaceType::from_counts(1, {2})};
}

bool boundary_squared_vanishes(const ModuliComplex& cx) {
  for (int i = 0; i < static_cast<int>(cx.cells.size()); ++i) {
    CellularChain c;
    c.add(i, 1);
    if (!boundary(boundary(c, cx), cx).zero()) return false;
  }
  return true;
}

}  // namespace

TEST(ModuliComplex, DiskFourShape) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 2);
  ASSERT_EQ(cx.cells.size(), 3u);
  int top = 0, face = -1;
  for (int i = 0; i < 3; ++i) {
    if (cx.cells[i].codim == 0) ++top;
    if (cx.cells[i].codim == 1) face = i;
  }
  EXPECT_EQ(top, 2);
  ASSERT_GE(face, 0);
  for (auto& c : cx.cells)
    if (c.codim == 0) {
      ASSERT_EQ(c.attachments.size(), 1u);
      EXPECT_EQ(c.attachments[0].target, face);
    }
}

TEST(ModuliComplex, BoundarySquaredIsZero) {
  for (int d : {1, 2})
    for (auto& s : small_surfaces()) {
      auto cx = build_complex(s, d);
      EXPECT_TRUE(boundary_squared_vanishes(cx)) << s.describe() << " d=" << d;
    }
}

TEST(ModuliComplex, CollapsePairsCancel) {
  for (auto& s : small_surfaces()) {
    auto cx = build_complex(s, 2);
    for (auto& e : cancellation_report(cx)) EXPECT_TRUE(e.cancels) << s.describe() << " cell " << e.cell;
    EXPECT_TRUE(boundary(fundamental_chain(cx), cx).zero()) << s.describe();
  }
}

TEST(ModuliComplex, FundamentalChainNeedsEvenDimension) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 1);
  EXPECT_THROW(fundamental_chain(cx), std::exception);
}

TEST(ModuliComplex, DetDegree) {
  EXPECT_EQ(build_complex(SurfaceType::disk(2, 1)).det_degree(), 0);
  EXPECT_EQ(build_complex(SurfaceType::from_counts(0, {2, 0})).det_degree(), -1);
}

TEST(ModuliComplex, DumpIsDeterministic) {
  auto a = dump_complex(build_complex(SurfaceType::from_counts(0, {2, 0})));
  auto b = dump_complex(build_complex(SurfaceType::from_counts(0, {2, 0})));
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
}

TEST(Orientation, RelabelSignIsACocycle) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 2);
  FlowGrading gr{2, {1, 1, 2, 2}};
  for (auto& cell : cx.cells) {
    if (cell.codim != 0) continue;
    for (auto level : {SignLevel::Or, SignLevel::Det, SignLevel::DetOr, SignLevel::Flow})
      for (unsigned long long s = 0; s < 200; ++s) {
        auto a = random_relabel(cell.graph, cell.ref, 3 * s);
        auto b = random_relabel(cell.graph, cell.ref, 3 * s + 1);
        auto c = random_relabel(cell.graph, cell.ref, 3 * s + 2);
        int ab = relabel_sign(cell.graph, a, b, level, gr);
        int bc = relabel_sign(cell.graph, b, c, level, gr);
        int ac = relabel_sign(cell.graph, a, c, level, gr);
        EXPECT_EQ(ab * bc, ac);
        EXPECT_EQ(relabel_sign(cell.graph, a, a, level, gr), 1);
      }
  }
}

TEST(Orientation, NaturalOrientationNeedsOddValency) {
  auto cx = build_complex(SurfaceType::disk(3, 1), 2);
  for (auto& cell : cx.cells) {
    if (cell.codim == 0)
      EXPECT_NO_THROW(conant_vogtmann_tokens(cell.graph));
    else
      EXPECT_THROW(conant_vogtmann_tokens(cell.graph), std::exception);
  }
}

TEST(Gluing, TwoTripodsMakeTheFourDisk) {
  auto t = SurfaceType::disk(2, 1);
  EXPECT_EQ(glue_surface(t, t, Pairing{{{2, 0}}}), SurfaceType::disk(3, 1));
  // into the second slot: still a disk, with the marks in another cyclic order
  auto s = glue_surface(t, t, Pairing{{{2, 1}}});
  EXPECT_EQ(s.genus, 0);
  EXPECT_EQ(s.m(), 1);
  EXPECT_EQ(s.n_in(), 3);
  EXPECT_EQ(s.n_out(), 1);
  EXPECT_NE(s, SurfaceType::disk(3, 1));
  auto g = glue(tripod(), tripod(), Pairing{{{2, 0}}});
  EXPECT_TRUE(realizes(g, SurfaceType::disk(3, 1)));
  EXPECT_TRUE(g.trivalent());
}

TEST(Gluing, RejectsEmptyPairing) {
  auto t = SurfaceType::disk(2, 1);
  EXPECT_THROW(glue_surface(t, t, Pairing{}), std::exception);
}

TEST(Gluing, TransferCommutesWithBoundary) {
  auto t = build_complex(SurfaceType::disk(2, 1), 2);
  for (Pairing p : {Pairing{{{2, 0}}}, Pairing{{{2, 1}}}}) {
    auto d4 = build_complex(glue_surface(t.surface, t.surface, p), 2);
    GlueData gd{&d4, &t, &t, p};
    auto fc = fundamental_chain(d4);
    auto tr = transfer(fc, gd);
    EXPECT_FALSE(tr.terms.empty());
    EXPECT_EQ(product_boundary(tr, gd), transfer(boundary(fc, d4), gd));
    for (int i = 0; i < static_cast<int>(d4.cells.size()); ++i) {
      CellularChain c;
      c.add(i, 1);
      EXPECT_EQ(product_boundary(transfer(c, gd), gd), transfer(boundary(c, d4), gd));
    }
  }
}
