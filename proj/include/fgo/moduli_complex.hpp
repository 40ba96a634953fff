#pragma once

#include <boost/rational.hpp>
#include <map>
#include <string>
#include <vector>

#include "fgo/orientation.hpp"
#include "fgo/ribbon_graph.hpp"

namespace fgo {

using Rational = boost::rational<long long>;

// Ordered bases for the spaces whose orientations make up a chain generator:
// the cell itself (W_E), the local system or (W_E, W_V ⊕ W_H) and, for odd d,
// det (W_{E-E_-}, W_V ⊕ W_H).
struct OrientedBasis {
  std::vector<TokenList> edge_blocks;
  std::vector<TokenList> vh_blocks;
};

OrientedBasis oriented_basis(const RibbonGraph& g, const OrientationData& od, int d);
int basis_sign(const OrientedBasis& a, const OrientedBasis& b);
OrientedBasis rename_basis(const OrientedBasis& b, const RibbonGraph& g, const std::vector<int>& hmap,
                           const RibbonGraph& h);

// Projection onto the face where edge e shrinks: e is moved to the front of
// every edge block and dropped; h, h', v, v' are moved to the front of every
// W_V ⊕ W_H block and only v' survives, as the fused vertex.
struct FaceProjection {
  int sign;
  OrientedBasis basis;  // in the labels of g/e
  Collapse collapse;
};
FaceProjection project_to_face(const RibbonGraph& g, const OrientedBasis& b, int e);

struct Attachment {
  int edge;    // half-edge of the collapsed edge in the cell's graph
  int target;  // cell index
  int sign;
};

struct Cell {
  RibbonGraph graph;
  int dim = 0;             // |E|, external lengths included
  int label_free_dim = 0;  // |E| minus the external edges
  int codim = 0;
  int aut_order = 1;
  bool degenerate = false;  // some automorphism reverses the local system
  OrientationData ref;
  std::vector<Attachment> attachments;
};

struct ModuliComplex {
  SurfaceType surface;
  int d = 2;  // only the parity matters
  std::vector<Cell> cells;
  std::map<std::vector<int>, int> index;  // canonical key -> cell

  int find(const RibbonGraph& canonical_graph) const;
  int top_dim() const;
  int det_degree() const { return surface.chi() - surface.n_out(); }
};

ModuliComplex build_complex(const SurfaceType& s, int d = 2);

struct CellularChain {
  std::map<int, Rational> terms;
  int det_degree = 0;

  void add(int cell, Rational c);
  bool zero() const { return terms.empty(); }
  bool operator==(const CellularChain&) const = default;
};

CellularChain boundary(const CellularChain& c, const ModuliComplex& complex);

// Sum of the trivalent cells, each in its natural orientation.
CellularChain fundamental_chain(const ModuliComplex& complex);

struct CancellationEntry {
  int cell;
  std::vector<int> sources;  // top cells of the two expansions
  std::vector<int> signs;
  bool cancels;
};
// For each cell with one 4-valent vertex: the contributions of its two
// expansions, each top cell taken in its natural orientation (d even).
std::vector<CancellationEntry> cancellation_report(const ModuliComplex& complex);

struct Pairing {
  std::vector<std::pair<int, int>> pairs;  // (out label in g1, in label in g2)
};

// Attach each paired out-leg of g1 to the in-leg of g2. Result legs: unpaired
// legs of g1 by label, then unpaired legs of g2 by label.
RibbonGraph glue(const RibbonGraph& g1, const RibbonGraph& g2, const Pairing& p);
SurfaceType glue_surface(const SurfaceType& s1, const SurfaceType& s2, const Pairing& p);

struct ProductChain {
  std::map<std::pair<int, int>, Rational> terms;
  void add(std::pair<int, int> cell, Rational c);
  bool operator==(const ProductChain&) const = default;
};

struct GlueData {
  const ModuliComplex* glued;
  const ModuliComplex* first;
  const ModuliComplex* second;
  Pairing pairing;
};

struct Decomposition {
  int first;
  int second;
  std::vector<int> cut_edges;  // half-edges of the glued graph, in pairing order
  int sign;
};

std::vector<Decomposition> decompositions(const GlueData& gd, int glued_cell);
ProductChain transfer(const CellularChain& c, const GlueData& gd);
ProductChain product_boundary(const ProductChain& c, const GlueData& gd);

// Line-delimited records, one per cell.
std::string dump_complex(const ModuliComplex& complex);

}  // namespace fgo
