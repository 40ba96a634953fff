#pragma once

#include <vector>

#include "fgo/ribbon_graph.hpp"

namespace fgo {

// Basis vector of one of the spaces W_E, W_V, W_H attached to a graph.
struct Token {
  char kind;  // 'E' edge, 'V' vertex, 'H' half-edge
  int id;     // edges and vertices are named by their smallest half-edge
  bool operator==(const Token&) const = default;
  auto operator<=>(const Token&) const = default;
};

using TokenList = std::vector<Token>;

struct OrientationData {
  std::vector<int> edge_source;     // per internal edge, aligned with RibbonGraph::internal_edges()
  std::vector<int> vertex_order;    // internal vertex ids
  std::vector<int> edge_order;      // all edge ids
  std::vector<int> incoming_order;  // incoming external edge ids

  bool operator==(const OrientationData&) const = default;
};

OrientationData reference_orientation(const RibbonGraph& g);

int edge_id(const RibbonGraph& g, int h);
int vertex_id(const RibbonGraph& g, int h);

// Parity (+1/-1) of the permutation carrying list a to list b.
int permutation_sign(const TokenList& a, const TokenList& b);

TokenList edge_block(const RibbonGraph& g, const OrientationData& od);
TokenList det_edge_block(const RibbonGraph& g, const OrientationData& od);  // internal then incoming
TokenList vh_block(const RibbonGraph& g, const OrientationData& od);

enum class SignLevel { Or, Det, DetOr, Flow };

// Critical-point indices per leg label; needed only at the Flow level.
struct FlowGrading {
  int d = 2;
  std::vector<int> leg_index;
};

// Sign relating the trivialisations a and b.
// Or / Det: the local systems or and det. DetOr: det^{⊗d} ⊗ or. Flow: the
// orientation of the flow-graph space (vertex swap or reversal (-1)^d,
// consecutive edge swap (-1)^{k_i k_j}).
int relabel_sign(const RibbonGraph& g, const OrientationData& a, const OrientationData& b, SignLevel level,
                 const FlowGrading& grading = {});

// Natural orientation of W_V ⊕ W_H for odd-valent graphs: each vertex followed by
// its half-edges in cyclic order. Throws on an even-valent vertex.
TokenList conant_vogtmann_tokens(const RibbonGraph& g);
// Sign of the permutation an automorphism induces on the natural orientation.
int conant_vogtmann_sign(const RibbonGraph& g, const Iso& phi);
// Sign of vh_block(od) against the natural orientation.
int conant_vogtmann_relative(const RibbonGraph& g, const OrientationData& od);

// Image of a token under a half-edge map from g to h (-1 entries are dropped pairs).
Token rename_token(const Token& t, const RibbonGraph& g, const std::vector<int>& hmap, const RibbonGraph& h);
TokenList rename_tokens(const TokenList& ts, const RibbonGraph& g, const std::vector<int>& hmap, const RibbonGraph& h);

OrientationData random_relabel(const RibbonGraph& g, const OrientationData& od, unsigned long long seed);

}  // namespace fgo
