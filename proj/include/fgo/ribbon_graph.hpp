#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgo {

enum class Dir : std::uint8_t { In, Out };

inline char dir_char(Dir d) { return d == Dir::In ? 'i' : 'o'; }

// An external leg is a univalent vertex; half_edge is its single half-edge
// (a fixed point of sigma). Labels are stable slot indices 0..n-1.
struct Leg {
  int half_edge;
  Dir dir;
  int label;
  bool operator==(const Leg&) const = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RibbonGraph {
  std::vector<int> sigma;  // cyclic order at vertices
  std::vector<int> iota;   // edge pairing
  std::vector<Leg> legs;   // sorted by label

  int num_half_edges() const { return static_cast<int>(sigma.size()); }

  // Cycles of sigma, each starting at its smallest half-edge, sorted by it.
  std::vector<std::vector<int>> vertices() const;
  std::vector<int> vertex_index() const;  // half-edge -> index into vertices()
  // Edges as (h, iota h) with h < iota h, sorted.
  std::vector<std::pair<int, int>> edges() const;
  std::vector<std::vector<int>> faces() const;  // cycles of sigma∘iota

  int leg_at(int h) const;  // leg position in legs, or -1
  bool is_external_edge(int h) const { return leg_at(h) >= 0 || leg_at(iota[h]) >= 0; }
  bool is_loop(int h) const;
  std::vector<int> internal_vertices() const;  // indices into vertices()
  std::vector<int> internal_edges() const;     // min half-edge of each internal edge
  int valency(int h) const;                    // valency of the vertex containing h
  bool connected() const;
  bool trivalent() const;

  int num_vertices() const { return static_cast<int>(vertices().size()); }
  int num_edges() const { return num_half_edges() / 2; }
  int euler_characteristic() const { return num_vertices() - num_edges(); }
  int num_in() const;
  int num_out() const;

  bool operator==(const RibbonGraph&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

enum class CellMode { Structure, Cell, TopCell };

// Structure: permutation axioms, legs univalent, connected.
// Cell additionally rejects internal vertices of valency < 3; TopCell requires valency 3.
ValidationReport validate(const RibbonGraph& g, CellMode mode = CellMode::Cell);

struct SurfaceInvariants {
  int genus = 0;
  int boundaries = 0;
  int chi = 0;
  // Leg labels met along each face, rotated to start at the smallest label.
  std::vector<std::vector<int>> placement;
};

SurfaceInvariants surface_invariants(const RibbonGraph& g);

struct Mark {
  int label;
  Dir dir;
  bool operator==(const Mark&) const = default;
};

struct SurfaceType {
  int genus = 0;
  std::vector<std::vector<Mark>> boundaries;  // marks in cyclic order per boundary

  int m() const { return static_cast<int>(boundaries.size()); }
  int num_marks() const;
  int n_in() const;
  int n_out() const;
  int chi() const { return 2 - 2 * genus - m(); }
  std::vector<Dir> directions() const;  // by label

  // patterns: one string of 'i'/'o' per boundary; labels assigned in order.
  static SurfaceType from_pattern(int genus, const std::vector<std::string>& patterns);
  // counts per boundary; every mark incoming except the last one, which is outgoing.
  static SurfaceType from_counts(int genus, const std::vector<int>& counts);
  static SurfaceType disk(int n_in, int n_out);

  std::string describe() const;
  bool operator==(const SurfaceType&) const = default;
};

bool realizes(const RibbonGraph& g, const SurfaceType& s);
SurfaceType surface_of(const RibbonGraph& g);

// Disjoint union; legs of g1 then g2, relabeled consecutively.
RibbonGraph disjoint_union(const RibbonGraph& g1, const RibbonGraph& g2);
// Half-edges [lo, hi) of a graph closed under sigma and iota; legs relabeled in order.
RibbonGraph subgraph_range(const RibbonGraph& g, int lo, int hi);

struct Collapse {
  RibbonGraph graph;
  std::vector<int> half_edge_map;  // old half-edge -> new, -1 for the removed pair
  int merged_vertex_half_edge;     // a half-edge (new labels) at the fused vertex
};

// e is any half-edge of the edge.
Collapse collapse_edge(const RibbonGraph& g, int e);

struct Expansion {
  RibbonGraph graph;
  int new_edge;  // half-edge of the distinguished new edge
};

// v is any half-edge at the vertex.
std::vector<Expansion> expansions(const RibbonGraph& g, int v);

using Iso = std::vector<int>;  // half-edge map g1 -> g2

std::vector<Iso> isomorphisms(const RibbonGraph& g1, const RibbonGraph& g2);
inline std::vector<Iso> automorphisms(const RibbonGraph& g) { return isomorphisms(g, g); }

struct Canonical {
  RibbonGraph graph;
  Iso relabel;  // original half-edge -> canonical half-edge
  std::vector<int> key;
};

Canonical canonical_form(const RibbonGraph& g);

// Literal: "sigma=(0 1 2)(3)(4)(5) iota=(0 3)(1 4)(2 5) legs=3i,4i,5o"
std::string to_literal(const RibbonGraph& g);
RibbonGraph from_literal(const std::string& text);

RibbonGraph tripod(Dir a = Dir::In, Dir b = Dir::In, Dir c = Dir::Out);

struct Enumeration {
  std::vector<RibbonGraph> graphs;  // canonical representatives, top cells first
  std::vector<int> codim;           // |E(top)| - |E(g)|
};

// All admissible cells of s; max_valency = 0 keeps every valency.
Enumeration enumerate_ribbon_graphs(const SurfaceType& s, int max_valency = 0);

// Every trivalent graph with n labeled legs and the given number of internal
// vertices, grouped by realized surface. Used for exhaustive sweeps.
std::vector<std::pair<SurfaceType, std::vector<RibbonGraph>>> enumerate_trivalent_by_surface(
    int internal_vertices, int legs, const std::vector<Dir>& dirs);

}  // namespace fgo
