#pragma once

#include <string>
#include <vector>

#include "fgo/flow_graph.hpp"
#include "fgo/moduli_complex.hpp"
#include "fgo/morse.hpp"

namespace fgo {

struct OperationOptions {
  unsigned long long seed = 7;
  double length = 1.0;  // every internal edge at the label point
  SolveOptions solve;
};

struct OperationTerm {
  std::vector<int> inputs;   // generator per incoming label, labels ascending
  int cell = 0;
  Rational coefficient;      // on the cell's reference generator
  std::vector<int> outputs;  // generator per outgoing label
};

// Fibres of positive dimension are kept as bookkeeping only.
struct SymbolicTerm {
  std::vector<int> inputs;
  int cell = 0;
  std::vector<int> outputs;
  int fiber_dim = 0;
};

struct OperationChain {
  SurfaceType surface;
  int d = 2;
  int det_degree = 0;  // chi - n_out
  std::vector<std::vector<int>> input_tuples;
  std::vector<OperationTerm> terms;  // nonzero, sorted by (inputs, outputs, cell)
  std::vector<SymbolicTerm> symbolic;
  long solved = 0;  // rigid systems handed to the solver

  Rational coefficient(const std::vector<int>& in, int cell, const std::vector<int>& out) const;
  // Top-cell chain of one (inputs, outputs) component.
  CellularChain component(const std::vector<int>& in, const std::vector<int>& out) const;
};

// Index sum bookkeeping: sum ind(out) - sum ind(in) + d chi - d n_out. Zero is rigid.
int fiber_dimension(const SurfaceType& s, const MorseComplex& mc, const std::vector<int>& in,
                    const std::vector<int>& out);

// Coefficient of one trivalent cell: the signed solution count, taken
// relative to the natural orientation of the cell when d is even, divided by
// the automorphism order.
Rational cell_coefficient(const ModuliComplex& cx, int cell, const MorseComplex& mc, const std::vector<int>& in,
                          const std::vector<int>& out, const OperationOptions& opt = {}, long* solved = nullptr);

// p_plus empty: every input tuple.
OperationChain operation_chain(const ModuliComplex& cx, const MorseComplex& mc,
                               const std::vector<std::vector<int>>& p_plus = {}, const OperationOptions& opt = {});

struct CheckRecord {
  std::string kind;  // "collapse" or "breaking"
  std::vector<int> inputs;
  int cell = 0;
  std::vector<int> outputs;
  Rational lhs, rhs;
  bool pass() const { return lhs == rhs; }
};

struct CheckReport {
  std::vector<CheckRecord> records;
  int failures() const;
  bool ok() const { return failures() == 0; }
};

// Collapse: the boundary of every (inputs, outputs) component vanishes on each
// codimension-one cell. Breaking: on every top cell, for one-dimensional
// fibres,
//   sum_m K(p; m) d(m -> o) = (-1)^{d n_in} sum_i (-1)^{sum_{j<i} (|p_j| + d)} sum_q d(p_i -> q) K(p[i <- q]; o).
// Needs the complete chain (every input tuple) and at most one output.
CheckReport verify_cochain_map(const ModuliComplex& cx, const MorseComplex& mc, const OperationChain& chain);

struct CupProduct {
  std::vector<int> degree_one;  // generators of index 1
  std::vector<int> top;         // generators of index d
  // [i][j][t]: coefficient of top[t] in degree_one[i] . degree_one[j]
  std::vector<std::vector<std::vector<long long>>> table;
};

CupProduct cup_product(const MorseComplex& mc, const OperationOptions& opt = {});
// From an already computed tripod chain.
CupProduct cup_product(const OperationChain& tripod, const MorseComplex& mc);

// Exact linear algebra on Morse cochains, for cohomology-level comparisons.
using Cochain = std::vector<Rational>;
std::vector<Cochain> cocycle_basis(const MorseComplex& mc);
bool is_coboundary(const MorseComplex& mc, const Cochain& v);
// sum over i, j of a_i b_j times the tripod coefficients K(i, j; o)
Cochain tripod_product(const OperationChain& tripod, const Cochain& a, const Cochain& b);
// The products of every pair of cocycles agree modulo coboundaries.
bool same_cohomology_product(const OperationChain& x, const OperationChain& y, const MorseComplex& mc);

struct GlueRecord {
  std::vector<int> inputs;
  std::vector<int> outputs;
  ProductChain glued;      // transfer of the glued operation
  ProductChain composite;  // first operation followed by the second
  bool pass() const { return glued == composite; }
};

struct GlueReport {
  std::vector<GlueRecord> records;
  int failures() const;
  bool ok() const { return failures() == 0; }
};

// Compares transfer(F_glued) with F_second after F_first on every input tuple
// of the glued surface, with the same Morse data on both sides.
GlueReport verify_gluing(const ModuliComplex& glued, const ModuliComplex& first, const ModuliComplex& second,
                         const Pairing& pairing, const MorseComplex& mc, const OperationOptions& opt = {});
// Same, reusing computed chains.
GlueReport verify_gluing(const GlueData& gd, const OperationChain& glued, const OperationChain& first,
                         const OperationChain& second, const MorseComplex& mc);

// Tab-separated rows: inputs, cell, coefficient, outputs.
std::string format_table(const OperationChain& chain);
std::string format_report(const CheckReport& r);
std::string format_report(const GlueReport& r);

}  // namespace fgo
