#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fgo/morse.hpp"
#include "fgo/orientation.hpp"
#include "fgo/ribbon_graph.hpp"

namespace fgo {

// |p-| - |p+| + d chi - d n- + |E|, with |p| the sum of Morse indices.
// p_in lists the incoming legs by label, p_out the outgoing ones.
int expected_dimension(const RibbonGraph& g, const std::vector<int>& p_in, const std::vector<int>& p_out, int d);

// Sum over j of s^j F_j(x), each F_j a vector-valued Fourier polynomial with
// modes |k_i| <= 1. Time s runs over [0, 1].
struct TimeFourierField {
  int dim = 1;
  std::vector<std::vector<int>> modes;
  std::vector<std::vector<Vec>> cos_coef;  // [power][mode]
  std::vector<std::vector<Vec>> sin_coef;

  void eval(double s, const Vec& x, Vec& v, Mat* jac) const;
  // sup over s in [0, 1] and x of |v|, bounded termwise
  double bound() const;
  bool operator==(const TimeFourierField&) const;
};

struct PerturbationDatum {
  unsigned long long seed = 0;
  double bound = 0.05;
  int dim = 2;
  std::map<std::string, TimeFourierField> fields;  // persistent key -> field

  // Per internal edge, aligned with RibbonGraph::internal_edges().
  std::vector<std::string> edge_keys;
  std::vector<int> canonical_source;  // half-edge the stored field flows away from
  std::vector<char> self_paired;      // both orientations share one key: field odd about 1/2

  // l * x_e(t, .) on [0, 1] for internal edge i traversed from half-edge src.
  // Reversal gives -x_e(1 - t, .).
  VectorField internal_field(int i, int src, double length) const;
  // eps grad f + sigma(t) x_leg(|t|, .), t in [-2, 0] (incoming) or [0, 2].
  VectorField leg_field(int label, const MorseFunction& f, double eps) const;
};

// Edge keys: the leg labels met along the faces on either side of the edge,
// so they survive collapses of other edges. Legs are keyed by label.
std::string half_edge_signature(const RibbonGraph& g, int h);
PerturbationDatum build_perturbation(unsigned long long seed, const RibbonGraph& g, int d, double bound = 0.05);

// sigma(t): 1 on |t| <= 1, 0 on |t| >= 2.
double cutoff(double t);

struct SolveOptions {
  int grid = 0;          // starts per axis for the first vertex; 0 picks 32 (d <= 2) or 10
  int max_starts = 48;  // Newton runs, best initial residuals first
  double max_start_residual = 0.25;
  double r0 = 1e-3;
  double residual_tol = 1e-10;
  double dedup = 1e-4;
  double cluster = 1e-3;  // distinct solutions closer than this are unresolved
  double max_condition = 1e8;
  int jobs = 0;
  FlowOptions flow;
};

struct FlowGraphSolution {
  std::vector<double> lengths;          // per internal edge
  std::vector<Vec> vertex_positions;    // per internal vertex, internal_vertices() order
  std::vector<Vec> chart_params;        // per leg label
  int sign = 1;                         // relative to the reference orientation data
  double residual = 0;
  double condition = 0;
};

// Rigid flow-graph problem for one graph, one assignment of generators to legs
// and fixed internal edge lengths. mc and pert must outlive the system.
class FlowGraphSystem {
 public:
  FlowGraphSystem(const RibbonGraph& g, const std::vector<int>& leg_generator, const MorseComplex& mc,
                  const PerturbationDatum& pert, std::vector<double> lengths, const SolveOptions& opt = {});

  int unknowns() const { return n_unknowns_; }
  int equations() const { return n_equations_; }
  int expected() const;  // expected_dimension
  bool rigid() const { return expected() == g_.num_edges() && n_unknowns_ == n_equations_; }
  FlowGrading grading() const;

  std::vector<FlowGraphSolution> solve() const;
  // Residual and Jacobian in the layout given by od; rows per edge in
  // od.edge_order, columns per vertex in od.vertex_order then charts by label.
  void evaluate(const FlowGraphSolution& s, const OrientationData& od, Vec& r, Mat* jac) const;
  int sign(const FlowGraphSolution& s, const OrientationData& od) const;
  // Re-integrates every edge at tightened tolerance.
  double verify(const FlowGraphSolution& s, const FlowOptions& tight) const;

  const RibbonGraph& graph() const { return g_; }

  struct Impl;  // opaque

 private:
  std::shared_ptr<const Impl> impl_;
  RibbonGraph g_;
  int n_unknowns_ = 0, n_equations_ = 0;
};

// Solutions signed by the reference orientation data.
std::vector<FlowGraphSolution> solve_rigid(const RibbonGraph& g, const std::vector<int>& leg_generator,
                                           const MorseComplex& mc, const PerturbationDatum& pert,
                                           const std::vector<double>& lengths, const SolveOptions& opt = {});
int solution_sign(const FlowGraphSystem& sys, const FlowGraphSolution& sol, const OrientationData& od);

struct Stratum {
  enum class Kind { IncomingBreak, OutgoingBreak, Collapse } kind;
  int where;  // leg label, or half-edge of the collapsed edge
  int from;   // generator indices for breakings
  int to;
  std::string describe() const;
};

// Codimension-one strata: breakings at each leg towards generators of
// adjacent index, and collapses of non-loop internal edges.
std::vector<Stratum> boundary_strata(const RibbonGraph& g, const std::vector<int>& leg_generator,
                                     const MorseComplex& mc);

}  // namespace fgo
