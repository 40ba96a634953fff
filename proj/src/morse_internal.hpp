#pragma once

// Helpers shared by the Morse engine and the flow-graph solver.

#include "fgo/morse.hpp"

namespace fgo::detail {

// Linear chart of the manifold of points flowing into (dir = -1, time reversed)
// or out of (dir = +1) cp, transported by the autonomous flow.
struct ManifoldChart {
  const MorseFunction* f;
  Vec base;
  Mat frame;   // oriented basis of the linear space
  Mat shrink;  // frame scaled by the inverse linear flow over time tc
  double tc = 0;
  int dir = 1;
  bool free = false;  // whole torus (dimension d)
  bool point = false;  // dimension 0

  int dim() const { return static_cast<int>(frame.cols()); }

  std::pair<Vec, Mat> eval(const Vec& a, const FlowOptions& fo) const {
    if (point) return {base, Mat(base.size(), 0)};
    if (free) return {base + frame * a, frame};
    auto r = flow(base + shrink * a, gradient_field(*f), 0.0, dir * tc, fo);
    return {r.x, r.jacobian * shrink};
  }
};


ManifoldChart make_chart(const MorseFunction& f, const CriticalPoint& cp, int dir, double r0);
std::vector<Vec> chart_samples(const ManifoldChart& ch, double radius, int n);

// Sum over terms of |second derivatives|; bounds the Hessian norm.
double hessian_bound(const MorseFunction& f);
// 25 / smallest |eigenvalue| over the critical points.
double horizon(const std::vector<CriticalPoint>& crit);
int det_sign(const Mat& m);
double condition(const Mat& m);

}  // namespace fgo::detail
