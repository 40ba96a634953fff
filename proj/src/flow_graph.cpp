#include "fgo/flow_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "morse_internal.hpp"
#include "parallel.hpp"

namespace fgo {

using namespace detail;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

int surface_chi(const RibbonGraph& g) { return g.euler_characteristic(); }

}  // namespace

int expected_dimension(const RibbonGraph& g, const std::vector<int>& p_in, const std::vector<int>& p_out, int d) {
  if (static_cast<int>(p_in.size()) != g.num_in() || static_cast<int>(p_out.size()) != g.num_out())
    throw GraphError("critical tuples do not match the legs");
  int sin = 0, sout = 0;
  for (int i : p_in) sin += i;
  for (int i : p_out) sout += i;
  return sout - sin + d * surface_chi(g) - d * g.num_out() + g.num_edges();
}

// ---------------------------------------------------------------- perturbation

void TimeFourierField::eval(double s, const Vec& x, Vec& v, Mat* jac) const {
  v = Vec::Zero(dim);
  if (jac) *jac = Mat::Zero(dim, dim);
  double sp = 1;
  for (std::size_t j = 0; j < cos_coef.size(); ++j, sp *= s) {
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double ph = 0;
      for (int i = 0; i < dim; ++i) ph += modes[m][i] * x[i];
      ph *= kTwoPi;
      double c = std::cos(ph), sn = std::sin(ph);
      v += sp * (c * cos_coef[j][m] + sn * sin_coef[j][m]);
      if (jac) {
        Vec g = sp * kTwoPi * (-sn * cos_coef[j][m] + c * sin_coef[j][m]);
        for (int i = 0; i < dim; ++i)
          if (modes[m][i]) jac->col(i) += modes[m][i] * g;
      }
    }
  }
}

double TimeFourierField::bound() const {
  double b = 0;
  for (std::size_t j = 0; j < cos_coef.size(); ++j)
    for (std::size_t m = 0; m < modes.size(); ++m) b += cos_coef[j][m].norm() + sin_coef[j][m].norm();
  return b;
}

bool TimeFourierField::operator==(const TimeFourierField& o) const {
  if (dim != o.dim || modes != o.modes || cos_coef.size() != o.cos_coef.size()) return false;
  for (std::size_t j = 0; j < cos_coef.size(); ++j)
    for (std::size_t m = 0; m < modes.size(); ++m)
      if (cos_coef[j][m] != o.cos_coef[j][m] || sin_coef[j][m] != o.sin_coef[j][m]) return false;
  return true;
}

double cutoff(double t) { return 1 - schedule(2 * std::abs(t) - 3); }

namespace {

TimeFourierField random_field(unsigned long long seed, const std::string& key, int d, double bound) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (unsigned char c : key) words.push_back(c);
  std::seed_seq seq(words.begin(), words.end());
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  TimeFourierField f;
  f.dim = d;
  std::vector<int> k(d, -1);
  for (;;) {
    // one of each pair +-k, plus k = 0
    auto first = std::find_if(k.begin(), k.end(), [](int x) { return x != 0; });
    if (first == k.end() || *first > 0) f.modes.push_back(k);
    int i = 0;
    while (i < d && k[i] == 1) k[i++] = -1;
    if (i == d) break;
    ++k[i];
  }
  const int powers = 3;
  f.cos_coef.assign(powers, {});
  f.sin_coef.assign(powers, {});
  for (int j = 0; j < powers; ++j)
    for (auto& m : f.modes) {
      bool zero = std::all_of(m.begin(), m.end(), [](int x) { return x == 0; });
      Vec c(d), s(d);
      for (int i = 0; i < d; ++i) c[i] = u(rng);
      for (int i = 0; i < d; ++i) s[i] = zero ? 0.0 : u(rng);
      f.cos_coef[j].push_back(c);
      f.sin_coef[j].push_back(s);
    }
  double scale = bound / f.bound();
  for (int j = 0; j < powers; ++j)
    for (std::size_t m = 0; m < f.modes.size(); ++m) {
      f.cos_coef[j][m] *= scale;
      f.sin_coef[j][m] *= scale;
    }
  return f;
}

std::string leg_key(int label) { return "leg:" + std::to_string(label); }

}  // namespace

std::string half_edge_signature(const RibbonGraph& g, int h) {
  std::ostringstream os;
  int x = h;
  do {
    int l = g.leg_at(x);
    if (l >= 0) os << g.legs[l].label << '.';
    x = g.sigma[g.iota[x]];
  } while (x != h);
  return os.str();
}

PerturbationDatum build_perturbation(unsigned long long seed, const RibbonGraph& g, int d, double bound) {
  PerturbationDatum p;
  p.seed = seed;
  p.bound = bound;
  p.dim = d;
  std::map<std::string, int> seen;
  for (int e : g.internal_edges()) {
    std::string a = half_edge_signature(g, e), b = half_edge_signature(g, g.iota[e]);
    std::string key = "e:" + std::min(a, b) + "/" + std::max(a, b);
    int n = seen[key]++;
    if (n) key += "#" + std::to_string(n);
    p.edge_keys.push_back(key);
    p.canonical_source.push_back(a <= b ? e : g.iota[e]);
    p.self_paired.push_back(a == b);
    p.fields[key] = random_field(seed, key, d, bound);
  }
  for (auto& l : g.legs) p.fields[leg_key(l.label)] = random_field(seed, leg_key(l.label), d, bound);
  return p;
}

VectorField PerturbationDatum::internal_field(int i, int src, double length) const {
  const TimeFourierField* x = &fields.at(edge_keys.at(i));
  bool odd = self_paired.at(i);
  double sgn = src == canonical_source.at(i) ? 1.0 : -1.0;
  return [x, odd, sgn, length](double t, const Vec& p, Vec& v, Mat* jac) {
    if (odd) {
      Vec v2;
      Mat j2;
      x->eval(t, p, v, jac);
      x->eval(1 - t, p, v2, jac ? &j2 : nullptr);
      v = 0.5 * length * (v - v2);
      if (jac) *jac = 0.5 * length * (*jac - j2);
      return;
    }
    x->eval(sgn > 0 ? t : 1 - t, p, v, jac);
    v *= sgn * length;
    if (jac) *jac *= sgn * length;
  };
}

VectorField PerturbationDatum::leg_field(int label, const MorseFunction& f, double eps) const {
  const TimeFourierField* x = &fields.at(leg_key(label));
  const MorseFunction* fp = &f;
  return [x, fp, eps](double t, const Vec& p, Vec& v, Mat* jac) {
    double c = cutoff(t);
    v = eps * fp->gradient(p);
    if (jac) *jac = eps * fp->hessian(p);
    if (c == 0) return;
    Vec w;
    Mat jw;
    x->eval(std::min(1.0, std::abs(t) / 2), p, w, jac ? &jw : nullptr);
    v += c * w;
    if (jac) *jac += c * jw;
  };
}

// ---------------------------------------------------------------- system

struct FlowGraphSystem::Impl {
  struct LegSlot {
    int label;
    Dir dir;
    int generator;
    int vertex;  // internal vertex slot
    int offset;  // first chart column, relative to the chart block
    int dim;
    ManifoldChart chart;
    double rate = 0;  // |eigenvalue| along a one-dimensional chart
    VectorField field;
  };

  const MorseComplex* mc;
  const PerturbationDatum* pert;
  std::vector<double> lengths;
  SolveOptions opt;
  int d;
  double eps;
  double tmax;
  std::vector<int> internal;               // internal edges
  std::map<int, int> vertex_slot;          // vertex id -> slot
  std::map<int, int> leg_slot;             // leg half-edge -> slot
  std::vector<LegSlot> legs;               // by label
  int chart_cols = 0;
  OrientationData ref;
};

namespace {

using LegSlot = FlowGraphSystem::Impl::LegSlot;

// One-dimensional charts are parametrized by flow time, a = sign * exp(rate * t),
// which agrees with the linear chart to first order and stays exact far out.
std::pair<Vec, Mat> chart_eval(const LegSlot& leg, const Vec& a, double r0, const FlowOptions& fo) {
  const auto& ch = leg.chart;
  if (ch.dim() != 1 || ch.free) return ch.eval(a, fo);
  double s = a[0];
  if (s == 0) return {ch.base, Mat::Zero(ch.base.size(), 1)};
  Vec start = ch.base + r0 * (s > 0 ? 1.0 : -1.0) * ch.frame.col(0);
  double t = ch.dir * (ch.tc + std::log(std::abs(s)) / leg.rate);
  auto res = flow(start, gradient_field(*ch.f), 0.0, t, fo);
  Mat dz = ch.f->gradient(res.x) * (ch.dir / (leg.rate * s));
  return {res.x, dz};
}

std::vector<std::pair<Vec, Vec>> leg_samples(const LegSlot& leg, double r0, const FlowOptions& fo) {
  std::vector<std::pair<Vec, Vec>> out;
  const auto& ch = leg.chart;
  int m = ch.dim();
  if (ch.point || ch.free) return out;
  std::vector<Vec> params;
  if (m == 1) {
    for (int sgn : {1, -1})
      for (int i = 0; i < 160; ++i) params.push_back(Vec::Constant(1, sgn * std::pow(10.0, -2 + 8.0 * i / 159)));
  } else {
    params = chart_samples(ch, 4.0, 24);
  }
  for (auto& a : params) out.push_back({a, chart_eval(leg, a, r0, fo).first});
  return out;
}

// Condition number after normalizing columns, so chart scalings do not count.
double scaled_condition(Mat j) {
  for (int c = 0; c < j.cols(); ++c)
    if (j.col(c).norm() > 0) j.col(c) /= j.col(c).norm();
  return condition(j);
}

int koszul_factor(const RibbonGraph& g, const OrientationData& od, const FlowGrading& gr) {
  std::map<int, int> k;
  for (int e : od.edge_order) {
    int l = g.leg_at(e) >= 0 ? g.leg_at(e) : g.leg_at(g.iota[e]);
    if (l < 0) k[e] = gr.d + 1;
    else {
      int ind = gr.leg_index.at(g.legs[l].label);
      k[e] = g.legs[l].dir == Dir::In ? gr.d - ind + 1 : ind + 1;
    }
  }
  int s = 1;
  for (std::size_t i = 0; i < od.edge_order.size(); ++i)
    for (std::size_t j = i + 1; j < od.edge_order.size(); ++j) {
      int a = od.edge_order[i], b = od.edge_order[j];
      if (a > b && (k[a] * k[b] + gr.d) % 2) s = -s;
    }
  return s;
}

}  // namespace

FlowGraphSystem::FlowGraphSystem(const RibbonGraph& g, const std::vector<int>& leg_generator, const MorseComplex& mc,
                                 const PerturbationDatum& pert, std::vector<double> lengths, const SolveOptions& opt)
    : g_(g) {
  auto impl = std::make_shared<Impl>();
  impl->mc = &mc;
  impl->pert = &pert;
  impl->opt = opt;
  impl->d = mc.f.dim;
  if (pert.dim != impl->d) throw MorseError(MorseError::Kind::Precondition, "perturbation has the wrong dimension");
  impl->eps = 0.5 / hessian_bound(mc.f);
  impl->tmax = horizon(mc.generators);
  impl->internal = g.internal_edges();
  if (lengths.size() != impl->internal.size())
    throw MorseError(MorseError::Kind::Precondition, "one length per internal edge is required");
  for (double l : lengths)
    if (!(l > 0)) throw MorseError(MorseError::Kind::Precondition, "internal edge lengths must be positive");
  impl->lengths = std::move(lengths);
  if (leg_generator.size() != g.legs.size())
    throw MorseError(MorseError::Kind::Precondition, "one generator per leg is required");
  impl->ref = reference_orientation(g);
  auto vs = g.vertices();
  auto iv = g.internal_vertices();
  if (iv.empty()) throw MorseError(MorseError::Kind::Precondition, "graph has no internal vertex");
  for (std::size_t i = 0; i < iv.size(); ++i) impl->vertex_slot[vs[iv[i]][0]] = static_cast<int>(i);
  int d = impl->d;
  int offset = 0;
  for (auto& l : g.legs) {
    int gen = leg_generator.at(l.label);
    if (gen < 0 || gen >= static_cast<int>(mc.generators.size()))
      throw MorseError(MorseError::Kind::Precondition, "generator index out of range");
    const auto& cp = mc.generators[gen];
    int other = g.iota[l.half_edge];
    if (g.leg_at(other) >= 0) throw MorseError(MorseError::Kind::Precondition, "two legs joined directly");
    Impl::LegSlot s{l.label,
                    l.dir,
                    gen,
                    impl->vertex_slot.at(vertex_id(g, other)),
                    offset,
                    0,
                    make_chart(mc.f, cp, l.dir == Dir::In ? +1 : -1, opt.r0),
                    0.0,
                    pert.leg_field(l.label, mc.f, impl->eps)};
    s.dim = s.chart.dim();
    if (s.dim == 1 && !s.chart.free) {
      const Vec& ev = cp.eigenvalues;
      s.rate = l.dir == Dir::In ? ev[ev.size() - 1] : -ev[0];
    }
    offset += s.dim;
    impl->leg_slot[l.half_edge] = static_cast<int>(impl->legs.size());
    impl->legs.push_back(std::move(s));
  }
  impl->chart_cols = offset;
  n_unknowns_ = d * static_cast<int>(iv.size()) + offset;
  n_equations_ = d * g.num_edges();
  impl_ = impl;
}

FlowGrading FlowGraphSystem::grading() const {
  FlowGrading gr;
  gr.d = impl_->d;
  for (auto& l : impl_->legs) gr.leg_index.push_back(impl_->mc->generators[l.generator].index);
  return gr;
}

int FlowGraphSystem::expected() const {
  std::vector<int> pin, pout;
  for (auto& l : impl_->legs) (l.dir == Dir::In ? pin : pout).push_back(impl_->mc->generators[l.generator].index);
  return expected_dimension(g_, pin, pout, impl_->d);
}

namespace {

void evaluate_impl(const RibbonGraph& g, const FlowGraphSystem::Impl& im, const FlowGraphSolution& s,
                   const OrientationData& od, Vec& r, Mat* jac, const FlowOptions& fo) {
  int d = im.d;
  int nv = static_cast<int>(s.vertex_positions.size());
  int ne = static_cast<int>(od.edge_order.size());
  std::map<int, int> vcol;  // vertex slot -> column block
  for (int i = 0; i < nv; ++i) vcol[im.vertex_slot.at(od.vertex_order.at(i))] = i;
  int cbase = d * nv;
  r = Vec::Zero(d * ne);
  if (jac) *jac = Mat::Zero(d * ne, cbase + im.chart_cols);
  for (int row = 0; row < ne; ++row) {
    int e = od.edge_order[row];
    int rb = d * row;
    auto it = im.leg_slot.find(e);
    if (it == im.leg_slot.end()) it = im.leg_slot.find(g.iota[e]);
    if (it == im.leg_slot.end()) {
      int i = static_cast<int>(std::find(im.internal.begin(), im.internal.end(), e) - im.internal.begin());
      int src = od.edge_source.at(i);
      int a = im.vertex_slot.at(vertex_id(g, src)), b = im.vertex_slot.at(vertex_id(g, g.iota[src]));
      auto res = flow(s.vertex_positions[a], im.pert->internal_field(i, src, im.lengths[i]), 0.0, 1.0, fo);
      r.segment(rb, d) = torus_delta(res.x, s.vertex_positions[b]);
      if (jac) {
        jac->block(rb, d * vcol[a], d, d) += res.jacobian;
        jac->block(rb, d * vcol[b], d, d) -= Mat::Identity(d, d);
      }
      continue;
    }
    const auto& leg = im.legs[it->second];
    const Vec& v = s.vertex_positions[leg.vertex];
    int cc = cbase + leg.offset;
    auto [z, dz] = chart_eval(leg, s.chart_params[leg.label], im.opt.r0, fo);
    if (leg.dir == Dir::In) {
      auto res = flow(z, leg.field, -2.0, 0.0, fo);
      r.segment(rb, d) = torus_delta(res.x, v);
      if (jac) {
        if (leg.dim) jac->block(rb, cc, d, leg.dim) += res.jacobian * dz;
        jac->block(rb, d * vcol[leg.vertex], d, d) -= Mat::Identity(d, d);
      }
    } else {
      auto res = flow(v, leg.field, 0.0, 2.0, fo);
      r.segment(rb, d) = torus_delta(res.x, z);
      if (jac) {
        jac->block(rb, d * vcol[leg.vertex], d, d) += res.jacobian;
        if (leg.dim) jac->block(rb, cc, d, leg.dim) -= dz;
      }
    }
  }
}

}  // namespace

void FlowGraphSystem::evaluate(const FlowGraphSolution& s, const OrientationData& od, Vec& r, Mat* jac) const {
  evaluate_impl(g_, *impl_, s, od, r, jac, impl_->opt.flow);
}

int FlowGraphSystem::sign(const FlowGraphSolution& s, const OrientationData& od) const {
  Vec r;
  Mat j;
  evaluate(s, od, r, &j);
  if (j.rows() != j.cols()) throw MorseError(MorseError::Kind::Precondition, "flow-graph system is not square");
  if (scaled_condition(j) > impl_->opt.max_condition)
    throw MorseError(MorseError::Kind::NonTransverse, "singular flow-graph Jacobian");
  return det_sign(j) * koszul_factor(g_, od, grading());
}

double FlowGraphSystem::verify(const FlowGraphSolution& s, const FlowOptions& tight) const {
  Vec r;
  evaluate_impl(g_, *impl_, s, impl_->ref, r, nullptr, tight);
  return r.norm();
}

std::vector<FlowGraphSolution> FlowGraphSystem::solve() const {
  const Impl& im = *impl_;
  int d = im.d;
  if (expected() < g_.num_edges()) return {};  // negative fiber dimension: empty
  if (!rigid()) throw MorseError(MorseError::Kind::Precondition, "fiber over the cell is not zero-dimensional");
  const auto& fo = im.opt.flow;
  int nv = static_cast<int>(im.vertex_slot.size());

  // spanning trees over internal edges, one per root slot
  struct TreeStep {
    int edge;  // index into internal
    bool forward;
    int from, to;
  };
  std::vector<std::vector<TreeStep>> trees(nv);
  for (int root = 0; root < nv; ++root) {
    std::vector<char> seen(nv, 0);
    seen[root] = 1;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t i = 0; i < im.internal.size(); ++i) {
        int src = im.ref.edge_source[i];
        int a = im.vertex_slot.at(vertex_id(g_, src)), b = im.vertex_slot.at(vertex_id(g_, g_.iota[src]));
        auto& t = trees[root];
        if (seen[a] && !seen[b]) t.push_back({static_cast<int>(i), true, a, b}), seen[b] = 1, grew = true;
        else if (seen[b] && !seen[a]) t.push_back({static_cast<int>(i), false, b, a}), seen[a] = 1, grew = true;
      }
    }
  }

  // seeds only rank starting points; a loose tolerance is enough
  FlowOptions coarse{1e-7, 1e-7, fo.max_steps};
  // chart samples, for matching seeds to chart parameters
  std::vector<std::vector<std::pair<Vec, Vec>>> samples;
  for (auto& leg : im.legs) samples.push_back(leg_samples(leg, im.opt.r0, coarse));

  // Root positions: a grid for the first vertex, plus the images of the chart
  // samples at the vertex of their leg. The latter resolve the fine structure
  // near critical points where transported charts accumulate.
  std::vector<std::pair<int, Vec>> roots;
  int grid = im.opt.grid > 0 ? im.opt.grid : (d <= 2 ? 32 : 10);
  {
    long total = 1;
    for (int i = 0; i < d; ++i) total *= grid;
    for (long idx = 0; idx < total; ++idx) {
      Vec x(d);
      long r = idx;
      for (int i = 0; i < d; ++i) {
        x[i] = (r % grid + 0.5) / grid;
        r /= grid;
      }
      roots.push_back({0, x});
    }
  }
  for (std::size_t li = 0; li < im.legs.size(); ++li) {
    const auto& leg = im.legs[li];
    for (auto& [p, z] : samples[li]) {
      Vec v = leg.dir == Dir::In ? flow(z, leg.field, -2.0, 0.0, coarse).x : flow(z, leg.field, 2.0, 0.0, coarse).x;
      roots.push_back({leg.vertex, torus_reduce(v)});
    }
  }

  auto seed_at = [&](int root, const Vec& x) {
    FlowGraphSolution s;
    s.lengths = im.lengths;
    s.vertex_positions.assign(nv, Vec::Zero(d));
    s.vertex_positions[root] = x;
    for (auto& st : trees[root]) {
      int src = im.ref.edge_source[st.edge];
      auto field = im.pert->internal_field(st.edge, src, im.lengths[st.edge]);
      auto res = st.forward ? flow(s.vertex_positions[st.from], field, 0.0, 1.0, coarse)
                            : flow(s.vertex_positions[st.from], field, 1.0, 0.0, coarse);
      s.vertex_positions[st.to] = torus_reduce(res.x);
    }
    s.chart_params.assign(im.legs.size(), Vec());
    for (auto& leg : im.legs) {
      const Vec& v = s.vertex_positions[leg.vertex];
      Vec target = leg.dir == Dir::In ? flow(v, leg.field, 0.0, -2.0, coarse).x : flow(v, leg.field, 0.0, 2.0, coarse).x;
      Vec a(leg.dim);
      if (leg.chart.free) a = leg.chart.frame.transpose() * torus_delta(target, leg.chart.base);
      else if (!leg.chart.point) {
        double best = 1e300;
        for (auto& [p, z] : samples[&leg - im.legs.data()]) {
          double dist = torus_delta(z, target).norm();
          if (dist < best) best = dist, a = p;
        }
      }
      s.chart_params[leg.label] = a;
    }
    return s;
  };

  std::vector<std::pair<double, FlowGraphSolution>> starts(roots.size());
  parallel_for(static_cast<int>(roots.size()), im.opt.jobs, [&](int idx) {
    auto s = seed_at(roots[idx].first, roots[idx].second);
    Vec r;
    evaluate_impl(g_, im, s, im.ref, r, nullptr, coarse);
    starts[idx] = {r.norm(), std::move(s)};
  });
  std::stable_sort(starts.begin(), starts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  {
    // drop starts that repeat a better one: same chart branches, vertices within 2e-3
    auto same = [&](const FlowGraphSolution& a, const FlowGraphSolution& b) {
      for (int v = 0; v < nv; ++v)
        if (torus_delta(a.vertex_positions[v], b.vertex_positions[v]).norm() > 2e-3) return false;
      for (auto& leg : im.legs)
        if (leg.dim == 1 && !leg.chart.free && (a.chart_params[leg.label][0] > 0) != (b.chart_params[leg.label][0] > 0))
          return false;
      return true;
    };
    std::vector<std::pair<double, FlowGraphSolution>> kept;
    for (auto& st : starts) {
      if (static_cast<int>(kept.size()) >= im.opt.max_starts) break;
      bool dup = false;
      for (auto& k : kept)
        if (same(k.second, st.second)) dup = true;
      if (!dup) kept.push_back(std::move(st));
    }
    starts = std::move(kept);
  }
  while (!starts.empty() && starts.back().first > im.opt.max_start_residual) starts.pop_back();

  auto unpack = [&](FlowGraphSolution& s, const Vec& step) {
    for (int v = 0; v < nv; ++v) s.vertex_positions[v] = torus_reduce(s.vertex_positions[v] + step.segment(d * v, d));
    for (auto& leg : im.legs) s.chart_params[leg.label] += step.segment(d * nv + leg.offset, leg.dim);
  };
  // Vertex moves are capped at 0.2; transported chart parameters live on a
  // roughly logarithmic scale, so their moves are capped relative to |a|.
  auto step_scale = [&](const FlowGraphSolution& s, const Vec& step) {
    double k = 1;
    double vn = step.head(d * nv).norm();
    if (vn > 0.2) k = std::min(k, 0.2 / vn);
    for (auto& leg : im.legs) {
      if (!leg.dim) continue;
      double cn = step.segment(d * nv + leg.offset, leg.dim).norm();
      double cap = leg.chart.free ? 0.2 : 0.5 * std::max(1.0, s.chart_params[leg.label].norm());
      if (cn > cap) k = std::min(k, cap / cn);
    }
    return k;
  };
  auto valid = [&](const FlowGraphSolution& s) {
    for (auto& leg : im.legs) {
      const Vec& a = s.chart_params[leg.label];
      if (leg.chart.point) continue;
      if (leg.chart.free) {
        Vec z = chart_eval(leg, a, im.opt.r0, fo).first;
        const auto& cp = im.mc->generators[leg.generator];
        if (!converges_to(im.mc->f, z, cp, leg.dir == Dir::In ? -1 : +1, im.tmax, fo)) return false;
      } else if (leg.dim > 1 && (leg.chart.shrink * a).norm() > 0.05) {
        return false;  // outside the range where the linear chart is trusted
      }
    }
    return true;
  };

  std::vector<std::optional<FlowGraphSolution>> found(starts.size());
  parallel_for(static_cast<int>(starts.size()), im.opt.jobs, [&](int si) {
    FlowGraphSolution s = starts[si].second;
    Vec r;
    Mat j;
    // cheap integration until close, then the requested tolerance
    FlowOptions loose{std::max(fo.abs_tol, 1e-9), std::max(fo.rel_tol, 1e-9), fo.max_steps};
    bool fine = false;
    for (int it = 0; it < 40; ++it) {
      evaluate_impl(g_, im, s, im.ref, r, &j, fine ? fo : loose);
      double norm = r.norm();
      if (!fine && norm < 1e-6) {
        fine = true;
        evaluate_impl(g_, im, s, im.ref, r, &j, fo);
        norm = r.norm();
      }
      if (fine && norm < im.opt.residual_tol) {
        if (!valid(s)) return;
        s.residual = norm;
        s.condition = scaled_condition(j);
        found[si] = s;
        return;
      }
      if ((it >= 6 && norm > 1e-2) || (it >= 12 && norm > 1e-4)) return;
      Vec step = j.colPivHouseholderQr().solve(-r);
      if (!step.allFinite()) return;
      unpack(s, step * step_scale(s, step));
    }
  });

  std::vector<FlowGraphSolution> sols;
  auto distance = [&](const FlowGraphSolution& a, const FlowGraphSolution& b) {
    double m = 0;
    for (int v = 0; v < nv; ++v) m = std::max(m, torus_delta(a.vertex_positions[v], b.vertex_positions[v]).norm());
    return m;
  };
  for (auto& f : found) {
    if (!f) continue;
    bool dup = false;
    for (auto& s : sols) {
      double dist = distance(s, *f);
      if (dist < im.opt.dedup) dup = true;
      else if (dist < im.opt.cluster)
        throw MorseError(MorseError::Kind::Cluster, "unresolved cluster of flow-graph solutions");
    }
    if (dup) continue;
    if (f->condition > im.opt.max_condition)
      throw MorseError(MorseError::Kind::NonTransverse, "singular flow-graph Jacobian; try another seed");
    sols.push_back(*f);
  }
  for (auto& s : sols) s.sign = sign(s, im.ref);
  // deterministic order
  std::sort(sols.begin(), sols.end(), [](const FlowGraphSolution& a, const FlowGraphSolution& b) {
    for (std::size_t v = 0; v < a.vertex_positions.size(); ++v)
      for (int i = 0; i < a.vertex_positions[v].size(); ++i)
        if (a.vertex_positions[v][i] != b.vertex_positions[v][i])
          return a.vertex_positions[v][i] < b.vertex_positions[v][i];
    return false;
  });
  return sols;
}

std::vector<FlowGraphSolution> solve_rigid(const RibbonGraph& g, const std::vector<int>& leg_generator,
                                           const MorseComplex& mc, const PerturbationDatum& pert,
                                           const std::vector<double>& lengths, const SolveOptions& opt) {
  return FlowGraphSystem(g, leg_generator, mc, pert, lengths, opt).solve();
}

int solution_sign(const FlowGraphSystem& sys, const FlowGraphSolution& sol, const OrientationData& od) {
  return sys.sign(sol, od);
}

// ---------------------------------------------------------------- strata

std::string Stratum::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::IncomingBreak:
      os << "break-in leg " << where << ' ' << from << "->" << to;
      break;
    case Kind::OutgoingBreak:
      os << "break-out leg " << where << ' ' << from << "->" << to;
      break;
    case Kind::Collapse:
      os << "collapse edge " << where;
      break;
  }
  return os.str();
}

std::vector<Stratum> boundary_strata(const RibbonGraph& g, const std::vector<int>& leg_generator,
                                     const MorseComplex& mc) {
  std::vector<Stratum> out;
  for (auto& l : g.legs) {
    int p = leg_generator.at(l.label);
    int ind = mc.generators.at(p).index;
    for (int q = 0; q < static_cast<int>(mc.generators.size()); ++q) {
      int iq = mc.generators[q].index;
      // an incoming p breaks off p -> q with q one index up; an outgoing leg breaks q -> p
      if (l.dir == Dir::In && iq == ind + 1) out.push_back({Stratum::Kind::IncomingBreak, l.label, p, q});
      if (l.dir == Dir::Out && iq == ind - 1) out.push_back({Stratum::Kind::OutgoingBreak, l.label, q, p});
    }
  }
  for (int e : g.internal_edges())
    if (!g.is_loop(e)) out.push_back({Stratum::Kind::Collapse, e, -1, -1});
  return out;
}

}  // namespace fgo
