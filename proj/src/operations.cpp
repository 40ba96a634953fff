#include "fgo/operations.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fgo {

namespace {

std::vector<int> labels_with(const SurfaceType& s, Dir dir) {
  std::vector<int> out;
  auto dirs = s.directions();
  for (int l = 0; l < static_cast<int>(dirs.size()); ++l)
    if (dirs[l] == dir) out.push_back(l);
  return out;
}

// Every tuple of generators of the given length.
std::vector<std::vector<int>> all_tuples(int n_gen, int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(len, 0);
  while (true) {
    out.push_back(t);
    int i = len - 1;
    while (i >= 0 && ++t[i] == n_gen) t[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

std::vector<int> leg_assignment(const SurfaceType& s, const std::vector<int>& in, const std::vector<int>& out) {
  std::vector<int> gen(s.num_marks(), 0);
  auto li = labels_with(s, Dir::In), lo = labels_with(s, Dir::Out);
  if (li.size() != in.size() || lo.size() != out.size()) throw GraphError("critical tuples do not match the marks");
  for (std::size_t k = 0; k < li.size(); ++k) gen[li[k]] = in[k];
  for (std::size_t k = 0; k < lo.size(); ++k) gen[lo[k]] = out[k];
  return gen;
}

std::string tuple_str(const std::vector<int>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s.empty() ? "-" : s;
}

std::string rat_str(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace

int fiber_dimension(const SurfaceType& s, const MorseComplex& mc, const std::vector<int>& in,
                    const std::vector<int>& out) {
  int d = mc.f.dim, sum = 0;
  for (int p : out) sum += mc.generators.at(p).index;
  for (int p : in) sum -= mc.generators.at(p).index;
  return sum + d * s.chi() - d * s.n_out();
}

Rational OperationChain::coefficient(const std::vector<int>& in, int cell, const std::vector<int>& out) const {
  for (auto& t : terms)
    if (t.cell == cell && t.inputs == in && t.outputs == out) return t.coefficient;
  return 0;
}

CellularChain OperationChain::component(const std::vector<int>& in, const std::vector<int>& out) const {
  CellularChain c;
  c.det_degree = det_degree;
  for (auto& t : terms)
    if (t.inputs == in && t.outputs == out) c.add(t.cell, t.coefficient);
  return c;
}

Rational cell_coefficient(const ModuliComplex& cx, int cell_index, const MorseComplex& mc,
                          const std::vector<int>& in, const std::vector<int>& out, const OperationOptions& opt,
                          long* solved) {
  const Cell& cell = cx.cells.at(cell_index);
  if (cell.codim != 0 || cell.degenerate) return 0;
  const RibbonGraph& g = cell.graph;
  int d = mc.f.dim;
  auto pert = build_perturbation(opt.seed, g, d);
  std::vector<double> lengths(g.internal_edges().size(), opt.length);
  FlowGraphSystem sys(g, leg_assignment(cx.surface, in, out), mc, pert, lengths, opt.solve);
  if (!sys.rigid()) return 0;
  if (solved) ++*solved;
  auto sols = sys.solve();
  // solution_sign carries a Koszul normalisation against sorted edge ids;
  // the cell coefficient uses the bare determinant sign instead.
  OrientationData sorted = cell.ref;
  std::sort(sorted.edge_order.begin(), sorted.edge_order.end());
  int strip = relabel_sign(g, cell.ref, sorted, SignLevel::Flow, sys.grading());
  long total = 0;
  for (auto& s : sols) total += sys.sign(s, cell.ref) * strip;
  if (d % 2 == 0) {
    auto nat = fundamental_chain(cx).terms;
    total *= nat.at(cell_index).numerator();
  }
  return Rational(total, cell.aut_order);
}

OperationChain operation_chain(const ModuliComplex& cx, const MorseComplex& mc,
                               const std::vector<std::vector<int>>& p_plus, const OperationOptions& opt) {
  OperationChain ch;
  ch.surface = cx.surface;
  ch.d = mc.f.dim;
  ch.det_degree = cx.det_degree();
  int n = static_cast<int>(mc.generators.size());
  ch.input_tuples = p_plus.empty() ? all_tuples(n, cx.surface.n_in()) : p_plus;
  auto outs = all_tuples(n, cx.surface.n_out());
  for (auto& in : ch.input_tuples)
    for (auto& out : outs) {
      int fd = fiber_dimension(cx.surface, mc, in, out);
      if (fd < 0) continue;
      for (int c = 0; c < static_cast<int>(cx.cells.size()); ++c) {
        const Cell& cell = cx.cells[c];
        if (cell.codim != 0 || cell.degenerate) continue;
        if (fd > 0) {
          ch.symbolic.push_back({in, c, out, fd});
          continue;
        }
        Rational k = cell_coefficient(cx, c, mc, in, out, opt, &ch.solved);
        if (k.numerator() != 0) ch.terms.push_back({in, c, k, out});
      }
    }
  std::sort(ch.terms.begin(), ch.terms.end(), [](const OperationTerm& a, const OperationTerm& b) {
    return std::tie(a.inputs, a.outputs, a.cell) < std::tie(b.inputs, b.outputs, b.cell);
  });
  return ch;
}

int CheckReport::failures() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(), [](auto& r) { return !r.pass(); }));
}

int GlueReport::failures() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(), [](auto& r) { return !r.pass(); }));
}

CheckReport verify_cochain_map(const ModuliComplex& cx, const MorseComplex& mc, const OperationChain& chain) {
  CheckReport rep;
  int n = static_cast<int>(mc.generators.size());
  int d = mc.f.dim;
  int n_in = cx.surface.n_in();
  if (static_cast<int>(chain.input_tuples.size()) != static_cast<int>(all_tuples(n, n_in).size()))
    throw MorseError(MorseError::Kind::Precondition, "cochain check needs every input tuple");
  if (cx.surface.n_out() > 1)
    throw MorseError(MorseError::Kind::Precondition, "breaking identity is implemented for one output");
  auto deg = mc.degrees();
  const auto& cod = mc.codifferential;

  std::map<std::pair<std::vector<int>, std::vector<int>>, CellularChain> comps;
  for (auto& t : chain.terms) {
    auto& c = comps[{t.inputs, t.outputs}];
    c.det_degree = chain.det_degree;
    c.add(t.cell, t.coefficient);
  }

  // collapse strata
  for (auto& [key, c] : comps) {
    auto b = boundary(c, cx);
    std::map<int, Rational> by_cell;  // every face touched, cancelled or not
    for (auto& [src, coeff] : c.terms)
      for (auto& a : cx.cells[src].attachments) by_cell[a.target] = 0;
    for (auto& [cell, coeff] : b.terms) by_cell[cell] = coeff;
    for (auto& [cell, coeff] : by_cell) rep.records.push_back({"collapse", key.first, cell, key.second, coeff, 0});
  }

  // breaking strata, top cell by top cell
  auto K = [&](const std::vector<int>& in, int cell, const std::vector<int>& out) {
    return chain.coefficient(in, cell, out);
  };
  auto outs = all_tuples(n, cx.surface.n_out());
  for (int c = 0; c < static_cast<int>(cx.cells.size()); ++c) {
    if (cx.cells[c].codim != 0 || cx.cells[c].degenerate) continue;
    for (auto& in : chain.input_tuples)
      for (auto& out : outs) {
        if (fiber_dimension(cx.surface, mc, in, out) != 1) continue;
        Rational lhs = 0, rhs = 0;
        for (std::size_t j = 0; j < out.size(); ++j)
          for (int m = 0; m < n; ++m) {
            if (!cod[out[j]][m]) continue;
            auto o2 = out;
            o2[j] = m;
            lhs += K(in, c, o2) * Rational(cod[out[j]][m]);
          }
        int shift = 0;
        for (int i = 0; i < n_in; ++i) {
          int s = ((d * n_in + shift) % 2) ? -1 : 1;
          for (int q = 0; q < n; ++q) {
            if (!cod[q][in[i]]) continue;
            auto i2 = in;
            i2[i] = q;
            rhs += K(i2, c, out) * Rational(s * cod[q][in[i]]);
          }
          shift += deg[in[i]] + d;
        }
        if (lhs.numerator() != 0 || rhs.numerator() != 0) rep.records.push_back({"breaking", in, c, out, lhs, rhs});
      }
  }
  return rep;
}

namespace {

CupProduct cup_generators(const MorseComplex& mc) {
  CupProduct cp;
  for (int i = 0; i < static_cast<int>(mc.generators.size()); ++i) {
    if (mc.generators[i].index == 1) cp.degree_one.push_back(i);
    if (mc.generators[i].index == mc.f.dim) cp.top.push_back(i);
  }
  return cp;
}

void fill_cup(CupProduct& cp, const OperationChain& ch) {
  std::size_t k = cp.degree_one.size();
  cp.table.assign(k, std::vector<std::vector<long long>>(k, std::vector<long long>(cp.top.size(), 0)));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < cp.top.size(); ++t) {
        Rational total = 0;
        for (auto& term : ch.terms)
          if (term.inputs == std::vector<int>{cp.degree_one[i], cp.degree_one[j]} &&
              term.outputs == std::vector<int>{cp.top[t]})
            total += term.coefficient;
        if (total.denominator() != 1) throw MorseError(MorseError::Kind::Precondition, "fractional cup coefficient");
        cp.table[i][j][t] = total.numerator();
      }
}

}  // namespace

CupProduct cup_product(const MorseComplex& mc, const OperationOptions& opt) {
  CupProduct cp = cup_generators(mc);
  auto cx = build_complex(SurfaceType::disk(2, 1), mc.f.dim);
  std::vector<std::vector<int>> ins;
  for (int a : cp.degree_one)
    for (int b : cp.degree_one) ins.push_back({a, b});
  fill_cup(cp, operation_chain(cx, mc, ins, opt));
  return cp;
}

CupProduct cup_product(const OperationChain& tripod, const MorseComplex& mc) {
  if (!(tripod.surface == SurfaceType::disk(2, 1)))
    throw MorseError(MorseError::Kind::Precondition, "cup product needs the tripod chain");
  CupProduct cp = cup_generators(mc);
  fill_cup(cp, tripod);
  return cp;
}

namespace {

// Row echelon form in place; returns the pivot columns.
std::vector<int> echelon(std::vector<Cochain>& rows, std::size_t cols) {
  std::vector<int> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t k = r;
    while (k < rows.size() && rows[k][c].numerator() == 0) ++k;
    if (k == rows.size()) continue;
    std::swap(rows[r], rows[k]);
    Rational inv = Rational(1) / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c].numerator() == 0) continue;
      Rational f = rows[i][c];
      for (std::size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
    }
    piv.push_back(static_cast<int>(c));
    ++r;
  }
  rows.resize(r);
  return piv;
}

int rank_of(std::vector<Cochain> rows, std::size_t cols) { return static_cast<int>(echelon(rows, cols).size()); }

}  // namespace

std::vector<Cochain> cocycle_basis(const MorseComplex& mc) {
  std::size_t n = mc.generators.size();
  std::vector<Cochain> rows;
  for (auto& r : mc.codifferential) {
    Cochain v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = r[j];
    rows.push_back(v);
  }
  auto piv = echelon(rows, n);
  std::vector<char> is_piv(n, 0);
  for (int c : piv) is_piv[c] = 1;
  std::vector<Cochain> basis;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_piv[f]) continue;
    Cochain v(n, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -rows[r][f];
    basis.push_back(v);
  }
  return basis;
}

bool is_coboundary(const MorseComplex& mc, const Cochain& v) {
  std::size_t n = mc.generators.size();
  std::vector<Cochain> cols;  // images of the generators
  for (std::size_t p = 0; p < n; ++p) {
    Cochain c(n);
    for (std::size_t q = 0; q < n; ++q) c[q] = mc.codifferential[q][p];
    cols.push_back(c);
  }
  int r = rank_of(cols, n);
  cols.push_back(v);
  return rank_of(cols, n) == r;
}

Cochain tripod_product(const OperationChain& tripod, const Cochain& a, const Cochain& b) {
  std::size_t n = a.size();
  Cochain out(n, 0);
  for (auto& t : tripod.terms) {
    if (t.inputs.size() != 2 || t.outputs.size() != 1) throw GraphError("not a tripod chain");
    out[t.outputs[0]] += a[t.inputs[0]] * b[t.inputs[1]] * t.coefficient;
  }
  return out;
}

bool same_cohomology_product(const OperationChain& x, const OperationChain& y, const MorseComplex& mc) {
  auto z = cocycle_basis(mc);
  for (auto& a : z)
    for (auto& b : z) {
      auto u = tripod_product(x, a, b), v = tripod_product(y, a, b);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] -= v[i];
      if (!is_coboundary(mc, u)) return false;
    }
  return true;
}

GlueReport verify_gluing(const GlueData& gd, const OperationChain& glued, const OperationChain& first,
                         const OperationChain& second, const MorseComplex& mc) {
  GlueReport rep;
  const SurfaceType& s1 = gd.first->surface;
  const SurfaceType& s2 = gd.second->surface;
  int n = static_cast<int>(mc.generators.size());
  auto d1 = s1.directions(), d2 = s2.directions();
  std::vector<int> paired_out(s1.num_marks(), -1), paired_in(s2.num_marks(), -1);
  for (std::size_t k = 0; k < gd.pairing.pairs.size(); ++k) {
    paired_out[gd.pairing.pairs[k].first] = static_cast<int>(k);
    paired_in[gd.pairing.pairs[k].second] = static_cast<int>(k);
  }
  // glued labels: unpaired marks of s1, then unpaired marks of s2
  std::vector<std::pair<int, int>> origin;  // (side, label)
  for (int l = 0; l < s1.num_marks(); ++l)
    if (paired_out[l] < 0) origin.push_back({0, l});
  for (int l = 0; l < s2.num_marks(); ++l)
    if (paired_in[l] < 0) origin.push_back({1, l});
  auto gdirs = gd.glued->surface.directions();

  auto outs = all_tuples(n, gd.glued->surface.n_out());
  auto mids = all_tuples(n, static_cast<int>(gd.pairing.pairs.size()));
  for (auto& in : glued.input_tuples)
    for (auto& out : outs) {
      GlueRecord r{in, out, transfer(glued.component(in, out), gd), {}};
      // generator per glued label
      std::vector<int> gen(gdirs.size());
      for (std::size_t l = 0, a = 0, b = 0; l < gdirs.size(); ++l) gen[l] = gdirs[l] == Dir::In ? in[a++] : out[b++];
      for (auto& mid : mids) {
        std::vector<int> g1(s1.num_marks()), g2(s2.num_marks());
        for (std::size_t l = 0; l < origin.size(); ++l) (origin[l].first ? g2 : g1)[origin[l].second] = gen[l];
        for (int l = 0; l < s1.num_marks(); ++l)
          if (paired_out[l] >= 0) g1[l] = mid[paired_out[l]];
        for (int l = 0; l < s2.num_marks(); ++l)
          if (paired_in[l] >= 0) g2[l] = mid[paired_in[l]];
        std::vector<int> in1, out1, in2, out2;
        for (int l = 0; l < s1.num_marks(); ++l) (d1[l] == Dir::In ? in1 : out1).push_back(g1[l]);
        for (int l = 0; l < s2.num_marks(); ++l) (d2[l] == Dir::In ? in2 : out2).push_back(g2[l]);
        for (auto& t1 : first.terms) {
          if (t1.inputs != in1 || t1.outputs != out1) continue;
          for (auto& t2 : second.terms)
            if (t2.inputs == in2 && t2.outputs == out2) r.composite.add({t1.cell, t2.cell}, t1.coefficient * t2.coefficient);
        }
      }
      if (!r.glued.terms.empty() || !r.composite.terms.empty()) rep.records.push_back(std::move(r));
    }
  return rep;
}

GlueReport verify_gluing(const ModuliComplex& glued, const ModuliComplex& first, const ModuliComplex& second,
                         const Pairing& pairing, const MorseComplex& mc, const OperationOptions& opt) {
  if (pairing.pairs.empty()) throw GraphError("gluing needs at least one attachment");
  if (!(glue_surface(first.surface, second.surface, pairing) == glued.surface))
    throw GraphError("glued complex does not match the pairing");
  GlueData gd{&glued, &first, &second, pairing};
  auto f1 = operation_chain(first, mc, {}, opt);
  auto f2 = operation_chain(second, mc, {}, opt);
  auto fg = operation_chain(glued, mc, {}, opt);
  return verify_gluing(gd, fg, f1, f2, mc);
}

std::string format_table(const OperationChain& chain) {
  std::ostringstream os;
  os << "# inputs\tcell\tcoefficient\toutputs\n";
  for (auto& t : chain.terms)
    os << tuple_str(t.inputs) << '\t' << t.cell << '\t' << rat_str(t.coefficient) << '\t' << tuple_str(t.outputs)
       << '\n';
  return os.str();
}

std::string format_report(const CheckReport& r) {
  std::ostringstream os;
  for (auto& x : r.records)
    os << "{\"check\":\"" << x.kind << "\",\"inputs\":\"" << tuple_str(x.inputs) << "\",\"cell\":" << x.cell
       << ",\"outputs\":\"" << tuple_str(x.outputs) << "\",\"lhs\":\"" << rat_str(x.lhs) << "\",\"rhs\":\""
       << rat_str(x.rhs) << "\",\"pass\":" << (x.pass() ? "true" : "false") << "}\n";
  return os.str();
}

std::string format_report(const GlueReport& r) {
  std::ostringstream os;
  auto pc = [](const ProductChain& c) {
    std::string s;
    for (auto& [k, v] : c.terms)
      s += (s.empty() ? "" : " ") + std::to_string(k.first) + "x" + std::to_string(k.second) + ":" + rat_str(v);
    return s;
  };
  for (auto& x : r.records)
    os << "{\"check\":\"glue\",\"inputs\":\"" << tuple_str(x.inputs) << "\",\"outputs\":\"" << tuple_str(x.outputs)
       << "\",\"glued\":\"" << pc(x.glued) << "\",\"composite\":\"" << pc(x.composite)
       << "\",\"pass\":" << (x.pass() ? "true" : "false") << "}\n";
  return os.str();
}

}  // namespace fgo
