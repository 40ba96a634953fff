#include "fgo/ribbon_graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace fgo {

namespace {

std::vector<std::vector<int>> cycles_of(const std::vector<int>& p) {
  std::vector<std::vector<int>> out;
  std::vector<char> seen(p.size(), 0);
  for (int s = 0; s < static_cast<int>(p.size()); ++s) {
    if (seen[s]) continue;
    std::vector<int> c;
    for (int h = s; !seen[h]; h = p[h]) {
      seen[h] = 1;
      c.push_back(h);
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool is_permutation_vec(const std::vector<int>& p) {
  std::vector<char> hit(p.size(), 0);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || hit[x]) return false;
    hit[x] = 1;
  }
  return true;
}

std::vector<int> rotate_to_min(std::vector<int> v) {
  if (v.empty()) return v;
  auto it = std::min_element(v.begin(), v.end());
  std::rotate(v.begin(), it, v.end());
  return v;
}

}  // namespace

std::vector<std::vector<int>> RibbonGraph::vertices() const { return cycles_of(sigma); }

std::vector<int> RibbonGraph::vertex_index() const {
  std::vector<int> idx(sigma.size(), -1);
  auto vs = vertices();
  for (int i = 0; i < static_cast<int>(vs.size()); ++i)
    for (int h : vs[i]) idx[h] = i;
  return idx;
}

std::vector<std::pair<int, int>> RibbonGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int h = 0; h < num_half_edges(); ++h)
    if (h < iota[h]) out.emplace_back(h, iota[h]);
  return out;
}

std::vector<std::vector<int>> RibbonGraph::faces() const {
  std::vector<int> phi(sigma.size());
  for (int h = 0; h < num_half_edges(); ++h) phi[h] = sigma[iota[h]];
  return cycles_of(phi);
}

int RibbonGraph::leg_at(int h) const {
  for (int i = 0; i < static_cast<int>(legs.size()); ++i)
    if (legs[i].half_edge == h) return i;
  return -1;
}

bool RibbonGraph::is_loop(int h) const {
  auto vi = vertex_index();
  return vi[h] == vi[iota[h]];
}

std::vector<int> RibbonGraph::internal_vertices() const {
  std::vector<int> out;
  auto vs = vertices();
  for (int i = 0; i < static_cast<int>(vs.size()); ++i)
    if (!(vs[i].size() == 1 && leg_at(vs[i][0]) >= 0)) out.push_back(i);
  return out;
}

std::vector<int> RibbonGraph::internal_edges() const {
  std::vector<int> out;
  for (auto [a, b] : edges())
    if (!is_external_edge(a)) out.push_back(a);
  return out;
}

int RibbonGraph::valency(int h) const {
  int n = 1;
  for (int x = sigma[h]; x != h; x = sigma[x]) ++n;
  return n;
}

bool RibbonGraph::connected() const {
  int n = num_half_edges();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int h = stack.back();
    stack.pop_back();
    for (int y : {sigma[h], iota[h]})
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
  }
  return count == n;
}

bool RibbonGraph::trivalent() const {
  auto vs = vertices();
  for (int v : internal_vertices())
    if (vs[v].size() != 3) return false;
  return true;
}

int RibbonGraph::num_in() const {
  return static_cast<int>(std::count_if(legs.begin(), legs.end(), [](const Leg& l) { return l.dir == Dir::In; }));
}

int RibbonGraph::num_out() const { return static_cast<int>(legs.size()) - num_in(); }

ValidationReport validate(const RibbonGraph& g, CellMode mode) {
  ValidationReport r;
  auto fail = [&](const std::string& s) {
    r.ok = false;
    r.violations.push_back(s);
  };
  int n = g.num_half_edges();
  if (static_cast<int>(g.iota.size()) != n) {
    fail("size_mismatch");
    return r;
  }
  if (!is_permutation_vec(g.sigma)) fail("sigma_not_permutation");
  if (!is_permutation_vec(g.iota)) {
    fail("iota_not_permutation");
    return r;
  }
  for (int h = 0; h < n; ++h) {
    if (g.iota[h] == h) {
      fail("iota_fixed_point");
      break;
    }
    if (g.iota[g.iota[h]] != h) {
      fail("iota_not_involution");
      break;
    }
  }
  if (!r.ok) return r;
  for (int i = 0; i < static_cast<int>(g.legs.size()); ++i) {
    const Leg& l = g.legs[i];
    if (l.label != i) fail("leg_labels_not_consecutive");
    if (l.half_edge < 0 || l.half_edge >= n || g.sigma[l.half_edge] != l.half_edge) fail("leg_not_univalent");
  }
  if (!r.ok) return r;
  for (auto [a, b] : g.edges())
    if (g.leg_at(a) >= 0 && g.leg_at(b) >= 0) fail("edge_between_legs");
  if (!g.connected()) fail("disconnected");
  if (mode != CellMode::Structure) {
    auto vs = g.vertices();
    for (int v : g.internal_vertices()) {
      auto k = vs[v].size();
      if (k == 1) fail("univalent_internal_vertex");
      else if (k == 2) fail("bivalent_internal_vertex");
      else if (mode == CellMode::TopCell && k != 3) fail("non_trivalent_vertex");
    }
  }
  return r;
}

SurfaceInvariants surface_invariants(const RibbonGraph& g) {
  SurfaceInvariants s;
  auto fs = g.faces();
  s.boundaries = static_cast<int>(fs.size());
  s.chi = g.euler_characteristic();
  s.genus = (2 - s.chi - s.boundaries) / 2;
  for (auto& f : fs) {
    std::vector<int> labels;
    for (int h : f) {
      int l = g.leg_at(h);
      if (l >= 0) labels.push_back(g.legs[l].label);
    }
    s.placement.push_back(rotate_to_min(labels));
  }
  std::sort(s.placement.begin(), s.placement.end());
  return s;
}

int SurfaceType::num_marks() const {
  int n = 0;
  for (auto& b : boundaries) n += static_cast<int>(b.size());
  return n;
}

int SurfaceType::n_in() const {
  int n = 0;
  for (auto& b : boundaries)
    for (auto& mk : b) n += mk.dir == Dir::In;
  return n;
}

int SurfaceType::n_out() const { return num_marks() - n_in(); }

std::vector<Dir> SurfaceType::directions() const {
  std::vector<Dir> d(num_marks(), Dir::In);
  for (auto& b : boundaries)
    for (auto& mk : b) d.at(mk.label) = mk.dir;
  return d;
}

SurfaceType SurfaceType::from_pattern(int genus, const std::vector<std::string>& patterns) {
  SurfaceType s;
  s.genus = genus;
  int label = 0;
  for (auto& p : patterns) {
    std::vector<Mark> b;
    for (char c : p) {
      if (c != 'i' && c != 'o') throw GraphError("mark pattern must use i/o");
      b.push_back({label++, c == 'i' ? Dir::In : Dir::Out});
    }
    s.boundaries.push_back(b);
  }
  return s;
}

SurfaceType SurfaceType::from_counts(int genus, const std::vector<int>& counts) {
  int total = std::accumulate(counts.begin(), counts.end(), 0);
  std::vector<std::string> pats;
  int seen = 0;
  for (int c : counts) {
    if (c < 0) throw GraphError("negative mark count");
    std::string p;
    for (int i = 0; i < c; ++i, ++seen) p += (seen == total - 1) ? 'o' : 'i';
    pats.push_back(p);
  }
  return from_pattern(genus, pats);
}

SurfaceType SurfaceType::disk(int n_in, int n_out) {
  return from_pattern(0, {std::string(n_in, 'i') + std::string(n_out, 'o')});
}

std::string SurfaceType::describe() const {
  std::ostringstream os;
  os << "g=" << genus << " m=" << m() << " marks=";
  for (int i = 0; i < m(); ++i) {
    if (i) os << ',';
    if (boundaries[i].empty()) os << '-';
    for (auto& mk : boundaries[i]) os << dir_char(mk.dir);
  }
  return os.str();
}

bool realizes(const RibbonGraph& g, const SurfaceType& s) {
  if (static_cast<int>(g.legs.size()) != s.num_marks()) return false;
  auto dirs = s.directions();
  for (auto& l : g.legs)
    if (dirs[l.label] != l.dir) return false;
  auto inv = surface_invariants(g);
  if (inv.genus != s.genus || inv.boundaries != s.m()) return false;
  std::vector<std::vector<int>> want;
  for (auto& b : s.boundaries) {
    std::vector<int> labels;
    for (auto& mk : b) labels.push_back(mk.label);
    want.push_back(rotate_to_min(labels));
  }
  std::sort(want.begin(), want.end());
  return want == inv.placement;
}

SurfaceType surface_of(const RibbonGraph& g) {
  auto inv = surface_invariants(g);
  SurfaceType s;
  s.genus = inv.genus;
  for (auto& b : inv.placement) {
    std::vector<Mark> mk;
    for (int l : b) mk.push_back({l, g.legs.at(l).dir});
    s.boundaries.push_back(mk);
  }
  return s;
}

RibbonGraph disjoint_union(const RibbonGraph& g1, const RibbonGraph& g2) {
  RibbonGraph u = g1;
  int off = g1.num_half_edges();
  for (int h = 0; h < g2.num_half_edges(); ++h) {
    u.sigma.push_back(g2.sigma[h] + off);
    u.iota.push_back(g2.iota[h] + off);
  }
  for (auto l : g2.legs) {
    l.half_edge += off;
    u.legs.push_back(l);
  }
  for (int i = 0; i < static_cast<int>(u.legs.size()); ++i) u.legs[i].label = i;
  return u;
}

RibbonGraph subgraph_range(const RibbonGraph& g, int lo, int hi) {
  RibbonGraph r;
  for (int h = lo; h < hi; ++h) {
    if (g.sigma[h] < lo || g.sigma[h] >= hi || g.iota[h] < lo || g.iota[h] >= hi)
      throw GraphError("range is not a union of components");
    r.sigma.push_back(g.sigma[h] - lo);
    r.iota.push_back(g.iota[h] - lo);
  }
  for (auto l : g.legs)
    if (l.half_edge >= lo && l.half_edge < hi) {
      l.half_edge -= lo;
      l.label = static_cast<int>(r.legs.size());
      r.legs.push_back(l);
    }
  return r;
}

Collapse collapse_edge(const RibbonGraph& g, int e) {
  int h = e, hp = g.iota[e];
  if (g.is_external_edge(h)) throw GraphError("cannot collapse an external edge");
  if (g.is_loop(h)) throw GraphError("cannot collapse a loop");
  int n = g.num_half_edges();
  std::vector<int> sig = g.sigma;
  for (int x = 0; x < n; ++x)
    if (x != h && x != hp && (g.sigma[x] == h || g.sigma[x] == hp)) sig[x] = g.sigma[g.iota[g.sigma[x]]];
  Collapse c;
  c.half_edge_map.assign(n, -1);
  int k = 0;
  for (int x = 0; x < n; ++x)
    if (x != h && x != hp) c.half_edge_map[x] = k++;
  c.graph.sigma.resize(k);
  c.graph.iota.resize(k);
  for (int x = 0; x < n; ++x) {
    int y = c.half_edge_map[x];
    if (y < 0) continue;
    c.graph.sigma[y] = c.half_edge_map[sig[x]];
    c.graph.iota[y] = c.half_edge_map[g.iota[x]];
  }
  for (auto l : g.legs) {
    l.half_edge = c.half_edge_map[l.half_edge];
    c.graph.legs.push_back(l);
  }
  c.merged_vertex_half_edge = c.half_edge_map[g.sigma[h]];
  return c;
}

std::vector<Expansion> expansions(const RibbonGraph& g, int v) {
  int k = g.valency(v);
  if (g.leg_at(v) >= 0) throw GraphError("expansion at an external vertex");
  if (k == 3) return {};
  if (k != 4) throw GraphError("expansion of valency " + std::to_string(k) + " is unsupported");
  std::vector<int> cyc{v};
  for (int x = g.sigma[v]; x != v; x = g.sigma[x]) cyc.push_back(x);
  std::vector<Expansion> out;
  int n = g.num_half_edges();
  for (int shift = 0; shift < 2; ++shift) {
    int a = cyc[shift], b = cyc[(shift + 1) % 4], c = cyc[(shift + 2) % 4], d = cyc[(shift + 3) % 4];
    Expansion ex;
    RibbonGraph& r = ex.graph;
    r = g;
    r.sigma.push_back(0);
    r.sigma.push_back(0);
    r.iota.push_back(n + 1);
    r.iota.push_back(n);
    int x = n, xp = n + 1;
    r.sigma[a] = b;
    r.sigma[b] = x;
    r.sigma[x] = a;
    r.sigma[c] = d;
    r.sigma[d] = xp;
    r.sigma[xp] = c;
    ex.new_edge = x;
    out.push_back(std::move(ex));
  }
  return out;
}

namespace {

// BFS relabeling from a start half-edge; returns labels old->new and the code.
void traverse(const RibbonGraph& g, int start, std::vector<int>& label, std::vector<int>& order) {
  int n = g.num_half_edges();
  label.assign(n, -1);
  order.clear();
  order.reserve(n);
  label[start] = 0;
  order.push_back(start);
  for (std::size_t i = 0; i < order.size(); ++i) {
    int x = order[i];
    for (int y : {g.sigma[x], g.iota[x]})
      if (label[y] < 0) {
        label[y] = static_cast<int>(order.size());
        order.push_back(y);
      }
  }
}

std::vector<int> code_of(const RibbonGraph& g, const std::vector<int>& label, const std::vector<int>& order) {
  std::vector<int> code;
  code.reserve(2 * order.size() + 2 * g.legs.size() + 1);
  code.push_back(static_cast<int>(order.size()));
  for (int x : order) {
    code.push_back(label[g.sigma[x]]);
    code.push_back(label[g.iota[x]]);
  }
  for (auto& l : g.legs) {
    code.push_back(label[l.half_edge]);
    code.push_back(l.dir == Dir::In ? 0 : 1);
  }
  return code;
}

}  // namespace

Canonical canonical_form(const RibbonGraph& g) {
  if (!g.connected()) throw GraphError("canonical form needs a connected graph");
  int n = g.num_half_edges();
  std::vector<int> starts;
  if (!g.legs.empty()) starts.push_back(g.legs[0].half_edge);
  else
    for (int h = 0; h < n; ++h) starts.push_back(h);
  Canonical best;
  std::vector<int> label, order;
  bool have = false;
  for (int s : starts) {
    traverse(g, s, label, order);
    auto code = code_of(g, label, order);
    if (!have || code < best.key) {
      best.key = std::move(code);
      best.relabel = label;
      have = true;
    }
  }
  RibbonGraph& r = best.graph;
  r.sigma.assign(n, 0);
  r.iota.assign(n, 0);
  for (int x = 0; x < n; ++x) {
    r.sigma[best.relabel[x]] = best.relabel[g.sigma[x]];
    r.iota[best.relabel[x]] = best.relabel[g.iota[x]];
  }
  r.legs = g.legs;
  for (auto& l : r.legs) l.half_edge = best.relabel[l.half_edge];
  return best;
}

std::vector<Iso> isomorphisms(const RibbonGraph& g1, const RibbonGraph& g2) {
  std::vector<Iso> out;
  int n = g1.num_half_edges();
  if (n != g2.num_half_edges() || g1.legs.size() != g2.legs.size()) return out;
  for (std::size_t i = 0; i < g1.legs.size(); ++i)
    if (g1.legs[i].dir != g2.legs[i].dir || g1.legs[i].label != g2.legs[i].label) return out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> l1, o1, l2, o2;
  int s1 = g1.legs.empty() ? 0 : g1.legs[0].half_edge;
  traverse(g1, s1, l1, o1);
  if (static_cast<int>(o1.size()) != n) return out;  // disconnected
  auto c1 = code_of(g1, l1, o1);
  std::vector<int> targets;
  if (!g1.legs.empty()) targets.push_back(g2.legs[0].half_edge);
  else
    for (int h = 0; h < n; ++h) targets.push_back(h);
  for (int t : targets) {
    traverse(g2, t, l2, o2);
    if (code_of(g2, l2, o2) != c1) continue;
    Iso phi(n);
    for (int x = 0; x < n; ++x) phi[x] = o2[l1[x]];
    out.push_back(std::move(phi));
  }
  return out;
}

std::string to_literal(const RibbonGraph& g) {
  std::ostringstream os;
  auto cyc = [&](const std::vector<int>& p) {
    for (auto& c : cycles_of(p)) {
      os << '(';
      for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
      os << ')';
    }
  };
  os << "sigma=";
  cyc(g.sigma);
  os << " iota=";
  cyc(g.iota);
  os << " legs=";
  for (std::size_t i = 0; i < g.legs.size(); ++i)
    os << (i ? "," : "") << g.legs[i].half_edge << dir_char(g.legs[i].dir);
  return os.str();
}

RibbonGraph from_literal(const std::string& text) {
  auto field = [&](const std::string& name) -> std::string {
    auto p = text.find(name + "=");
    if (p == std::string::npos) throw GraphError("literal missing " + name);
    p += name.size() + 1;
    // cycles contain spaces; a field ends where the next "key=" starts
    auto q = p;
    while (q < text.size() && !(text[q] == ' ' && q + 1 < text.size() && std::isalpha(text[q + 1]))) ++q;
    return text.substr(p, q - p);
  };
  auto parse_cycles = [](const std::string& s) {
    std::vector<std::vector<int>> cs;
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] != '(') throw GraphError("bad cycle notation");
      auto j = s.find(')', i);
      if (j == std::string::npos) throw GraphError("unterminated cycle");
      std::istringstream is(s.substr(i + 1, j - i - 1));
      std::vector<int> c;
      int x;
      while (is >> x) c.push_back(x);
      cs.push_back(c);
      i = j + 1;
    }
    return cs;
  };
  auto sc = parse_cycles(field("sigma"));
  auto ic = parse_cycles(field("iota"));
  int n = 0;
  for (auto& c : sc) n += static_cast<int>(c.size());
  RibbonGraph g;
  g.sigma.assign(n, -1);
  g.iota.assign(n, -1);
  auto fill = [&](std::vector<int>& p, const std::vector<std::vector<int>>& cs) {
    for (auto& c : cs)
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] < 0 || c[k] >= n) throw GraphError("half-edge out of range");
        p[c[k]] = c[(k + 1) % c.size()];
      }
  };
  fill(g.sigma, sc);
  fill(g.iota, ic);
  for (int x : g.iota)
    if (x < 0) throw GraphError("iota incomplete");
  std::string legs = field("legs");
  std::istringstream ls(legs);
  std::string item;
  int label = 0;
  while (std::getline(ls, item, ',')) {
    if (item.empty()) continue;
    char d = item.back();
    if (d != 'i' && d != 'o') throw GraphError("leg needs i/o flag");
    g.legs.push_back({std::stoi(item.substr(0, item.size() - 1)), d == 'i' ? Dir::In : Dir::Out, label++});
  }
  return g;
}

RibbonGraph tripod(Dir a, Dir b, Dir c) {
  RibbonGraph g;
  g.sigma = {1, 2, 0, 3, 4, 5};
  g.iota = {3, 4, 5, 0, 1, 2};
  g.legs = {{3, a, 0}, {4, b, 1}, {5, c, 2}};
  return g;
}

namespace {

void gen_matchings(std::vector<int>& free, std::vector<int>& iota,
                   const std::function<void()>& emit) {
  int first = -1;
  for (std::size_t i = 0; i < free.size(); ++i)
    if (free[i] >= 0) {
      first = static_cast<int>(i);
      break;
    }
  if (first < 0) {
    emit();
    return;
  }
  int a = free[first];
  free[first] = -1;
  for (std::size_t j = first + 1; j < free.size(); ++j) {
    if (free[j] < 0) continue;
    int b = free[j];
    free[j] = -1;
    iota[a] = b;
    iota[b] = a;
    gen_matchings(free, iota, emit);
    free[j] = b;
  }
  free[first] = a;
}

// Calls emit(g) for every connected trivalent graph with the given legs; may repeat classes.
void for_each_trivalent(int V, const std::vector<Dir>& dirs, const std::function<void(const RibbonGraph&)>& emit) {
  int n = static_cast<int>(dirs.size());
  int H = 3 * V + n;
  if (H % 2 != 0 || V < 1) return;
  RibbonGraph g;
  g.sigma.resize(H);
  g.iota.assign(H, -1);
  for (int v = 0; v < V; ++v) {
    g.sigma[3 * v] = 3 * v + 1;
    g.sigma[3 * v + 1] = 3 * v + 2;
    g.sigma[3 * v + 2] = 3 * v;
  }
  for (int j = 0; j < n; ++j) {
    g.sigma[3 * V + j] = 3 * V + j;
    g.legs.push_back({3 * V + j, dirs[j], j});
  }
  std::vector<int> slot(n, -1);
  std::vector<char> used(3 * V, 0);
  std::function<void(int)> place = [&](int j) {
    if (j == n) {
      std::vector<int> free;
      for (int h = 0; h < 3 * V; ++h)
        if (!used[h]) free.push_back(h);
      for (int k = 0; k < n; ++k) {
        g.iota[3 * V + k] = slot[k];
        g.iota[slot[k]] = 3 * V + k;
      }
      gen_matchings(free, g.iota, [&] {
        if (g.connected()) emit(g);
      });
      return;
    }
    for (int h = 0; h < 3 * V; ++h) {
      if (used[h]) continue;
      if (j == 0 && h != 0) break;  // vertex relabeling puts leg 0 at half-edge 0
      used[h] = 1;
      slot[j] = h;
      place(j + 1);
      used[h] = 0;
    }
  };
  place(0);
}

}  // namespace

std::vector<std::pair<SurfaceType, std::vector<RibbonGraph>>> enumerate_trivalent_by_surface(
    int V, int n, const std::vector<Dir>& dirs) {
  if (static_cast<int>(dirs.size()) != n) throw GraphError("direction count mismatch");
  std::set<std::vector<int>> seen;
  std::map<std::pair<int, std::vector<std::vector<int>>>, std::vector<RibbonGraph>> groups;
  for_each_trivalent(V, dirs, [&](const RibbonGraph& g) {
    auto c = canonical_form(g);
    if (!seen.insert(c.key).second) return;
    auto inv = surface_invariants(c.graph);
    groups[{inv.genus, inv.placement}].push_back(std::move(c.graph));
  });
  std::vector<std::pair<SurfaceType, std::vector<RibbonGraph>>> out;
  for (auto& [k, gs] : groups) {
    SurfaceType s;
    s.genus = k.first;
    for (auto& b : k.second) {
      std::vector<Mark> mk;
      for (int l : b) mk.push_back({l, dirs[l]});
      s.boundaries.push_back(mk);
    }
    out.emplace_back(s, std::move(gs));
  }
  return out;
}

Enumeration enumerate_ribbon_graphs(const SurfaceType& s, int max_valency) {
  int n = s.num_marks();
  int V = n - 2 * s.chi();
  Enumeration out;
  if (V < 1) return out;
  auto dirs = s.directions();
  std::map<std::vector<int>, RibbonGraph> top;
  for_each_trivalent(V, dirs, [&](const RibbonGraph& g) {
    if (!realizes(g, s)) return;
    auto c = canonical_form(g);
    top.emplace(c.key, std::move(c.graph));
  });
  int top_edges = (3 * V + n) / 2;
  std::map<int, std::map<std::vector<int>, RibbonGraph>> by_codim;
  by_codim[0] = top;
  for (int k = 0;; ++k) {
    auto it = by_codim.find(k);
    if (it == by_codim.end() || it->second.empty()) break;
    for (auto& [key, g] : it->second)
      for (int e : g.internal_edges()) {
        if (g.is_loop(e)) continue;
        auto c = canonical_form(collapse_edge(g, e).graph);
        by_codim[k + 1].emplace(c.key, std::move(c.graph));
      }
  }
  for (auto& [k, m] : by_codim)
    for (auto& [key, g] : m) {
      if (max_valency > 0) {
        bool ok = true;
        auto vs = g.vertices();
        for (int v : g.internal_vertices())
          if (static_cast<int>(vs[v].size()) > max_valency) ok = false;
        if (!ok) continue;
      }
      out.graphs.push_back(g);
      out.codim.push_back(top_edges - g.num_edges());
    }
  return out;
}

}  // namespace fgo
