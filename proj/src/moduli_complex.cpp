#include "fgo/moduli_complex.hpp"

#include <algorithm>
#include <functional>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace fgo {

OrientedBasis oriented_basis(const RibbonGraph& g, const OrientationData& od, int d) {
  OrientedBasis b;
  auto e = edge_block(g, od);
  auto vh = vh_block(g, od);
  b.edge_blocks = {e, e};
  b.vh_blocks = {vh};
  if (d % 2) {
    b.edge_blocks.push_back(det_edge_block(g, od));
    b.vh_blocks.push_back(vh);
  }
  return b;
}

int basis_sign(const OrientedBasis& a, const OrientedBasis& b) {
  if (a.edge_blocks.size() != b.edge_blocks.size() || a.vh_blocks.size() != b.vh_blocks.size())
    throw GraphError("bases of different local systems");
  int s = 1;
  for (std::size_t i = 0; i < a.edge_blocks.size(); ++i) s *= permutation_sign(a.edge_blocks[i], b.edge_blocks[i]);
  for (std::size_t i = 0; i < a.vh_blocks.size(); ++i) s *= permutation_sign(a.vh_blocks[i], b.vh_blocks[i]);
  return s;
}

OrientedBasis rename_basis(const OrientedBasis& b, const RibbonGraph& g, const std::vector<int>& hmap,
                           const RibbonGraph& h) {
  OrientedBasis r;
  for (auto& t : b.edge_blocks) r.edge_blocks.push_back(rename_tokens(t, g, hmap, h));
  for (auto& t : b.vh_blocks) r.vh_blocks.push_back(rename_tokens(t, g, hmap, h));
  return r;
}

FaceProjection project_to_face(const RibbonGraph& g, const OrientedBasis& b, int e) {
  FaceProjection fp{1, {}, collapse_edge(g, e)};
  Token te{'E', edge_id(g, e)};
  OrientedBasis cut;
  for (auto blk : b.edge_blocks) {
    auto it = std::find(blk.begin(), blk.end(), te);
    if (it == blk.end()) throw GraphError("edge missing from basis");
    if ((it - blk.begin()) % 2) fp.sign = -fp.sign;
    blk.erase(it);
    cut.edge_blocks.push_back(std::move(blk));
  }
  int h1 = e, h1p = g.iota[e];
  Token front[4] = {{'H', h1}, {'H', h1p}, {'V', vertex_id(g, h1)}, {'V', vertex_id(g, h1p)}};
  for (auto& blk : b.vh_blocks) {
    TokenList moved(front, front + 4);
    for (auto& t : blk)
      if (std::find(front, front + 4, t) == front + 4) moved.push_back(t);
    fp.sign *= permutation_sign(blk, moved);
    cut.vh_blocks.emplace_back(moved.begin() + 3, moved.end());
  }
  fp.basis = rename_basis(cut, g, fp.collapse.half_edge_map, fp.collapse.graph);
  return fp;
}

int ModuliComplex::find(const RibbonGraph& canonical_graph) const {
  auto it = index.find(canonical_form(canonical_graph).key);
  return it == index.end() ? -1 : it->second;
}

int ModuliComplex::top_dim() const {
  int m = 0;
  for (auto& c : cells) m = std::max(m, c.dim);
  return m;
}

namespace {

bool reverses_local_system(const RibbonGraph& g, const OrientedBasis& b) {
  for (auto& phi : automorphisms(g))
    if (basis_sign(rename_basis(b, g, phi, g), b) < 0) return true;
  return false;
}

}  // namespace

ModuliComplex build_complex(const SurfaceType& s, int d) {
  ModuliComplex cx;
  cx.surface = s;
  cx.d = d;
  auto en = enumerate_ribbon_graphs(s);
  if (en.graphs.empty()) throw GraphError("surface type " + s.describe() + " has no admissible graph");
  for (std::size_t i = 0; i < en.graphs.size(); ++i) {
    Cell c;
    c.graph = en.graphs[i];
    c.dim = c.graph.num_edges();
    c.label_free_dim = c.dim - static_cast<int>(c.graph.legs.size());
    c.codim = en.codim[i];
    c.aut_order = static_cast<int>(automorphisms(c.graph).size());
    c.ref = reference_orientation(c.graph);
    c.degenerate = reverses_local_system(c.graph, oriented_basis(c.graph, c.ref, d));
    cx.index[canonical_form(c.graph).key] = static_cast<int>(cx.cells.size());
    cx.cells.push_back(std::move(c));
  }
  for (auto& c : cx.cells) {
    auto basis = oriented_basis(c.graph, c.ref, d);
    for (int e : c.graph.internal_edges()) {
      if (c.graph.is_loop(e)) continue;
      auto fp = project_to_face(c.graph, basis, e);
      auto canon = canonical_form(fp.collapse.graph);
      int t = cx.index.at(canon.key);
      auto& tc = cx.cells[t];
      auto renamed = rename_basis(fp.basis, fp.collapse.graph, canon.relabel, canon.graph);
      int sign = fp.sign * basis_sign(renamed, oriented_basis(tc.graph, tc.ref, d));
      c.attachments.push_back({e, t, sign});
    }
  }
  return cx;
}

void CellularChain::add(int cell, Rational c) {
  if (c.numerator() == 0) return;
  auto& x = terms[cell];
  x += c;
  if (x.numerator() == 0) terms.erase(cell);
}

CellularChain boundary(const CellularChain& c, const ModuliComplex& cx) {
  CellularChain out;
  out.det_degree = c.det_degree;
  for (auto& [i, coeff] : c.terms) {
    auto& src = cx.cells.at(i);
    if (src.degenerate) continue;
    for (auto& a : src.attachments) {
      auto& tgt = cx.cells[a.target];
      if (tgt.degenerate) continue;
      out.add(a.target, coeff * a.sign * Rational(tgt.aut_order, src.aut_order));
    }
  }
  return out;
}

namespace {

OrientedBasis natural_basis(const RibbonGraph& g) {
  auto ref = reference_orientation(g);
  OrientedBasis b = oriented_basis(g, ref, 0);
  b.vh_blocks[0] = conant_vogtmann_tokens(g);
  return b;
}

}  // namespace

CellularChain fundamental_chain(const ModuliComplex& cx) {
  if (cx.d % 2) throw GraphError("natural orientation chain is defined for the or system only");
  CellularChain c;
  c.det_degree = cx.det_degree();
  for (int i = 0; i < static_cast<int>(cx.cells.size()); ++i) {
    auto& cell = cx.cells[i];
    if (cell.codim != 0 || cell.degenerate) continue;
    int s = basis_sign(natural_basis(cell.graph), oriented_basis(cell.graph, cell.ref, 0));
    c.add(i, s);
  }
  return c;
}

std::vector<CancellationEntry> cancellation_report(const ModuliComplex& cx) {
  std::vector<CancellationEntry> out;
  for (int i = 0; i < static_cast<int>(cx.cells.size()); ++i) {
    auto& cell = cx.cells[i];
    if (cell.codim != 1) continue;
    auto vs = cell.graph.vertices();
    int v4 = -1;
    for (int v : cell.graph.internal_vertices())
      if (vs[v].size() == 4) v4 = vs[v][0];
    if (v4 < 0) continue;
    CancellationEntry ent{i, {}, {}, false};
    auto ref = oriented_basis(cell.graph, cell.ref, 0);
    int total = 0;
    for (auto& ex : expansions(cell.graph, v4)) {
      auto fp = project_to_face(ex.graph, natural_basis(ex.graph), ex.new_edge);
      auto canon = canonical_form(fp.collapse.graph);
      auto phi = isomorphisms(canon.graph, cell.graph);
      if (phi.empty()) throw GraphError("expansion does not collapse back");
      std::vector<int> to_cell(canon.relabel.size());
      for (std::size_t h = 0; h < to_cell.size(); ++h) to_cell[h] = phi[0][canon.relabel[h]];
      int s = fp.sign * basis_sign(rename_basis(fp.basis, fp.collapse.graph, to_cell, cell.graph), ref);
      ent.sources.push_back(cx.find(ex.graph));
      ent.signs.push_back(s);
      total += s;
    }
    ent.cancels = ent.signs.size() == 2 && total == 0;
    out.push_back(std::move(ent));
  }
  return out;
}

RibbonGraph glue(const RibbonGraph& g1, const RibbonGraph& g2, const Pairing& p) {
  if (p.pairs.empty()) throw GraphError("gluing needs at least one attachment");
  std::vector<char> used1(g1.legs.size(), 0), used2(g2.legs.size(), 0);
  for (auto [o, i] : p.pairs) {
    if (o < 0 || o >= static_cast<int>(g1.legs.size()) || i < 0 || i >= static_cast<int>(g2.legs.size()))
      throw GraphError("pairing refers to a missing leg");
    if (g1.legs[o].dir != Dir::Out || g2.legs[i].dir != Dir::In)
      throw GraphError("gluing pairs an outgoing leg of the first graph with an incoming leg of the second");
    if (used1[o]++ || used2[i]++) throw GraphError("leg paired twice");
  }
  int n1 = g1.num_half_edges(), n2 = g2.num_half_edges();
  std::vector<int> map1(n1, -1), map2(n2, -1);
  int k = 0;
  for (int h = 0; h < n1; ++h) {
    int l = g1.leg_at(h);
    if (l < 0 || !used1[l]) map1[h] = k++;
  }
  for (int h = 0; h < n2; ++h) {
    int l = g2.leg_at(h);
    if (l < 0 || !used2[l]) map2[h] = k++;
  }
  RibbonGraph r;
  r.sigma.assign(k, -1);
  r.iota.assign(k, -1);
  for (int h = 0; h < n1; ++h)
    if (map1[h] >= 0) {
      r.sigma[map1[h]] = map1[g1.sigma[h]];
      if (map1[g1.iota[h]] >= 0) r.iota[map1[h]] = map1[g1.iota[h]];
    }
  for (int h = 0; h < n2; ++h)
    if (map2[h] >= 0) {
      r.sigma[map2[h]] = map2[g2.sigma[h]];
      if (map2[g2.iota[h]] >= 0) r.iota[map2[h]] = map2[g2.iota[h]];
    }
  for (auto [o, i] : p.pairs) {
    int a = map1[g1.iota[g1.legs[o].half_edge]];
    int b = map2[g2.iota[g2.legs[i].half_edge]];
    r.iota[a] = b;
    r.iota[b] = a;
  }
  for (auto& l : g1.legs)
    if (!used1[l.label]) r.legs.push_back({map1[l.half_edge], l.dir, static_cast<int>(r.legs.size())});
  for (auto& l : g2.legs)
    if (!used2[l.label]) r.legs.push_back({map2[l.half_edge], l.dir, static_cast<int>(r.legs.size())});
  return r;
}

SurfaceType glue_surface(const SurfaceType& s1, const SurfaceType& s2, const Pairing& p) {
  auto e1 = enumerate_ribbon_graphs(s1);
  auto e2 = enumerate_ribbon_graphs(s2);
  if (e1.graphs.empty() || e2.graphs.empty()) throw GraphError("factor surface has no admissible graph");
  return surface_of(glue(e1.graphs[0], e2.graphs[0], p));
}

void ProductChain::add(std::pair<int, int> cell, Rational c) {
  if (c.numerator() == 0) return;
  auto& x = terms[cell];
  x += c;
  if (x.numerator() == 0) terms.erase(cell);
}

namespace {

OrientationData union_orientation(const RibbonGraph& g1, const OrientationData& a, const OrientationData& b) {
  int off = g1.num_half_edges();
  OrientationData u = a;
  for (int x : b.edge_source) u.edge_source.push_back(x + off);
  for (int x : b.vertex_order) u.vertex_order.push_back(x + off);
  for (int x : b.edge_order) u.edge_order.push_back(x + off);
  for (int x : b.incoming_order) u.incoming_order.push_back(x + off);
  return u;
}

OrientedBasis product_basis(const ModuliComplex& c1, int i, const ModuliComplex& c2, int j, int d) {
  auto& a = c1.cells[i];
  auto& b = c2.cells[j];
  auto u = disjoint_union(a.graph, b.graph);
  return oriented_basis(u, union_orientation(a.graph, a.ref, b.ref), d);
}

int find_component_split(const RibbonGraph& g, const std::vector<int>& cut, std::vector<int>& comp) {
  int n = g.num_half_edges();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
  auto unite = [&](int x, int y) { parent[root(x)] = root(y); };
  std::vector<char> is_cut(n, 0);
  for (int h : cut) is_cut[h] = is_cut[g.iota[h]] = 1;
  for (int h = 0; h < n; ++h) {
    unite(h, g.sigma[h]);
    if (!is_cut[h]) unite(h, g.iota[h]);
  }
  comp.assign(n, -1);
  std::map<int, int> ids;
  for (int h = 0; h < n; ++h) {
    int r = root(h);
    if (!ids.count(r)) ids[r] = static_cast<int>(ids.size());
    comp[h] = ids[r];
  }
  return static_cast<int>(ids.size());
}

}  // namespace

std::vector<Decomposition> decompositions(const GlueData& gd, int glued_cell) {
  std::vector<Decomposition> out;
  const auto& cell = gd.glued->cells.at(glued_cell);
  const RibbonGraph& g = cell.graph;
  const auto& s1 = gd.first->surface;
  const auto& s2 = gd.second->surface;
  int n = static_cast<int>(gd.pairing.pairs.size());
  int r1 = s1.num_marks() - n;
  int d = gd.glued->d;
  std::vector<int> unp1, unp2;
  {
    std::vector<char> u1(s1.num_marks(), 0), u2(s2.num_marks(), 0);
    for (auto [o, i] : gd.pairing.pairs) u1[o] = u2[i] = 1;
    for (int l = 0; l < s1.num_marks(); ++l)
      if (!u1[l]) unp1.push_back(l);
    for (int l = 0; l < s2.num_marks(); ++l)
      if (!u2[l]) unp2.push_back(l);
  }
  std::vector<int> candidates;
  for (int e : g.internal_edges())
    if (!g.is_loop(e)) candidates.push_back(e);
  auto dirs1 = s1.directions();
  auto dirs2 = s2.directions();
  auto base = oriented_basis(g, cell.ref, d);

  std::vector<int> chosen;
  std::function<void(int)> choose = [&](int start) {
    if (static_cast<int>(chosen.size()) == n) {
      std::vector<int> comp;
      if (find_component_split(g, chosen, comp) != 2) return;
      int ca = -1;
      for (auto& l : g.legs) {
        int want = l.label < r1 ? 0 : 1;
        int c = comp[l.half_edge];
        if (ca < 0) ca = want == 0 ? c : 1 - c;
        if ((want == 0 ? ca : 1 - ca) != c) return;
      }
      if (ca < 0) ca = 0;
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        // Cut graph: glued half-edges followed by the new leg pair of each cut edge.
        int H = g.num_half_edges();
        RibbonGraph c = g;
        std::vector<int> side(H + 2 * n);
        for (int h = 0; h < H; ++h) side[h] = comp[h] == ca ? 0 : 1;
        std::vector<int> ka(n), kb(n), ha(n), hb(n);
        bool ok = true;
        for (int j = 0; j < n; ++j) {
          int s = chosen[perm[j]];
          int a = s, b = g.iota[s];
          if (side[a] == 1) std::swap(a, b);
          if (side[a] != 0 || side[b] != 1) ok = false;
          ha[j] = a;
          hb[j] = b;
          ka[j] = H + 2 * j;
          kb[j] = H + 2 * j + 1;
          side[ka[j]] = 0;
          side[kb[j]] = 1;
          c.sigma.insert(c.sigma.end(), {ka[j], kb[j]});
          c.iota.insert(c.iota.end(), {a, b});
          c.iota[a] = ka[j];
          c.iota[b] = kb[j];
        }
        if (!ok) continue;
        std::vector<int> idx(H + 2 * n);
        int k0 = 0, k1 = 0;
        for (int h = 0; h < H + 2 * n; ++h) idx[h] = side[h] == 0 ? k0++ : k1++;
        RibbonGraph g1, g2;
        g1.sigma.resize(k0);
        g1.iota.resize(k0);
        g2.sigma.resize(k1);
        g2.iota.resize(k1);
        for (int h = 0; h < H + 2 * n; ++h) {
          RibbonGraph& t = side[h] == 0 ? g1 : g2;
          t.sigma[idx[h]] = idx[c.sigma[h]];
          t.iota[idx[h]] = idx[c.iota[h]];
        }
        std::vector<Leg> l1, l2;
        for (auto& l : g.legs) {
          if (l.label < r1) l1.push_back({idx[l.half_edge], dirs1[unp1[l.label]], unp1[l.label]});
          else l2.push_back({idx[l.half_edge], dirs2[unp2[l.label - r1]], unp2[l.label - r1]});
        }
        for (int j = 0; j < n; ++j) {
          l1.push_back({idx[ka[j]], Dir::Out, gd.pairing.pairs[j].first});
          l2.push_back({idx[kb[j]], Dir::In, gd.pairing.pairs[j].second});
        }
        auto by_label = [](const Leg& x, const Leg& y) { return x.label < y.label; };
        std::sort(l1.begin(), l1.end(), by_label);
        std::sort(l2.begin(), l2.end(), by_label);
        g1.legs = l1;
        g2.legs = l2;
        if (!realizes(g1, s1) || !realizes(g2, s2)) continue;
        auto c1 = canonical_form(g1);
        auto c2 = canonical_form(g2);
        int i1 = gd.first->find(c1.graph), i2 = gd.second->find(c2.graph);
        if (i1 < 0 || i2 < 0) continue;
        if (gd.first->cells[i1].degenerate || gd.second->cells[i2].degenerate) continue;

        // Substitute s -> (s_a, s_b) in edge blocks, (h_a, k_a, k_b, h_b) in W_H.
        int sign = 1;
        OrientedBasis sub;
        for (std::size_t bi = 0; bi < base.edge_blocks.size(); ++bi) {
          bool det = bi == 2;
          TokenList t;
          for (auto& tok : base.edge_blocks[bi]) {
            int j = -1;
            for (int q = 0; q < n; ++q)
              if (tok.id == edge_id(g, ha[q])) j = q;
            if (j < 0) t.push_back(tok);
            else if (det) t.push_back({'E', std::min(hb[j], kb[j])});
            else t.insert(t.end(), {{'E', std::min(ha[j], ka[j])}, {'E', std::min(hb[j], kb[j])}});
          }
          sub.edge_blocks.push_back(t);
        }
        for (auto& blk : base.vh_blocks) {
          TokenList t;
          for (std::size_t q = 0; q < blk.size(); ++q) {
            int j = -1;
            for (int r = 0; r < n; ++r)
              if (blk[q].kind == 'H' && (blk[q].id == ha[r] || blk[q].id == hb[r])) j = r;
            if (j < 0) {
              t.push_back(blk[q]);
              continue;
            }
            if (blk[q].id == hb[j]) sign = -sign;
            t.insert(t.end(), {{'H', ha[j]}, {'H', ka[j]}, {'H', kb[j]}, {'H', hb[j]}});
            ++q;  // the partner half-edge follows
          }
          for (int j = 0; j < n; ++j) t.insert(t.end(), {{'V', ka[j]}, {'V', kb[j]}});
          sub.vh_blocks.push_back(t);
        }
        // Rename into the union of the canonical factors.
        RibbonGraph u = disjoint_union(c1.graph, c2.graph);
        std::vector<int> hmap(H + 2 * n);
        for (int h = 0; h < H + 2 * n; ++h)
          hmap[h] = side[h] == 0 ? c1.relabel[idx[h]] : k0 + c2.relabel[idx[h]];
        RibbonGraph cg = c;
        cg.legs.clear();
        auto renamed = rename_basis(sub, cg, hmap, u);
        sign *= basis_sign(renamed, product_basis(*gd.first, i1, *gd.second, i2, d));
        std::vector<int> cut;
        for (int j = 0; j < n; ++j) cut.push_back(ha[j]);
        out.push_back({i1, i2, cut, sign});
      } while (std::next_permutation(perm.begin(), perm.end()));
      return;
    }
    for (int q = start; q < static_cast<int>(candidates.size()); ++q) {
      chosen.push_back(candidates[q]);
      choose(q + 1);
      chosen.pop_back();
    }
  };
  choose(0);
  return out;
}

ProductChain transfer(const CellularChain& c, const GlueData& gd) {
  ProductChain out;
  for (auto& [i, coeff] : c.terms) {
    auto& cell = gd.glued->cells.at(i);
    if (cell.degenerate) continue;
    for (auto& dec : decompositions(gd, i)) {
      Rational w(gd.first->cells[dec.first].aut_order * gd.second->cells[dec.second].aut_order, cell.aut_order);
      out.add({dec.first, dec.second}, coeff * dec.sign * w);
    }
  }
  return out;
}

ProductChain product_boundary(const ProductChain& c, const GlueData& gd) {
  ProductChain out;
  int d = gd.glued->d;
  for (auto& [ij, coeff] : c.terms) {
    auto [i, j] = ij;
    auto& a = gd.first->cells[i];
    auto& b = gd.second->cells[j];
    if (a.degenerate || b.degenerate) continue;
    RibbonGraph u = disjoint_union(a.graph, b.graph);
    auto basis = product_basis(*gd.first, i, *gd.second, j, d);
    int H1 = a.graph.num_half_edges();
    for (int side = 0; side < 2; ++side) {
      const Cell& src = side == 0 ? a : b;
      const ModuliComplex& cx = side == 0 ? *gd.first : *gd.second;
      for (auto& att : src.attachments) {
        auto& tgt = cx.cells[att.target];
        if (tgt.degenerate) continue;
        int e = side == 0 ? att.edge : att.edge + H1;
        auto fp = project_to_face(u, basis, e);
        const RibbonGraph& cg = fp.collapse.graph;
        int split = side == 0 ? H1 - 2 : H1;
        RibbonGraph part = side == 0 ? subgraph_range(cg, 0, split) : subgraph_range(cg, split, cg.num_half_edges());
        auto canon = canonical_form(part);
        std::vector<int> hmap(cg.num_half_edges());
        for (int h = 0; h < cg.num_half_edges(); ++h) {
          if (side == 0) hmap[h] = h < split ? canon.relabel[h] : h;
          else hmap[h] = h < split ? h : split + canon.relabel[h - split];
        }
        int ti = side == 0 ? att.target : i, tj = side == 0 ? j : att.target;
        RibbonGraph target_u = disjoint_union(gd.first->cells[ti].graph, gd.second->cells[tj].graph);
        RibbonGraph cg_nolegs = cg;
        auto renamed = rename_basis(fp.basis, cg_nolegs, hmap, target_u);
        int s = fp.sign * basis_sign(renamed, product_basis(*gd.first, ti, *gd.second, tj, d));
        out.add({ti, tj}, coeff * s * Rational(tgt.aut_order, src.aut_order));
      }
    }
  }
  return out;
}

std::string dump_complex(const ModuliComplex& cx) {
  std::ostringstream os;
  for (int i = 0; i < static_cast<int>(cx.cells.size()); ++i) {
    auto& c = cx.cells[i];
    nlohmann::ordered_json j;
    j["cell"] = i;
    j["graph"] = to_literal(c.graph);
    j["dim"] = c.dim;
    j["label_free_dim"] = c.label_free_dim;
    j["codim"] = c.codim;
    j["aut"] = c.aut_order;
    j["degenerate"] = c.degenerate;
    auto att = nlohmann::ordered_json::array();
    for (auto& a : c.attachments) att.push_back({{"edge", a.edge}, {"target", a.target}, {"sign", a.sign}});
    j["attachments"] = att;
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace fgo
