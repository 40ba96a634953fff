#include "fgo/orientation.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace fgo {

int edge_id(const RibbonGraph& g, int h) { return std::min(h, g.iota[h]); }

int vertex_id(const RibbonGraph& g, int h) {
  int m = h;
  for (int x = g.sigma[h]; x != h; x = g.sigma[x]) m = std::min(m, x);
  return m;
}

OrientationData reference_orientation(const RibbonGraph& g) {
  OrientationData od;
  od.edge_source = g.internal_edges();
  auto vs = g.vertices();
  for (int v : g.internal_vertices()) od.vertex_order.push_back(vs[v][0]);
  for (auto [a, b] : g.edges()) {
    od.edge_order.push_back(a);
    int l = g.leg_at(a) >= 0 ? g.leg_at(a) : g.leg_at(b);
    if (l >= 0 && g.legs[l].dir == Dir::In) od.incoming_order.push_back(a);
  }
  return od;
}

int permutation_sign(const TokenList& a, const TokenList& b) {
  if (a.size() != b.size()) throw GraphError("token lists differ in length");
  std::map<Token, int> pos;
  for (int i = 0; i < static_cast<int>(b.size()); ++i) pos[b[i]] = i;
  std::vector<int> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto it = pos.find(a[i]);
    if (it == pos.end()) throw GraphError("token lists differ");
    p[i] = it->second;
  }
  int sign = 1;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = 1;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

TokenList edge_block(const RibbonGraph&, const OrientationData& od) {
  TokenList t;
  for (int e : od.edge_order) t.push_back({'E', e});
  return t;
}

TokenList det_edge_block(const RibbonGraph& g, const OrientationData& od) {
  TokenList t;
  for (int e : od.edge_order)
    if (!g.is_external_edge(e)) t.push_back({'E', e});
  for (int e : od.incoming_order) t.push_back({'E', e});
  return t;
}

TokenList vh_block(const RibbonGraph& g, const OrientationData& od) {
  TokenList t;
  for (int v : od.vertex_order) t.push_back({'V', v});
  for (auto& l : g.legs) t.push_back({'V', l.half_edge});
  auto internal = g.internal_edges();
  for (int e : od.edge_order) {
    int l = g.leg_at(e) >= 0 ? g.leg_at(e) : g.leg_at(g.iota[e]);
    if (l >= 0) {
      int leg = g.legs[l].half_edge, in = g.iota[leg];
      if (g.legs[l].dir == Dir::In) t.insert(t.end(), {{'H', leg}, {'H', in}});
      else t.insert(t.end(), {{'H', in}, {'H', leg}});
      continue;
    }
    auto it = std::find(internal.begin(), internal.end(), e);
    int src = od.edge_source.at(it - internal.begin());
    t.insert(t.end(), {{'H', src}, {'H', g.iota[src]}});
  }
  return t;
}

namespace {

int reversal_count(const RibbonGraph&, const OrientationData& a, const OrientationData& b) {
  int n = 0;
  for (std::size_t i = 0; i < a.edge_source.size(); ++i) n += a.edge_source[i] != b.edge_source.at(i);
  return n;
}

int koszul_sign(const std::vector<int>& a, const std::vector<int>& b, const std::map<int, int>& degree) {
  std::map<int, int> pos;
  for (int i = 0; i < static_cast<int>(b.size()); ++i) pos[b[i]] = i;
  int s = 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (pos.at(a[i]) > pos.at(a[j]) && (degree.at(a[i]) * degree.at(a[j])) % 2 != 0) s = -s;
  return s;
}

TokenList vertex_tokens(const OrientationData& od) {
  TokenList t;
  for (int v : od.vertex_order) t.push_back({'V', v});
  return t;
}

}  // namespace

int relabel_sign(const RibbonGraph& g, const OrientationData& a, const OrientationData& b, SignLevel level,
                 const FlowGrading& grading) {
  if (a.edge_source.size() != b.edge_source.size() || a.edge_order.size() != b.edge_order.size() ||
      a.vertex_order.size() != b.vertex_order.size())
    throw GraphError("orientation data belong to different graphs");
  auto or_sign = [&] {
    return permutation_sign(edge_block(g, a), edge_block(g, b)) * permutation_sign(vh_block(g, a), vh_block(g, b));
  };
  auto det_sign = [&] {
    return permutation_sign(det_edge_block(g, a), det_edge_block(g, b)) *
           permutation_sign(vh_block(g, a), vh_block(g, b));
  };
  switch (level) {
    case SignLevel::Or:
      return or_sign();
    case SignLevel::Det:
      return det_sign();
    case SignLevel::DetOr:
      return (grading.d % 2 ? det_sign() : 1) * or_sign();
    case SignLevel::Flow: {
      int d = grading.d;
      int flips = reversal_count(g, a, b);
      int s = (d % 2 && flips % 2) ? -1 : 1;
      if (d % 2) s *= permutation_sign(vertex_tokens(a), vertex_tokens(b));
      std::map<int, int> k;
      for (int e : a.edge_order) {
        int l = g.leg_at(e) >= 0 ? g.leg_at(e) : g.leg_at(g.iota[e]);
        if (l < 0) k[e] = d + 1;
        else {
          int ind = grading.leg_index.at(g.legs[l].label);
          k[e] = g.legs[l].dir == Dir::In ? d - ind + 1 : ind + 1;
        }
      }
      return s * koszul_sign(a.edge_order, b.edge_order, k);
    }
  }
  return 1;
}

TokenList conant_vogtmann_tokens(const RibbonGraph& g) {
  TokenList t;
  for (auto& v : g.vertices()) {
    if (v.size() % 2 == 0) throw GraphError("natural orientation needs odd valency");
    t.push_back({'V', v[0]});
    for (int h : v) t.push_back({'H', h});
  }
  return t;
}

Token rename_token(const Token& t, const RibbonGraph& g, const std::vector<int>& hmap, const RibbonGraph& h) {
  switch (t.kind) {
    case 'H':
      return {'H', hmap.at(t.id)};
    case 'E': {
      int x = hmap.at(t.id);
      if (x < 0) x = hmap.at(g.iota[t.id]);
      return {'E', edge_id(h, x)};
    }
    default: {
      int x = t.id;
      while (hmap.at(x) < 0) {
        x = g.sigma[x];
        if (x == t.id) throw GraphError("vertex vanished under map");
      }
      return {'V', vertex_id(h, hmap[x])};
    }
  }
}

TokenList rename_tokens(const TokenList& ts, const RibbonGraph& g, const std::vector<int>& hmap,
                        const RibbonGraph& h) {
  TokenList out;
  out.reserve(ts.size());
  for (auto& t : ts) out.push_back(rename_token(t, g, hmap, h));
  return out;
}

int conant_vogtmann_sign(const RibbonGraph& g, const Iso& phi) {
  auto t = conant_vogtmann_tokens(g);
  return permutation_sign(rename_tokens(t, g, phi, g), t);
}

int conant_vogtmann_relative(const RibbonGraph& g, const OrientationData& od) {
  return permutation_sign(vh_block(g, od), conant_vogtmann_tokens(g));
}

OrientationData random_relabel(const RibbonGraph& g, const OrientationData& od, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  OrientationData r = od;
  std::shuffle(r.vertex_order.begin(), r.vertex_order.end(), rng);
  std::shuffle(r.edge_order.begin(), r.edge_order.end(), rng);
  std::shuffle(r.incoming_order.begin(), r.incoming_order.end(), rng);
  for (auto& s : r.edge_source)
    if (rng() & 1) s = g.iota[s];
  return r;
}

}  // namespace fgo
