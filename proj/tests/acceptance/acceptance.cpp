// One PASS/FAIL line per acceptance criterion, with timings. Exit status is
// the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fgo/moduli_complex.hpp"
#include "fgo/operations.hpp"
#include "oracles/simplicial_torus.hpp"

using namespace fgo;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

int failed = 0;

void report(int n, const std::string& name, double limit, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  bool in_time = limit <= 0 || secs < limit;
  bool ok = o.pass && in_time;
  if (!ok) ++failed;
  std::printf("[%s] %d %s (%.1f s%s) %s\n", ok ? "PASS" : "FAIL", n, name.c_str(), secs,
              limit > 0 ? (in_time ? "" : ", over the time limit") : "", o.detail.c_str());
  std::fflush(stdout);
}

int count_codim(const Enumeration& en, int c) { return static_cast<int>(std::count(en.codim.begin(), en.codim.end(), c)); }

// Every surface whose trivalent cells have at most max_edges edges
// (|E| = 2n - 3 chi), with a few direction patterns per mark layout.
std::vector<SurfaceType> admissible_surfaces(int max_edges) {
  std::vector<SurfaceType> out;
  for (int g = 0; g <= 2; ++g)
    for (int m = 1; m <= 5; ++m)
      for (int n = 1; n <= 8; ++n) {
        int chi = 2 - 2 * g - m;
        int e = 2 * n - 3 * chi;
        if (e > max_edges || n - chi < 2) continue;  // need an internal vertex
        // compositions of n into m parts, first part nonzero
        std::vector<int> parts(m, 0);
        std::function<void(int, int)> rec = [&](int i, int left) {
          if (i == m - 1) {
            parts[i] = left;
            if (parts[0] == 0) return;
            for (int variant = 0; variant < 2; ++variant) {
              std::vector<std::string> pats;
              int seen = 0;
              for (int b = 0; b < m; ++b) {
                std::string p;
                for (int k = 0; k < parts[b]; ++k, ++seen) {
                  bool outgoing = variant == 0 ? seen == n - 1 : (seen == 0 || (n > 2 && seen == n - 1));
                  p += outgoing ? 'o' : 'i';
                }
                pats.push_back(p);
              }
              out.push_back(SurfaceType::from_pattern(g, pats));
              if (n == 1) break;
            }
            return;
          }
          for (int k = 0; k <= left; ++k) {
            parts[i] = k;
            rec(i + 1, left - k);
          }
        };
        rec(0, n);
      }
  return out;
}

std::string str(const IntMatrix& m) {
  std::ostringstream os;
  for (auto& r : m) {
    os << "[";
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << r[j];
    os << "]";
  }
  return os.str();
}

bool same_terms(const OperationChain& a, const OperationChain& b, std::string* why) {
  if (a.terms.size() != b.terms.size()) {
    *why = std::to_string(a.terms.size()) + " vs " + std::to_string(b.terms.size()) + " terms";
    return false;
  }
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    auto &x = a.terms[i], &y = b.terms[i];
    if (x.inputs != y.inputs || x.outputs != y.outputs || x.cell != y.cell || x.coefficient != y.coefficient) {
      *why = "term " + std::to_string(i) + " differs";
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  std::cout << "acceptance run\n" << std::flush;

  report(1, "annulus with two marks on one boundary: 5 classes", 5, [] {
    auto en = enumerate_ribbon_graphs(SurfaceType::from_counts(0, {2, 0}));
    int top = count_codim(en, 0), face = count_codim(en, 1);
    int two_trivalent = 0, one_four = 0;
    for (auto& g : en.graphs) {
      int three = 0, four = 0;
      for (int v : g.internal_vertices()) {
        int val = static_cast<int>(g.vertices()[v].size());
        three += val == 3;
        four += val == 4;
      }
      two_trivalent += three == 2 && four == 0;
      one_four += three == 0 && four == 1;
    }
    bool ok = en.graphs.size() == 5 && top == 3 && face == 2 && two_trivalent == 3 && one_four == 2;
    return Outcome{ok, "classes=" + std::to_string(en.graphs.size()) + " trivalent=" + std::to_string(two_trivalent) +
                           " four-valent=" + std::to_string(one_four)};
  });

  report(2, "disk with four marks: 2 top cells on one codim-1 cell", 5, [] {
    auto cx = build_complex(SurfaceType::disk(3, 1), 2);
    int top = 0, face = -1;
    for (int i = 0; i < static_cast<int>(cx.cells.size()); ++i) {
      if (cx.cells[i].codim == 0) ++top;
      if (cx.cells[i].codim == 1) face = i;
    }
    bool attached = face >= 0;
    for (auto& c : cx.cells)
      if (c.codim == 0) attached = attached && c.attachments.size() == 1 && c.attachments[0].target == face;
    bool ok = cx.cells.size() == 3 && top == 2 && attached;
    return Outcome{ok, "cells=" + std::to_string(cx.cells.size()) + " top=" + std::to_string(top)};
  });

  report(3, "boundary squared vanishes, up to 8 edges", 60, [] {
    auto surfaces = admissible_surfaces(8);
    long cells = 0, bad = 0, faces = 0, cancelled = 0;
    for (auto& s : surfaces)
      for (int d : {1, 2}) {
        auto cx = build_complex(s, d);
        for (int i = 0; i < static_cast<int>(cx.cells.size()); ++i) {
          CellularChain c;
          c.add(i, 1);
          ++cells;
          bad += !boundary(boundary(c, cx), cx).zero();
        }
        if (d == 2)
          for (auto& e : cancellation_report(cx)) {
            ++faces;
            cancelled += e.cancels;
          }
      }
    return Outcome{bad == 0 && cancelled == faces,
                   std::to_string(surfaces.size()) + " surfaces x 2 parities, " + std::to_string(cells) +
                       " cells, nonzero=" + std::to_string(bad) + ", codim-1 pairs cancelled " +
                       std::to_string(cancelled) + "/" + std::to_string(faces)};
  });

  report(4, "Morse complexes on the circle and the torus", 60, [] {
    bool ok = true;
    std::string detail;
    for (auto [name, ranks] : {std::pair<const char*, std::vector<int>>{"t1-cos", {1, 1}},
                               {"t1-double", {1, 1}},
                               {"t2-coscos", {1, 2, 1}},
                               {"t2-split", {1, 2, 1}}}) {
      CountOptions base, half;
      half.flow.abs_tol = base.flow.abs_tol / 2;
      half.flow.rel_tol = base.flow.rel_tol / 2;
      auto a = morse_complex(MorseFunction::named(name), base);
      auto b = morse_complex(MorseFunction::named(name), half);
      bool here = a.squares_to_zero() && a.homology_ranks() == ranks && a.codifferential == b.codifferential;
      ok = ok && here;
      detail += std::string(name) + (here ? " ok " : " BAD ");
    }
    return Outcome{ok, detail};
  });

  auto torus = morse_complex(MorseFunction::named("t2-coscos"));
  auto tri = build_complex(SurfaceType::disk(2, 1), 2);
  OperationOptions base;
  OperationChain tri_chain;

  report(5, "tripod counts reproduce the simplicial cup product", 600, [&] {
    tri_chain = operation_chain(tri, torus, {}, base);
    auto cp = cup_product(tri_chain, torus);
    auto o = oracle::cup_matrix(3);
    if (cp.degree_one.size() != 2 || cp.top.size() != 1) return Outcome{false, "unexpected generators"};
    // Morse basis vs seam basis: some permutation and signs of the degree-one
    // generators and of the top generator.
    bool found = false;
    for (int swap = 0; swap < 2 && !found; ++swap)
      for (int sa : {1, -1})
        for (int sb : {1, -1})
          for (int st : {1, -1}) {
            int s[2] = {sa, sb};
            bool all = true;
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j) {
                int oi = swap ? 1 - i : i, oj = swap ? 1 - j : j;
                all = all && cp.table[i][j][0] == s[i] * s[j] * st * o[oi][oj];
              }
            found = found || all;
          }
    auto rep = verify_cochain_map(tri, torus, tri_chain);
    std::ostringstream os;
    os << "morse [[" << cp.table[0][0][0] << " " << cp.table[0][1][0] << "][" << cp.table[1][0][0] << " "
       << cp.table[1][1][0] << "]] oracle [[" << o[0][0] << " " << o[0][1] << "][" << o[1][0] << " " << o[1][1]
       << "]], cochain failures " << rep.failures() << ", " << tri_chain.solved << " rigid systems";
    return Outcome{found && rep.ok(), os.str()};
  });

  auto circle = morse_complex(MorseFunction::named("t1-double"));
  auto d4_circle = build_complex(SurfaceType::disk(3, 1), 1);
  auto d4 = build_complex(SurfaceType::disk(3, 1), 2);
  OperationChain d4_chain;

  report(6, "two seeds and two label points give identical counts", 0, [&] {
    std::string detail;
    bool ok = true;
    OperationOptions s11 = base, both = base;
    s11.seed = 11;
    both.seed = 11;
    both.length = 0.7;
    auto check = [&](const std::string& what, const OperationChain& a, const OperationChain& b) {
      std::string why;
      bool same = same_terms(a, b, &why);
      ok = ok && same;
      detail += what + (same ? " same; " : " differs (" + why + "); ");
    };
    // the tripod has no internal edge, so only the seed can matter there
    check("tripod seed 11", tri_chain, operation_chain(tri, torus, {}, s11));
    d4_chain = operation_chain(d4, torus, {}, base);
    check("disk-4 seed 11 length 0.7", d4_chain, operation_chain(d4, torus, {}, both));
    return Outcome{ok, detail};
  });

  report(7, "sign laws over 1000 relabelings per solution", 0, [&] {
    long checks = 0, bad = 0, solutions = 0;
    auto run = [&](const ModuliComplex& cx, const MorseComplex& mc, const std::vector<int>& gen) {
      for (auto& cell : cx.cells) {
        if (cell.codim != 0) continue;
        auto pert = build_perturbation(base.seed, cell.graph, mc.f.dim);
        std::vector<double> lengths(cell.graph.internal_edges().size(), base.length);
        FlowGraphSystem sys(cell.graph, gen, mc, pert, lengths);
        if (!sys.rigid()) continue;
        auto gr = sys.grading();
        for (auto& s : sys.solve()) {
          ++solutions;
          int ref = sys.sign(s, cell.ref);
          for (unsigned long long k = 0; k < 1000; ++k) {
            auto od = random_relabel(cell.graph, cell.ref, 7919 * k + 1);
            ++checks;
            bad += sys.sign(s, od) != ref * relabel_sign(cell.graph, cell.ref, od, SignLevel::Flow, gr);
          }
        }
      }
    };
    run(tri, torus, {1, 2, 3});
    run(tri, torus, {0, 0, 0});
    run(d4_circle, circle, {0, 0, 2, 2});
    run(d4_circle, circle, {1, 1, 1, 1});
    run(d4, torus, {1, 2, 0, 3});
    return Outcome{bad == 0 && solutions > 0, std::to_string(solutions) + " solutions, " + std::to_string(checks) +
                                                  " relabelings, " + std::to_string(bad) + " violations"};
  });

  report(8, "tripod glued to tripod agrees with disk-4", 0, [&] {
    if (d4_chain.terms.empty()) d4_chain = operation_chain(d4, torus, {}, base);
    auto coch = verify_cochain_map(d4, torus, d4_chain);
    Pairing p{{{2, 0}}};
    GlueData gd{&d4, &tri, &tri, p};
    auto gl = verify_gluing(gd, d4_chain, tri_chain, tri_chain, torus);
    // associativity of the induced product: (ab)c = a(bc) on every triple
    long triples = 0, nonassoc = 0;
    int n = static_cast<int>(torus.generators.size());
    auto mul = [&](int a, int b) {
      std::vector<Rational> v(n, 0);
      for (int o = 0; o < n; ++o) v[o] = tri_chain.coefficient({a, b}, 0, {o});
      return v;
    };
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          std::vector<Rational> left(n, 0), right(n, 0);
          auto ab = mul(a, b), bc = mul(b, c);
          for (int m = 0; m < n; ++m) {
            if (ab[m].numerator() != 0) {
              auto x = mul(m, c);
              for (int o = 0; o < n; ++o) left[o] += ab[m] * x[o];
            }
            if (bc[m].numerator() != 0) {
              auto x = mul(a, m);
              for (int o = 0; o < n; ++o) right[o] += bc[m] * x[o];
            }
          }
          ++triples;
          nonassoc += left != right;
        }
    std::ostringstream os;
    os << "glue records " << gl.records.size() << ", failures " << gl.failures() << "; disk-4 cochain failures "
       << coch.failures() << "; associativity " << (triples - nonassoc) << "/" << triples;
    return Outcome{gl.ok() && !gl.records.empty() && coch.ok() && nonassoc == 0, os.str()};
  });

  report(9, "continuation map is a chain map and a homology isomorphism", 0, [] {
    bool ok = true;
    std::string detail;
    for (auto [x, y] : {std::pair<const char*, const char*>{"t1-cos", "t1-cos-shift"},
                        {"t1-cos", "t1-double"},
                        {"t2-coscos", "t2-shift"}}) {
      auto a = morse_complex(MorseFunction::named(x));
      auto b = morse_complex(MorseFunction::named(y));
      auto psi = continuation_map(a, b);
      bool cm = is_chain_map(a, b, psi), qi = is_quasi_isomorphism(a, b, psi);
      ok = ok && cm && qi;
      detail += std::string(x) + "->" + y + " " + str(psi) + (cm && qi ? " ok; " : " BAD; ");
    }
    return Outcome{ok, detail};
  });

  std::printf("%d of 9 criteria failed\n", failed);
  return failed;
}
