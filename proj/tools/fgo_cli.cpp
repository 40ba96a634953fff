// Batch front end. Every output starts with the full config as '#' lines.
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fgo/config.hpp"
#include "fgo/flow_graph.hpp"
#include "fgo/moduli_complex.hpp"
#include "fgo/morse.hpp"
#include "fgo/operations.hpp"
#include "fgo/ribbon_graph.hpp"

using namespace fgo;

namespace {

constexpr int kOk = 0, kConfig = 2, kNumeric = 3, kVerify = 4;

std::string tuple_str(const std::vector<int>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s.empty() ? "-" : s;
}

std::vector<int> parse_tuple(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

CountOptions count_options(const RunConfig& c) {
  CountOptions o;
  o.flow.abs_tol = o.flow.rel_tol = c.tol;
  o.residual_tol = c.residual_tol;
  o.jobs = c.jobs;
  return o;
}

OperationOptions op_options(const RunConfig& c) {
  OperationOptions o;
  o.seed = c.seed;
  o.length = c.length;
  o.solve.flow.abs_tol = o.solve.flow.rel_tol = c.tol;
  o.solve.residual_tol = c.residual_tol;
  o.solve.jobs = c.jobs;
  return o;
}

MorseComplex load_morse(const RunConfig& c) { return morse_complex(MorseFunction::named(c.fn), count_options(c)); }

std::string morse_dump(const MorseComplex& mc) {
  std::ostringstream os;
  os.precision(12);
  os << "# generator\tindex\tposition\tvalue\n";
  for (std::size_t i = 0; i < mc.generators.size(); ++i) {
    auto& g = mc.generators[i];
    os << i << '\t' << g.index << '\t';
    for (int k = 0; k < g.position.size(); ++k) os << (k ? "," : "") << g.position[k];
    os << '\t' << g.value << '\n';
  }
  os << "# from\tto\tcount\n";
  for (std::size_t q = 0; q < mc.codifferential.size(); ++q)
    for (std::size_t p = 0; p < mc.codifferential[q].size(); ++p)
      if (mc.codifferential[q][p]) os << p << '\t' << q << '\t' << mc.codifferential[q][p] << '\n';
  auto r = mc.homology_ranks();
  os << "{\"squares_to_zero\":" << (mc.squares_to_zero() ? "true" : "false") << ",\"ranks\":[";
  for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
  os << "]}\n";
  return os.str();
}

struct Result {
  std::string body;
  int status = kOk;
};

Result cmd_enumerate(const RunConfig& c) {
  auto s = c.surface_type();
  auto en = enumerate_ribbon_graphs(s, c.max_valency);
  std::ostringstream os;
  os << "# surface " << s.describe() << "\n# class\tcodim\tedges\tliteral\n";
  for (std::size_t i = 0; i < en.graphs.size(); ++i)
    os << i << '\t' << en.codim[i] << '\t' << en.graphs[i].num_edges() << '\t' << to_literal(en.graphs[i]) << '\n';
  os << "{\"classes\":" << en.graphs.size() << "}\n";
  return {os.str()};
}

Result cmd_complex(const RunConfig& c) {
  auto mc = build_complex(c.surface_type(), MorseFunction::named(c.fn).dim);
  std::ostringstream os;
  os << dump_complex(mc);
  bool ok = true;
  for (int i = 0; i < static_cast<int>(mc.cells.size()); ++i) {
    CellularChain ch;
    ch.add(i, 1);
    bool zero = boundary(boundary(ch, mc), mc).zero();
    ok = ok && zero;
    os << "{\"check\":\"boundary_squared\",\"cell\":" << i << ",\"pass\":" << (zero ? "true" : "false") << "}\n";
  }
  if (mc.d % 2 == 0)
    for (auto& e : cancellation_report(mc)) {
      ok = ok && e.cancels;
      os << "{\"check\":\"cancellation\",\"cell\":" << e.cell << ",\"sources\":\"" << tuple_str(e.sources)
         << "\",\"signs\":\"" << tuple_str(e.signs) << "\",\"pass\":" << (e.cancels ? "true" : "false") << "}\n";
    }
  return {os.str(), ok ? kOk : kVerify};
}

Result cmd_morse(const RunConfig& c) {
  auto a = load_morse(c);
  std::ostringstream os;
  os << morse_dump(a);
  int status = a.squares_to_zero() ? kOk : kVerify;
  if (!c.fn2.empty()) {
    RunConfig c2 = c;
    c2.fn = c.fn2;
    auto b = load_morse(c2);
    ContinuationOptions co;
    co.count = count_options(c);
    auto psi = continuation_map(a, b, co);
    os << "# continuation to " << c.fn2 << "\n" << morse_dump(b) << "# psi row = target, column = source\n";
    for (auto& row : psi) {
      for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "\t" : "") << row[j];
      os << '\n';
    }
    bool cm = is_chain_map(a, b, psi), qi = is_quasi_isomorphism(a, b, psi);
    os << "{\"chain_map\":" << (cm ? "true" : "false") << ",\"quasi_isomorphism\":" << (qi ? "true" : "false")
       << "}\n";
    if (!cm || !qi) status = kVerify;
  }
  return {os.str(), status};
}

Result cmd_count(const RunConfig& c, const std::string& in_s, const std::string& out_s) {
  auto mc = load_morse(c);
  auto cx = build_complex(c.surface_type(), mc.f.dim);
  auto in = parse_tuple(in_s), out = parse_tuple(out_s);
  if (static_cast<int>(in.size()) != cx.surface.n_in() || static_cast<int>(out.size()) != cx.surface.n_out())
    throw ConfigError("--in/--out do not match the marks of the surface");
  for (int p : in)
    if (p < 0 || p >= static_cast<int>(mc.generators.size())) throw ConfigError("generator out of range");
  for (int p : out)
    if (p < 0 || p >= static_cast<int>(mc.generators.size())) throw ConfigError("generator out of range");
  auto opt = op_options(c);
  std::ostringstream os;
  os.precision(10);
  os << "# cell\tsolution\tsign\tresidual\tvertex positions\n";
  std::vector<int> gen(cx.surface.num_marks());
  auto dirs = cx.surface.directions();
  for (std::size_t l = 0, a = 0, b = 0; l < dirs.size(); ++l) gen[l] = dirs[l] == Dir::In ? in[a++] : out[b++];
  for (int ci = 0; ci < static_cast<int>(cx.cells.size()); ++ci) {
    auto& cell = cx.cells[ci];
    if (cell.codim != 0 || cell.degenerate) continue;
    auto pert = build_perturbation(opt.seed, cell.graph, mc.f.dim);
    std::vector<double> lengths(cell.graph.internal_edges().size(), opt.length);
    FlowGraphSystem sys(cell.graph, gen, mc, pert, lengths, opt.solve);
    if (!sys.rigid()) {
      os << "{\"cell\":" << ci << ",\"rigid\":false,\"expected_dimension\":" << sys.expected() << "}\n";
      continue;
    }
    auto sols = sys.solve();
    for (std::size_t k = 0; k < sols.size(); ++k) {
      os << ci << '\t' << k << '\t' << sys.sign(sols[k], cell.ref) << '\t'
         << (sols[k].residual < c.residual_tol ? "ok" : "loose") << '\t';
      for (std::size_t v = 0; v < sols[k].vertex_positions.size(); ++v)
        for (int j = 0; j < sols[k].vertex_positions[v].size(); ++j)
          os << (v || j ? "," : "") << std::round(sols[k].vertex_positions[v][j] * 1e6) / 1e6;
      os << '\n';
    }
    Rational k = cell_coefficient(cx, ci, mc, in, out, opt);
    os << "{\"cell\":" << ci << ",\"rigid\":true,\"solutions\":" << sols.size() << ",\"coefficient\":\""
       << k.numerator() << (k.denominator() == 1 ? "" : "/" + std::to_string(k.denominator())) << "\"}\n";
  }
  return {os.str()};
}

Result cmd_op(const RunConfig& c) {
  auto mc = load_morse(c);
  auto cx = build_complex(c.surface_type(), mc.f.dim);
  auto ch = operation_chain(cx, mc, {}, op_options(c));
  std::ostringstream os;
  os << format_table(ch);
  if (cx.surface == SurfaceType::disk(2, 1) && mc.f.dim == 2) {
    auto cp = cup_product(ch, mc);
    os << "# cup product: degree-one generators " << tuple_str(cp.degree_one) << ", top " << tuple_str(cp.top)
       << "\n";
    for (std::size_t i = 0; i < cp.table.size(); ++i)
      for (std::size_t j = 0; j < cp.table[i].size(); ++j) {
        os << cp.degree_one[i] << " . " << cp.degree_one[j] << '\t';
        for (std::size_t t = 0; t < cp.table[i][j].size(); ++t) os << (t ? "," : "") << cp.table[i][j][t];
        os << '\n';
      }
  }
  return {os.str()};
}

Result cmd_cochain(const RunConfig& c) {
  auto mc = load_morse(c);
  auto cx = build_complex(c.surface_type(), mc.f.dim);
  auto ch = operation_chain(cx, mc, {}, op_options(c));
  auto rep = verify_cochain_map(cx, mc, ch);
  std::ostringstream os;
  os << format_report(rep) << "{\"records\":" << rep.records.size() << ",\"failures\":" << rep.failures() << "}\n";
  return {os.str(), rep.ok() ? kOk : kVerify};
}

Result cmd_glue(const RunConfig& c, const std::string& second) {
  auto mc = load_morse(c);
  auto s1 = c.surface_type(), s2 = parse_surface(second);
  Pairing p{c.pairs()};
  if (p.pairs.empty()) throw ConfigError("gluing needs at least one shared leg");
  auto sg = glue_surface(s1, s2, p);
  auto c1 = build_complex(s1, mc.f.dim), c2 = build_complex(s2, mc.f.dim), cg = build_complex(sg, mc.f.dim);
  auto rep = verify_gluing(cg, c1, c2, p, mc, op_options(c));
  std::ostringstream os;
  os << "# glued surface " << sg.describe() << "\n"
     << format_report(rep) << "{\"records\":" << rep.records.size() << ",\"failures\":" << rep.failures() << "}\n";
  return {os.str(), rep.ok() ? kOk : kVerify};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-graph operations on tori"};
  app.require_subcommand(1);
  std::string config_path, in_s, out_s, second = "disk3";
  std::string surface, fn, pairing, out_path;
  unsigned long long seed = 0;
  double tol = 0, length = 0;
  int jobs = -1, genus = -1, boundary = -1;
  std::string marks;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "INI config file");
    s->add_option("--surface", surface, "disk<n>, annulus, or genus:pattern,...");
    s->add_option("--fn", fn, "Morse function name or record file");
    s->add_option("--seed", seed, "perturbation seed");
    s->add_option("--tol", tol, "flow integration tolerance");
    s->add_option("--length", length, "internal edge length at the label point");
    s->add_option("--out", out_path, "output file");
    s->add_option("--jobs", jobs, "worker threads, 0 for all cores");
  };
  auto* en = app.add_subcommand("enumerate", "ribbon graph classes of a surface");
  common(en);
  en->add_option("--genus", genus);
  en->add_option("--boundary", boundary);
  en->add_option("--marks", marks, "marks per boundary, e.g. 2,0; the last mark is outgoing");
  auto* cx = app.add_subcommand("complex", "cell complex dump and boundary checks");
  common(cx);
  auto* mo = app.add_subcommand("morse", "Morse complex, optionally continuation to --fn2");
  common(mo);
  std::string fn2;
  mo->add_option("--fn2", fn2);
  auto* co = app.add_subcommand("count", "flow graphs for one critical tuple");
  common(co);
  co->add_option("--in", in_s, "incoming generators by label")->required();
  co->add_option("--outputs", out_s, "outgoing generators by label")->required();
  auto* op = app.add_subcommand("op", "operation table");
  common(op);
  auto* cc = app.add_subcommand("cochain-check", "cochain-map identity");
  common(cc);
  auto* gc = app.add_subcommand("glue-check", "gluing axiom");
  common(gc);
  gc->add_option("--second", second, "second surface");
  gc->add_option("--pairing", pairing, "out:in pairs separated by ';'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }

  auto* sub = app.get_subcommands().front();
  RunConfig c;
  Result r;
  try {
    if (!config_path.empty()) c = RunConfig::load(config_path);
    c.command = sub->get_name();
    if (!surface.empty()) c.surface = surface;
    if (!fn.empty()) c.fn = fn;
    if (!fn2.empty()) c.fn2 = fn2;
    if (sub->count("--seed")) c.seed = seed;
    if (sub->count("--tol")) c.tol = tol;
    if (sub->count("--length")) c.length = length;
    if (sub->count("--jobs")) c.jobs = jobs;
    if (sub == gc && gc->count("--pairing")) c.pairing = pairing;
    if (!out_path.empty()) c.out = out_path;
    if (c.command == "enumerate" && (genus >= 0 || boundary >= 0 || !marks.empty())) {
      auto m = parse_tuple(marks);
      if (genus < 0) genus = 0;
      if (boundary < 0) boundary = static_cast<int>(m.size());
      if (static_cast<int>(m.size()) != boundary) throw ConfigError("--marks needs one count per boundary");
      std::string spec = std::to_string(genus) + ":";
      int total = 0;
      for (int x : m) total += x;
      if (total == 0) throw ConfigError("at least one marked point is required");
      int seen = 0;
      for (std::size_t b = 0; b < m.size(); ++b) {
        if (b) spec += ",";
        for (int k = 0; k < m[b]; ++k) spec += (++seen == total) ? 'o' : 'i';
      }
      c.surface = spec;
    }
    c.validate();

    if (c.command == "enumerate") r = cmd_enumerate(c);
    else if (c.command == "complex") r = cmd_complex(c);
    else if (c.command == "morse") r = cmd_morse(c);
    else if (c.command == "count") r = cmd_count(c, in_s, out_s);
    else if (c.command == "op") r = cmd_op(c);
    else if (c.command == "cochain-check") r = cmd_cochain(c);
    else r = cmd_glue(c, second);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const GraphError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const MorseError& e) {
    std::cerr << (e.kind == MorseError::Kind::Precondition ? "config error: " : "numerical failure: ") << e.what()
              << "\n";
    return e.kind == MorseError::Kind::Precondition ? kConfig : kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }

  std::string text = c.header() + r.body;
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) {
      std::cerr << "cannot write " << c.out << "\n";
      return kConfig;
    }
    f << text;
  }
  return r.status;
}
