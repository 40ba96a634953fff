#include "fgo/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fgo {

namespace pt = boost::property_tree;

SurfaceType parse_surface(const std::string& spec) {
  if (spec == "disk3" || spec == "tripod") return SurfaceType::disk(2, 1);
  if (spec == "annulus") return SurfaceType::from_counts(0, {2, 0});
  if (spec.rfind("disk", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(spec.substr(4));
    } catch (const std::exception&) {
      throw ConfigError("bad surface: " + spec);
    }
    if (n < 2) throw ConfigError("a disk needs at least 2 marks");
    return SurfaceType::disk(n - 1, 1);
  }
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("bad surface: " + spec);
  int genus = 0;
  try {
    genus = std::stoi(spec.substr(0, colon));
  } catch (const std::exception&) {
    throw ConfigError("bad genus in surface: " + spec);
  }
  std::vector<std::string> pats;
  boost::split(pats, spec.substr(colon + 1), boost::is_any_of(","));
  for (auto& p : pats)
    if (p.find_first_not_of("io") != std::string::npos) throw ConfigError("bad boundary pattern: " + p);
  if (genus < 0) throw ConfigError("negative genus");
  return SurfaceType::from_pattern(genus, pats);
}

SurfaceType RunConfig::surface_type() const { return parse_surface(surface); }

std::vector<std::pair<int, int>> RunConfig::pairs() const {
  std::vector<std::pair<int, int>> out;
  std::vector<std::string> items;
  boost::split(items, pairing, boost::is_any_of(";"));
  for (auto& it : items) {
    if (it.empty()) continue;
    auto c = it.find(':');
    if (c == std::string::npos) throw ConfigError("bad pairing: " + pairing);
    try {
      out.push_back({std::stoi(it.substr(0, c)), std::stoi(it.substr(c + 1))});
    } catch (const std::exception&) {
      throw ConfigError("bad pairing: " + pairing);
    }
  }
  return out;
}

void RunConfig::validate() const {
  if (!(tol > 0)) throw ConfigError("tol must be positive");
  if (!(residual_tol > 0)) throw ConfigError("residual_tol must be positive");
  if (!(length > 0)) throw ConfigError("length must be positive");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (max_valency < 0) throw ConfigError("max_valency must be >= 0");
  surface_type();
  pairs();
}

namespace {

// shortest text that reads back to the same double
std::string shortest(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

std::string RunConfig::to_ini() const {
  std::ostringstream os;
  os << "command = " << command << "\n"
     << "surface = " << surface << "\n"
     << "fn = " << fn << "\n"
     << "fn2 = " << fn2 << "\n"
     << "seed = " << seed << "\n"
     << "length = " << shortest(length) << "\n"
     << "tol = " << shortest(tol) << "\n"
     << "residual_tol = " << shortest(residual_tol) << "\n"
     << "jobs = " << jobs << "\n"
     << "max_valency = " << max_valency << "\n"
     << "pairing = " << pairing << "\n"
     << "out = " << out << "\n";
  return os.str();
}

std::string RunConfig::header() const {
  std::istringstream is(to_ini());
  std::string line, h;
  while (std::getline(is, line)) h += "# " + line + "\n";
  return h;
}

RunConfig RunConfig::from_ini(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  // Keys may sit at top level or in [run].
  const pt::ptree& t = tree.get_child_optional("run") ? tree.get_child("run") : tree;
  RunConfig c;
  auto str = [&](const char* key, std::string& dst) {
    if (auto v = t.get_optional<std::string>(key)) dst = boost::trim_copy(*v);
  };
  // strict numbers: the whole value must parse
  auto num = [&](const char* key, auto& dst) {
    auto v = t.get_optional<std::string>(key);
    if (!v) return;
    std::string x = boost::trim_copy(*v);
    auto [end, ec] = std::from_chars(x.data(), x.data() + x.size(), dst);
    if (ec != std::errc() || end != x.data() + x.size() || x.empty())
      throw ConfigError(std::string("config: bad value for ") + key + ": " + x);
  };
  str("command", c.command);
  str("surface", c.surface);
  str("fn", c.fn);
  str("fn2", c.fn2);
  num("seed", c.seed);
  num("length", c.length);
  num("tol", c.tol);
  num("residual_tol", c.residual_tol);
  num("jobs", c.jobs);
  num("max_valency", c.max_valency);
  str("pairing", c.pairing);
  str("out", c.out);
  for (auto& [k, v] : t) {
    static const char* known[] = {"command", "surface",     "fn",   "fn2",     "seed", "length",
                                  "tol",     "residual_tol", "jobs", "max_valency", "pairing", "out"};
    if (std::find(std::begin(known), std::end(known), k) == std::end(known) && v.empty())
      throw ConfigError("unknown config key: " + k);
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_ini(ss.str());
}

}  // namespace fgo
