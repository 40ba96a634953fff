#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fgo/ribbon_graph.hpp"

namespace fgo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a command needs. Read from INI text ([run] section, or no
// section at all) and then overridden by flags.
struct RunConfig {
  std::string command;
  std::string surface = "disk3";  // disk<n>, annulus, or genus:pattern,pattern (e.g. 0:iio,)
  std::string fn = "t2-coscos";
  std::string fn2;                // second function, continuation only
  unsigned long long seed = 7;
  double length = 1.0;
  double tol = 1e-12;             // flow integration, absolute and relative
  double residual_tol = 1e-10;
  int jobs = 1;
  int max_valency = 0;
  std::string pairing = "2:0";    // out label of the first surface : in label of the second
  std::string out;                // empty: stdout

  SurfaceType surface_type() const;
  std::vector<std::pair<int, int>> pairs() const;
  // Throws ConfigError on any inconsistent value.
  void validate() const;
  // Stable key = value text, keys in a fixed order.
  std::string to_ini() const;
  // Every line prefixed with "# ".
  std::string header() const;

  static RunConfig from_ini(const std::string& text);
  static RunConfig load(const std::string& path);
};

SurfaceType parse_surface(const std::string& spec);

}  // namespace fgo
