#include "simplicial_torus.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace oracle {

namespace {

int sort_sign(std::array<int, 3>& t) {
  int s = 1;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b + 1 < 3 - a; ++b)
      if (t[b] > t[b + 1]) {
        std::swap(t[b], t[b + 1]);
        s = -s;
      }
  return s;
}

}  // namespace

SimplicialTorus::SimplicialTorus(int n_) : n(n_) {
  if (n < 3) throw std::invalid_argument("grid torus needs n >= 3");
  std::map<std::array<int, 2>, int> seen;
  auto add_edge = [&](int a, int b) {
    std::array<int, 2> e{std::min(a, b), std::max(a, b)};
    if (!seen.count(e)) {
      seen[e] = static_cast<int>(edges.size());
      edges.push_back(e);
    }
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int a = vertex(i, j), b = vertex(i + 1, j), c = vertex(i + 1, j + 1), e = vertex(i, j + 1);
      // counterclockwise in the (x, y) = (i, j) plane
      for (auto t : {std::array<int, 3>{a, b, c}, std::array<int, 3>{a, c, e}}) {
        add_edge(t[0], t[1]);
        add_edge(t[1], t[2]);
        add_edge(t[0], t[2]);
        orientation.push_back(sort_sign(t));
        triangles.push_back(t);
      }
    }
}

int SimplicialTorus::vertex(int i, int j) const { return ((i % n + n) % n) * n + (j % n + n) % n; }

namespace {

// +1 if going from a to b steps across the seam of the given axis forwards.
int seam(int a, int b, int n, bool x_axis) {
  int ca = x_axis ? a / n : a % n;
  int cb = x_axis ? b / n : b % n;
  if (ca == n - 1 && cb == 0) return 1;
  if (ca == 0 && cb == n - 1) return -1;
  return 0;
}

}  // namespace

std::vector<int> SimplicialTorus::dx() const {
  std::vector<int> c;
  for (auto& e : edges) c.push_back(seam(e[0], e[1], n, true));
  return c;
}

std::vector<int> SimplicialTorus::dy() const {
  std::vector<int> c;
  for (auto& e : edges) c.push_back(seam(e[0], e[1], n, false));
  return c;
}

namespace {

int edge_value(const SimplicialTorus& t, const std::vector<int>& c, int a, int b) {
  for (std::size_t k = 0; k < t.edges.size(); ++k)
    if (t.edges[k][0] == a && t.edges[k][1] == b) return c[k];
  throw std::logic_error("not an edge");
}

}  // namespace

std::vector<int> SimplicialTorus::coboundary1(const std::vector<int>& c) const {
  std::vector<int> out;
  for (auto& t : triangles)
    out.push_back(edge_value(*this, c, t[1], t[2]) - edge_value(*this, c, t[0], t[2]) +
                  edge_value(*this, c, t[0], t[1]));
  return out;
}

std::vector<int> SimplicialTorus::cup11(const std::vector<int>& a, const std::vector<int>& b) const {
  std::vector<int> out;
  for (auto& t : triangles) out.push_back(edge_value(*this, a, t[0], t[1]) * edge_value(*this, b, t[1], t[2]));
  return out;
}

int SimplicialTorus::evaluate(const std::vector<int>& c2) const {
  int s = 0;
  for (std::size_t k = 0; k < triangles.size(); ++k) s += orientation[k] * c2[k];
  return s;
}

std::array<std::array<int, 2>, 2> cup_matrix(int n) {
  SimplicialTorus t(n);
  std::vector<int> e[2] = {t.dx(), t.dy()};
  std::array<std::array<int, 2>, 2> m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m[i][j] = t.evaluate(t.cup11(e[i], e[j]));
  return m;
}

}  // namespace oracle
