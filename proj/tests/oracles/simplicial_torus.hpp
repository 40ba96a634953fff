#pragma once

#include <array>
#include <vector>

namespace oracle {

// n x n grid torus, each square cut along its diagonal. Vertices are ordered
// by i*n + j and every simplex is stored with sorted vertices, so the
// Alexander-Whitney formula applies directly.
struct SimplicialTorus {
  int n;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> orientation;  // fundamental class coefficient per triangle

  explicit SimplicialTorus(int n = 3);
  int vertex(int i, int j) const;

  // Seam cocycles: dx counts crossings of the x = 0 seam, dy of y = 0.
  std::vector<int> dx() const;
  std::vector<int> dy() const;
  std::vector<int> coboundary1(const std::vector<int>& c) const;  // C^1 -> C^2
  std::vector<int> cup11(const std::vector<int>& a, const std::vector<int>& b) const;
  int evaluate(const std::vector<int>& c2) const;  // on the fundamental class
};

// [i][j] = <e_i cup e_j, [T]> for e = (dx, dy).
std::array<std::array<int, 2>, 2> cup_matrix(int n = 3);

}  // namespace oracle
