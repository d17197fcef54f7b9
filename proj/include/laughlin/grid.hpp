#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "laughlin/geometry.hpp"

namespace laughlin {

// Uniform square-cell grid. values are row-major: index = j * nx + i with
// i along x and j along y; cell centers at origin + ((i+0.5) h, (j+0.5) h).
struct GridSpec {
  Vec2 origin{0.0, 0.0};
  double h = 0.0;
  int nx = 0;
  int ny = 0;

  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  Vec2 cell_center(int i, int j) const {
    return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
  }
  Vec2 cell_center(int idx) const { return cell_center(idx % nx, idx / nx); }
  bool contains(Vec2 p) const {
    return p.x >= origin.x && p.y >= origin.y && p.x < origin.x + nx * h &&
           p.y < origin.y + ny * h;
  }
  // cell containing p; caller checks contains()
  int cell_of(Vec2 p) const {
    const int i = static_cast<int>((p.x - origin.x) / h);
    const int j = static_cast<int>((p.y - origin.y) / h);
    return index(std::min(i, nx - 1), std::min(j, ny - 1));
  }
  bool operator==(const GridSpec&) const = default;
};

enum class FieldRole { Sigma, Phi };

struct GridField {
  GridSpec spec;
  FieldRole role = FieldRole::Sigma;
  std::vector<double> values;

  GridField() = default;
  GridField(const GridSpec& s, FieldRole r, double fill = 0.0)
      : spec(s), role(r), values(s.size(), fill) {}

  double& at(int i, int j) { return values[spec.index(i, j)]; }
  double at(int i, int j) const { return values[spec.index(i, j)]; }
};

}  // namespace laughlin
