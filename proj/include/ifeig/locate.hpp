#pragma once

#include <array>
#include <vector>

#include "ifeig/mesh.hpp"

namespace ifeig {

enum class LocateStatus { inside, snapped_to_nearest };

struct LocateResult {
  int triangle = -1;
  std::array<double, 3> barycentric{};
  LocateStatus status = LocateStatus::inside;
};

// Raw barycentric coordinates of p in triangle (a, b, c); may be negative.
std::array<double, 3> barycentric(Point p, Point a, Point b, Point c);

/// Point location over an immutable mesh. Small meshes are scanned; larger
/// ones use a uniform bucket grid. Both paths return the lowest-index
/// containing triangle, and fall back to the least-violating triangle (with
/// clamped, renormalized coordinates) for points outside the mesh.
class PointLocator {
 public:
  static constexpr std::size_t kBruteForceLimit = 1000;

  explicit PointLocator(const Mesh& mesh, bool force_brute_force = false);

  LocateResult locate(Point p) const;
  bool uses_grid() const { return !cells_.empty(); }

 private:
  LocateResult scan_all(Point p) const;
  std::size_t cell_of(Point p) const;

  const Mesh* mesh_;
  double x0_ = 0.0, y0_ = 0.0, dx_ = 1.0, dy_ = 1.0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::size_t> cell_start_;
  std::vector<int> cells_;
};

LocateResult locate_point(const Mesh& mesh, Point p);

}  // namespace ifeig
