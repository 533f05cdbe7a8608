#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ifeig {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

double distance(Point a, Point b);

// Axis-aligned rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

struct Circle {
  Point center;
  double radius = 0.0;
};

using Triangle = std::array<int, 3>;

inline constexpr int kBackgroundTag = 0;
inline constexpr int kNoInterface = -1;

/// Planar triangulation. Triangles are counterclockwise; region 0 is the
/// background and region i+1 is the disk of circle i.
struct Mesh {
  std::vector<Point> nodes;
  std::vector<Triangle> triangles;
  std::vector<int> region;              // per triangle
  std::vector<std::uint8_t> boundary;   // per node, 1 on the outer boundary
  std::vector<int> interface_circle;    // per node, circle index or kNoInterface
  double h_max = 0.0;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  std::array<Point, 3> vertices(std::size_t t) const {
    const auto& tri = triangles[t];
    return {nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]};
  }
  Point centroid(std::size_t t) const;
  double signed_area(std::size_t t) const;

  // Recomputes h_max as the longest triangle edge.
  void update_h_max();
};

// Equality on the serialized content: coordinates, connectivity, tags and flags.
bool same_content(const Mesh& a, const Mesh& b);

double signed_area(Point a, Point b, Point c);

/// Uniform right-triangle mesh with ceil(side/h) cells per axis, every cell cut
/// along its (x0,y0)-(x1,y1) diagonal.
Mesh generate_structured_mesh(const Rect& domain, double h);

inline constexpr double kDefaultSnapFraction = 0.45;

/// Radially projects every interior node within snap_fraction*h_max of a circle
/// onto that circle, closest first, skipping a node whose projection would
/// collapse an incident triangle. Halves the band and retries on inversion.
Mesh fit_interfaces(const Mesh& mesh, std::span<const Circle> circles,
                    double snap_fraction = kDefaultSnapFraction);

/// Tags each triangle by the first circle whose closed disk holds its centroid.
Mesh classify_regions(const Mesh& mesh, std::span<const Circle> circles);

// Smallest triangle signed area; used as a non-inversion witness.
double min_signed_area(const Mesh& mesh);

}  // namespace ifeig
