#include "ifeig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <string>

#include "ifeig/error.hpp"

namespace ifeig {

namespace {

// A snapped triangle must keep this fraction of its original area; anything
// smaller counts as inverted.
constexpr double kMinAreaRatio = 0.05;
constexpr int kMaxSnapRetries = 4;

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double signed_area(Point a, Point b, Point c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

Point Mesh::centroid(std::size_t t) const {
  const auto [a, b, c] = vertices(t);
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double Mesh::signed_area(std::size_t t) const {
  const auto [a, b, c] = vertices(t);
  return ifeig::signed_area(a, b, c);
}

void Mesh::update_h_max() {
  h_max = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto v = vertices(t);
    for (int e = 0; e < 3; ++e) h_max = std::max(h_max, distance(v[e], v[(e + 1) % 3]));
  }
}

bool same_content(const Mesh& a, const Mesh& b) {
  return a.nodes == b.nodes && a.triangles == b.triangles && a.region == b.region &&
         a.boundary == b.boundary;
}

double min_signed_area(const Mesh& mesh) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) m = std::min(m, mesh.signed_area(t));
  return m;
}

Mesh generate_structured_mesh(const Rect& domain, double h) {
  const double w = domain.width();
  const double ht = domain.height();
  if (!(w > 0.0) || !(ht > 0.0)) throw PreconditionError("generate_structured_mesh: degenerate domain");
  if (!(h > 0.0) || h > std::min(w, ht) * (1.0 + 1e-12))
    throw PreconditionError("generate_structured_mesh: need 0 < h <= min side length");

  // Tolerance keeps exact ratios like 2/(1/72) from rounding up a cell.
  auto cells = [h](double side) {
    const double r = side / h;
    return std::max(1, static_cast<int>(std::ceil(r - 1e-9 * r)));
  };
  const int nx = cells(w);
  const int ny = cells(ht);

  Mesh mesh;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? domain.y1 : domain.y0 + ht * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? domain.x1 : domain.x0 + w * i / nx;
      mesh.nodes.push_back({x, y});
      mesh.boundary.push_back(i == 0 || j == 0 || i == nx || j == ny ? 1 : 0);
    }
  }
  mesh.interface_circle.assign(mesh.nodes.size(), kNoInterface);

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j), n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      mesh.triangles.push_back({n00, n10, n11});
      mesh.triangles.push_back({n00, n11, n01});
    }
  }
  mesh.region.assign(mesh.triangles.size(), kBackgroundTag);
  mesh.update_h_max();
  return mesh;
}

namespace {

void check_circles(const Mesh& mesh, std::span<const Circle> circles) {
  if (mesh.nodes.empty()) throw PreconditionError("fit_interfaces: empty mesh");
  double xmin = mesh.nodes[0].x, xmax = xmin, ymin = mesh.nodes[0].y, ymax = ymin;
  for (const auto& p : mesh.nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  for (std::size_t i = 0; i < circles.size(); ++i) {
    const auto& c = circles[i];
    if (!(c.radius > 0.0)) throw PreconditionError("fit_interfaces: circle radius must be positive");
    if (c.center.x - c.radius <= xmin || c.center.x + c.radius >= xmax ||
        c.center.y - c.radius <= ymin || c.center.y + c.radius >= ymax)
      throw PreconditionError("fit_interfaces: circle " + std::to_string(i) +
                              " is not strictly inside the domain");
    if (!(mesh.h_max < c.radius))
      throw PreconditionError("fit_interfaces: h_max must be smaller than every radius");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& d = circles[j];
      const double gap = distance(c.center, d.center) - (c.radius + d.radius);
      if (gap < -1e-12 * (c.radius + d.radius))
        throw PreconditionError("fit_interfaces: circles " + std::to_string(j) + " and " +
                                std::to_string(i) + " overlap");
    }
  }
}

bool snapped_mesh_valid(const Mesh& original, const Mesh& snapped) {
  for (std::size_t t = 0; t < snapped.num_triangles(); ++t) {
    if (snapped.signed_area(t) <= kMinAreaRatio * original.signed_area(t)) return false;
  }
  return true;
}

// Flips every interior edge whose endpoints lie strictly on opposite sides of
// a circle while both opposite vertices sit on that circle, so the new edge
// follows the interface chord instead of crossing it.
void flip_crossing_edges(Mesh& mesh, std::span<const Circle> circles) {
  auto side = [&](int n, const Circle& c) { return distance(mesh.nodes[n], c.center) - c.radius; };
  std::map<std::pair<int, int>, std::pair<int, int>> edges;  // edge -> (triangle, local index)
  std::vector<std::array<int, 2>> shared;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int e = 0; e < 3; ++e) {
      int a = mesh.triangles[t][e], b = mesh.triangles[t][(e + 1) % 3];
      auto key = std::minmax(a, b);
      auto [it, inserted] = edges.emplace(key, std::pair{static_cast<int>(t), e});
      if (!inserted) shared.push_back({it->second.first * 3 + it->second.second, static_cast<int>(t) * 3 + e});
    }
  }
  std::vector<std::uint8_t> touched(mesh.num_triangles(), 0);
  for (const auto& [ea, eb] : shared) {
    const int t0 = ea / 3, e0 = ea % 3, t1 = eb / 3, e1 = eb % 3;
    if (touched[t0] || touched[t1]) continue;
    const int a = mesh.triangles[t0][e0], b = mesh.triangles[t0][(e0 + 1) % 3];
    const int c = mesh.triangles[t0][(e0 + 2) % 3], d = mesh.triangles[t1][(e1 + 2) % 3];
    if (mesh.interface_circle[a] != kNoInterface || mesh.interface_circle[b] != kNoInterface) continue;
    const int ci = mesh.interface_circle[c];
    if (ci == kNoInterface || mesh.interface_circle[d] != ci) continue;
    const Circle& circ = circles[ci];
    if (side(a, circ) * side(b, circ) >= 0.0) continue;
    // Triangle t0 is (a, b, c) and t1 is (b, a, d); the flip yields (c, a, d) and (d, b, c).
    const Triangle n0{c, a, d}, n1{d, b, c};
    const double quad = mesh.signed_area(t0) + mesh.signed_area(t1);
    const double s0 = signed_area(mesh.nodes[c], mesh.nodes[a], mesh.nodes[d]);
    const double s1 = signed_area(mesh.nodes[d], mesh.nodes[b], mesh.nodes[c]);
    if (s0 <= kMinAreaRatio * quad || s1 <= kMinAreaRatio * quad) continue;
    mesh.triangles[t0] = n0;
    mesh.triangles[t1] = n1;
    touched[t0] = touched[t1] = 1;
  }
}

}  // namespace

Mesh fit_interfaces(const Mesh& mesh, std::span<const Circle> circles, double snap_fraction) {
  check_circles(mesh, circles);
  if (!(snap_fraction > 0.0)) throw PreconditionError("fit_interfaces: snap_fraction must be positive");
  if (circles.empty()) return mesh;

  std::vector<std::vector<int>> incident(mesh.num_nodes());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles[t]) incident[v].push_back(static_cast<int>(t));

  double fraction = snap_fraction;
  for (int attempt = 0; attempt <= kMaxSnapRetries; ++attempt, fraction *= 0.5) {
    const double band = fraction * mesh.h_max;
    struct Candidate {
      double gap;
      int node;
      int circle;
    };
    std::vector<Candidate> candidates;
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
      if (mesh.boundary[n]) continue;
      const Point p = mesh.nodes[n];
      int best = kNoInterface;
      double best_gap = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < circles.size(); ++c) {
        const double gap = std::abs(distance(p, circles[c].center) - circles[c].radius);
        if (gap < best_gap) {
          best_gap = gap;
          best = static_cast<int>(c);
        }
      }
      if (best_gap <= band) candidates.push_back({best_gap, static_cast<int>(n), best});
    }
    // Closest nodes snap first; a node whose projection would collapse an
    // incident triangle stays put, since a closer neighbour already carries
    // the interface there.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.gap < b.gap; });
    Mesh out = mesh;
    for (const auto& cand : candidates) {
      const Circle& c = circles[cand.circle];
      const Point d = mesh.nodes[cand.node] - c.center;
      const double len = std::hypot(d.x, d.y);
      const Point old = out.nodes[cand.node];
      out.nodes[cand.node] = c.center + (c.radius / len) * d;
      bool ok = true;
      for (int t : incident[cand.node])
        if (out.signed_area(t) <= kMinAreaRatio * mesh.signed_area(t)) ok = false;
      if (ok)
        out.interface_circle[cand.node] = cand.circle;
      else
        out.nodes[cand.node] = old;
    }
    if (snapped_mesh_valid(mesh, out)) {
      flip_crossing_edges(out, circles);
      out.update_h_max();
      return out;
    }
  }
  throw GeometryError("fit_interfaces: snapping inverts triangles after " +
                      std::to_string(kMaxSnapRetries) + " retries");
}

Mesh classify_regions(const Mesh& mesh, std::span<const Circle> circles) {
  Mesh out = mesh;
  for (std::size_t t = 0; t < out.num_triangles(); ++t) {
    const Point g = out.centroid(t);
    out.region[t] = kBackgroundTag;
    for (std::size_t c = 0; c < circles.size(); ++c) {
      const double dx = g.x - circles[c].center.x;
      const double dy = g.y - circles[c].center.y;
      if (dx * dx + dy * dy <= circles[c].radius * circles[c].radius) {
        out.region[t] = static_cast<int>(c) + 1;
        break;
      }
    }
  }
  return out;
}

}  // namespace ifeig
