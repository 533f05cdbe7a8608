#include "ifeig/locate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ifeig/error.hpp"

namespace ifeig {

namespace {

constexpr double kInsideTol = 1e-12;

double min3(const std::array<double, 3>& b) { return std::min({b[0], b[1], b[2]}); }

std::array<double, 3> clamp_barycentric(std::array<double, 3> b) {
  double sum = 0.0;
  for (double& v : b) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double& v : b) v /= sum;
  return b;
}

}  // namespace

std::array<double, 3> barycentric(Point p, Point a, Point b, Point c) {
  const Point y = p - a;
  const Point q0 = b - a;
  const Point q1 = c - a;
  const double det = q0.x * q1.y - q0.y * q1.x;
  const double b1 = (y.x * q1.y - y.y * q1.x) / det;
  const double b2 = (q0.x * y.y - q0.y * y.x) / det;
  return {1.0 - b1 - b2, b1, b2};
}

PointLocator::PointLocator(const Mesh& mesh, bool force_brute_force) : mesh_(&mesh) {
  if (mesh.triangles.empty()) throw PreconditionError("PointLocator: empty mesh");
  if (force_brute_force || mesh.num_triangles() < kBruteForceLimit) return;

  double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
  double xmax = -xmin, ymax = -xmin;
  for (const auto& p : mesh.nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int side = std::max(1, static_cast<int>(std::sqrt(mesh.num_triangles() / 2.0)));
  nx_ = ny_ = side;
  x0_ = xmin;
  y0_ = ymin;
  dx_ = std::max(xmax - xmin, 1e-300) / nx_;
  dy_ = std::max(ymax - ymin, 1e-300) / ny_;

  // Bounding boxes are padded so that every triangle passing the inside
  // tolerance for p is registered in p's cell.
  struct Range {
    int i0, i1, j0, j1;
  };
  std::vector<Range> ranges(mesh.num_triangles());
  std::vector<std::size_t> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto v = mesh.vertices(t);
    double bx0 = std::min({v[0].x, v[1].x, v[2].x}), bx1 = std::max({v[0].x, v[1].x, v[2].x});
    double by0 = std::min({v[0].y, v[1].y, v[2].y}), by1 = std::max({v[0].y, v[1].y, v[2].y});
    const double pad = 1e-9 * std::max(bx1 - bx0, by1 - by0);
    auto ci = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - x0_) / dx_)), 0, nx_ - 1); };
    auto cj = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - y0_) / dy_)), 0, ny_ - 1); };
    ranges[t] = {ci(bx0 - pad), ci(bx1 + pad), cj(by0 - pad), cj(by1 + pad)};
    for (int j = ranges[t].j0; j <= ranges[t].j1; ++j)
      for (int i = ranges[t].i0; i <= ranges[t].i1; ++i) ++counts[static_cast<std::size_t>(j) * nx_ + i + 1];
  }
  for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += counts[k - 1];
  cell_start_ = counts;
  cells_.resize(counts.back());
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (int j = ranges[t].j0; j <= ranges[t].j1; ++j)
      for (int i = ranges[t].i0; i <= ranges[t].i1; ++i)
        cells_[fill[static_cast<std::size_t>(j) * nx_ + i]++] = static_cast<int>(t);
  }
}

std::size_t PointLocator::cell_of(Point p) const {
  const int i = std::clamp(static_cast<int>(std::floor((p.x - x0_) / dx_)), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((p.y - y0_) / dy_)), 0, ny_ - 1);
  return static_cast<std::size_t>(j) * nx_ + i;
}

LocateResult PointLocator::scan_all(Point p) const {
  int best = -1;
  double best_violation = std::numeric_limits<double>::infinity();
  std::array<double, 3> best_b{};
  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const auto v = mesh_->vertices(t);
    const auto b = barycentric(p, v[0], v[1], v[2]);
    const double m = min3(b);
    if (m >= -kInsideTol) return {static_cast<int>(t), b, LocateStatus::inside};
    if (-m < best_violation) {
      best_violation = -m;
      best = static_cast<int>(t);
      best_b = b;
    }
  }
  return {best, clamp_barycentric(best_b), LocateStatus::snapped_to_nearest};
}

LocateResult PointLocator::locate(Point p) const {
  if (cells_.empty()) return scan_all(p);
  const std::size_t c = cell_of(p);
  // Candidates are stored in increasing triangle order, so the first hit is
  // the lowest-index containing triangle.
  for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
    const int t = cells_[k];
    const auto v = mesh_->vertices(t);
    const auto b = barycentric(p, v[0], v[1], v[2]);
    if (min3(b) >= -kInsideTol) return {t, b, LocateStatus::inside};
  }
  return scan_all(p);
}

LocateResult locate_point(const Mesh& mesh, Point p) { return PointLocator(mesh).locate(p); }

}  // namespace ifeig
