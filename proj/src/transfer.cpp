#include "ifeig/transfer.hpp"

namespace ifeig {

TransferMatrix build_transfer(const FeSpace& coarse, const FeSpace& fine) {
  const PointLocator locator(coarse.mesh());
  return build_transfer(coarse, locator, fine);
}

TransferMatrix build_transfer(const FeSpace& coarse, const PointLocator& coarse_locator, const FeSpace& fine) {
  const Mesh& cm = coarse.mesh();
  const Mesh& fm = fine.mesh();
  TransferMatrix out;
  SparseBuilder builder(fine.n_dof(), coarse.n_dof());
  builder.reserve(3 * fine.n_dof());
  for (std::size_t f = 0; f < fine.n_dof(); ++f) {
    const Point x = fm.nodes[static_cast<std::size_t>(fine.free_nodes()[f])];
    const LocateResult loc = coarse_locator.locate(x);
    if (loc.status == LocateStatus::snapped_to_nearest) ++out.snapped_rows;
    const auto& tri = cm.triangles[static_cast<std::size_t>(loc.triangle)];
    for (int v = 0; v < 3; ++v) {
      const int c = coarse.dof(static_cast<std::size_t>(tri[v]));
      if (c >= 0 && loc.barycentric[v] != 0.0) builder.add(static_cast<int>(f), c, loc.barycentric[v]);
    }
  }
  out.p = builder.finalize();
  return out;
}

}  // namespace ifeig
