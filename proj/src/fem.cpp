#include "ifeig/fem.hpp"

#include <cmath>
#include <string>

#include "ifeig/error.hpp"

namespace ifeig {

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw PreconditionError("FeSpace: null mesh");
  node_to_dof_.assign(mesh_->num_nodes(), -1);
  for (std::size_t n = 0; n < mesh_->num_nodes(); ++n) {
    if (mesh_->boundary[n]) continue;
    node_to_dof_[n] = static_cast<int>(free_nodes_.size());
    free_nodes_.push_back(static_cast<int>(n));
  }
  if (free_nodes_.empty()) throw PreconditionError("FeSpace: mesh has no interior nodes");
}

FeSpace build_space(std::shared_ptr<const Mesh> mesh) { return FeSpace(std::move(mesh)); }

Coefficient::Coefficient(std::vector<double> per_region) : values_(std::move(per_region)) {
  if (values_.empty()) throw PreconditionError("Coefficient: no region values");
  for (double v : values_)
    if (!(v > 0.0)) throw PreconditionError("Coefficient: values must be positive");
}

double Coefficient::operator()(int region) const {
  if (region < 0 || static_cast<std::size_t>(region) >= values_.size())
    throw PreconditionError("Coefficient: no value for region tag " + std::to_string(region));
  return values_[static_cast<std::size_t>(region)];
}

std::array<Point, 3> basis_gradients(Point a, Point b, Point c) {
  const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  // grad phi_i = rot90(opposite edge) / (2 area)
  return {Point{(b.y - c.y) / det, (c.x - b.x) / det}, Point{(c.y - a.y) / det, (a.x - c.x) / det},
          Point{(a.y - b.y) / det, (b.x - a.x) / det}};
}

LocalMatrix local_stiffness(Point a, Point b, Point c, double k) {
  const double area = signed_area(a, b, c);
  const auto g = basis_gradients(a, b, c);
  LocalMatrix m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      m[i][j] = k * area * (g[i].x * g[j].x + g[i].y * g[j].y);
      m[j][i] = m[i][j];
    }
  }
  return m;
}

LocalMatrix local_mass(Point a, Point b, Point c) {
  const double s = signed_area(a, b, c) / 12.0;
  LocalMatrix m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = (i == j ? 2.0 : 1.0) * s;
  return m;
}

namespace {

template <class LocalFn>
SparseMatrix assemble(const Mesh& mesh, const std::vector<int>* node_to_dof, std::size_t n, LocalFn local) {
  SparseBuilder builder(n, n);
  builder.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const LocalMatrix m = local(t);
    for (int i = 0; i < 3; ++i) {
      const int di = node_to_dof ? (*node_to_dof)[static_cast<std::size_t>(tri[i])] : tri[i];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = node_to_dof ? (*node_to_dof)[static_cast<std::size_t>(tri[j])] : tri[j];
        if (dj < 0) continue;
        builder.add(di, dj, m[i][j]);
      }
    }
  }
  return builder.finalize();
}

}  // namespace

SparseMatrix assemble_stiffness(const FeSpace& space, const Coefficient& coeff) {
  const Mesh& mesh = space.mesh();
  return assemble(mesh, &space.node_to_dof(), space.n_dof(), [&](std::size_t t) {
    const auto v = mesh.vertices(t);
    return local_stiffness(v[0], v[1], v[2], coeff(mesh.region[t]));
  });
}

SparseMatrix assemble_mass(const FeSpace& space) {
  const Mesh& mesh = space.mesh();
  return assemble(mesh, &space.node_to_dof(), space.n_dof(), [&](std::size_t t) {
    const auto v = mesh.vertices(t);
    return local_mass(v[0], v[1], v[2]);
  });
}

SparseMatrix assemble_mass_full(const Mesh& mesh) {
  return assemble(mesh, nullptr, mesh.num_nodes(), [&](std::size_t t) {
    const auto v = mesh.vertices(t);
    return local_mass(v[0], v[1], v[2]);
  });
}

SparseMatrix assemble_stiffness_full(const Mesh& mesh, const Coefficient& coeff) {
  return assemble(mesh, nullptr, mesh.num_nodes(), [&](std::size_t t) {
    const auto v = mesh.vertices(t);
    return local_stiffness(v[0], v[1], v[2], coeff(mesh.region[t]));
  });
}

double energy_norm(const SparseMatrix& m, std::span<const double> v) {
  const double q = bilinear(m, v, v);
  if (q < -1e-14) throw NumericalError("energy_norm: negative radicand (matrix not SPD)");
  return std::sqrt(std::max(q, 0.0));
}

Vector to_nodal(const FeSpace& space, std::span<const double> dofs) {
  if (dofs.size() != space.n_dof()) throw std::invalid_argument("to_nodal: dimension mismatch");
  Vector out(space.mesh().num_nodes(), 0.0);
  for (std::size_t d = 0; d < dofs.size(); ++d) out[static_cast<std::size_t>(space.free_nodes()[d])] = dofs[d];
  return out;
}

}  // namespace ifeig
