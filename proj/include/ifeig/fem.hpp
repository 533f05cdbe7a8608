#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "ifeig/mesh.hpp"
#include "ifeig/sparse.hpp"

namespace ifeig {

/// P1 space with homogeneous Dirichlet conditions eliminated: only
/// non-boundary nodes carry degrees of freedom.
class FeSpace {
 public:
  explicit FeSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  std::size_t n_dof() const { return free_nodes_.size(); }
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  // -1 for Dirichlet (boundary) nodes.
  int dof(std::size_t node) const { return node_to_dof_[node]; }
  const std::vector<int>& node_to_dof() const { return node_to_dof_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<int> free_nodes_;
  std::vector<int> node_to_dof_;
};

FeSpace build_space(std::shared_ptr<const Mesh> mesh);

/// Piecewise-constant scalar diffusion coefficient indexed by region tag.
class Coefficient {
 public:
  explicit Coefficient(std::vector<double> per_region);

  double operator()(int region) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

using LocalMatrix = std::array<std::array<double, 3>, 3>;

// Gradients of the three barycentric basis functions (constant on the triangle).
std::array<Point, 3> basis_gradients(Point a, Point b, Point c);
LocalMatrix local_stiffness(Point a, Point b, Point c, double k);
LocalMatrix local_mass(Point a, Point b, Point c);

SparseMatrix assemble_stiffness(const FeSpace& space, const Coefficient& coeff);
SparseMatrix assemble_mass(const FeSpace& space);
// Mass matrix over all nodes, before Dirichlet elimination.
SparseMatrix assemble_mass_full(const Mesh& mesh);
SparseMatrix assemble_stiffness_full(const Mesh& mesh, const Coefficient& coeff);

// sqrt(v^T M v); throws NumericalError when the radicand is below -1e-14.
double energy_norm(const SparseMatrix& m, std::span<const double> v);
inline double a_norm(const SparseMatrix& a, std::span<const double> v) { return energy_norm(a, v); }
inline double b_norm(const SparseMatrix& b, std::span<const double> v) { return energy_norm(b, v); }

// Scatters dof values to all nodes (zeros on the boundary).
Vector to_nodal(const FeSpace& space, std::span<const double> dofs);

}  // namespace ifeig
