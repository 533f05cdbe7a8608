#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ifeig/augsub.hpp"
#include "ifeig/eigen.hpp"
#include "ifeig/transfer.hpp"

namespace ifeig {

struct Geometry {
  Rect domain;
  std::vector<Circle> circles;
};

struct LevelPlan {
  double coarse_h = 0.0;
  double h1 = 0.0;
  double beta = 2.0;
  int n_levels = 1;
  int L = 2;
  double theta = 0.1;
  int nev = 1;
  AssemblyMode mode = AssemblyMode::galerkin;
  Preconditioner precond = Preconditioner::ssor;
  std::uint64_t seed = 1;  // start block of the level-1 direct solve

  // Throws PreconditionError naming the violated condition.
  void validate() const;
  // h_k = h1 / beta^(k-1), k = 1..n_levels
  double fine_h(int k) const;
};

/// Structured mesh of size h, snapped to the circles and region-tagged.
Mesh build_mesh(const Geometry& geometry, double h);

/// One fine level. `p` maps the fixed coarse space, `q` the previous fine
/// level (empty on level 1). `aug` is null on level 1.
struct LevelData {
  int index = 1;
  double h = 0.0;
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FeSpace> space;
  SparseMatrix a, b;
  TransferMatrix p, q;
  std::unique_ptr<AugContext> aug;
};

struct Hierarchy {
  std::shared_ptr<const Mesh> coarse_mesh;
  std::shared_ptr<const FeSpace> coarse;
  std::shared_ptr<const Coefficient> coeff;
  std::vector<std::unique_ptr<LevelData>> levels;

  const LevelData& level(int k) const { return *levels.at(static_cast<std::size_t>(k - 1)); }
  const LevelData& finest() const { return *levels.back(); }
};

/// Independently generated (hence nonnested) meshes for H and every h_k.
Hierarchy build_hierarchy(const LevelPlan& plan, const Geometry& geometry, const Coefficient& coeff);

/// Direct solve on level 1; the resulting state has iteration 0.
EigenState coarsest_solve(const LevelData& level1, int nev, double tol = ReferenceOptions{}.tol,
                          std::uint64_t seed = 1);

// Called after the coarsest solve and after every augmented step.
using LevelObserver = std::function<void(const LevelData& level, const EigenState& state)>;

/// Carries the state up by Q interpolation (lambda unchanged) and runs L
/// augmented steps per level. The returned history covers every level.
EigenState multilevel_solve(const Hierarchy& hierarchy, const LevelPlan& plan, const LevelObserver& observer = {});
EigenState multilevel_solve(const LevelPlan& plan, const Geometry& geometry, const Coefficient& coeff);

// Interpolated, a-normalized, sign-fixed state on the next level.
EigenState transfer_state(const EigenState& state, const LevelData& next);

struct LevelWork {
  int level = 0;
  std::size_t n_dof = 0;
  int steps = 0;
  int pcg_iterations = 0;
  std::size_t spmv = 0;
  std::size_t dense_dim = 0;
  double seconds = 0.0;
};

std::vector<LevelWork> work_accounting(const EigenState& state);

}  // namespace ifeig
