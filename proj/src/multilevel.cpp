#include "ifeig/multilevel.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "ifeig/error.hpp"

namespace ifeig {

void LevelPlan::validate() const {
  if (!(coarse_h > 0.0)) throw PreconditionError("coarse_h must be positive");
  if (!(h1 > 0.0)) throw PreconditionError("h1 must be positive");
  if (!(h1 < coarse_h)) throw PreconditionError("h1 must be smaller than coarse_h");
  if (!(beta > 1.0)) throw PreconditionError("beta must exceed 1");
  if (n_levels < 1) throw PreconditionError("n_levels must be at least 1");
  if (L < 1) throw PreconditionError("L must be at least 1");
  if (!(theta > 0.0 && theta < 1.0)) throw PreconditionError("theta must lie in (0, 1)");
  if (nev < 1) throw PreconditionError("nev must be at least 1");
}

double LevelPlan::fine_h(int k) const { return h1 / std::pow(beta, k - 1); }

Mesh build_mesh(const Geometry& geometry, double h) {
  Mesh mesh = generate_structured_mesh(geometry.domain, h);
  if (geometry.circles.empty()) return mesh;
  return classify_regions(fit_interfaces(mesh, geometry.circles), geometry.circles);
}

Hierarchy build_hierarchy(const LevelPlan& plan, const Geometry& geometry, const Coefficient& coeff) {
  plan.validate();
  if (coeff.size() < geometry.circles.size() + 1)
    throw PreconditionError("coefficient needs one value per circle plus background");
  Hierarchy h;
  h.coeff = std::make_shared<const Coefficient>(coeff);
  h.coarse_mesh = std::make_shared<const Mesh>(build_mesh(geometry, plan.coarse_h));
  h.coarse = std::make_shared<const FeSpace>(h.coarse_mesh);
  const PointLocator coarse_locator(*h.coarse_mesh);

  std::unique_ptr<PointLocator> prev_locator;
  for (int k = 1; k <= plan.n_levels; ++k) {
    auto level = std::make_unique<LevelData>();
    level->index = k;
    level->h = plan.fine_h(k);
    level->mesh = std::make_shared<const Mesh>(build_mesh(geometry, level->h));
    level->space = std::make_shared<const FeSpace>(level->mesh);
    level->a = assemble_stiffness(*level->space, *h.coeff);
    level->b = assemble_mass(*level->space);
    if (k > 1) {
      const LevelData& prev = *h.levels.back();
      level->q = build_transfer(*prev.space, *prev_locator, *level->space);
      level->p = build_transfer(*h.coarse, coarse_locator, *level->space);
      level->aug = std::make_unique<AugContext>(*h.coarse, *level->space, *h.coeff, level->a, level->b,
                                                level->p.p, plan.mode, plan.precond);
    }
    prev_locator = std::make_unique<PointLocator>(*level->mesh);
    h.levels.push_back(std::move(level));
  }
  return h;
}

EigenState coarsest_solve(const LevelData& level1, int nev, double tol, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  ReferenceOptions opts;
  opts.tol = tol;
  opts.seed = seed;
  const EigenPairs ref = reference_eigensolve(level1.a, level1.b, nev, opts);
  EigenState state;
  state.lambdas = ref.values;
  state.vectors = ref.vectors;
  IterationRecord rec;
  rec.level = level1.index;
  rec.iteration = 0;
  rec.lambdas = ref.values;
  rec.contraction.assign(ref.values.size(), 0.0);
  rec.n_dof = level1.space->n_dof();
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  state.history.push_back(std::move(rec));
  return state;
}

EigenState transfer_state(const EigenState& state, const LevelData& next) {
  EigenState out;
  out.lambdas = state.lambdas;
  out.iteration = 0;
  out.history = state.history;
  for (const auto& v : state.vectors) {
    Vector u = spmv(next.q.p, v);
    const double norm = energy_norm(next.a, u);
    if (!(norm > 0.0)) throw NumericalError("transfer_state: interpolated vector vanished");
    scale(u, 1.0 / norm);
    fix_sign(u);
    out.vectors.push_back(std::move(u));
  }
  return out;
}

EigenState multilevel_solve(const Hierarchy& hierarchy, const LevelPlan& plan, const LevelObserver& observer) {
  plan.validate();
  EigenState state = coarsest_solve(hierarchy.level(1), plan.nev, ReferenceOptions{}.tol, plan.seed);
  if (observer) observer(hierarchy.level(1), state);
  for (int k = 2; k <= static_cast<int>(hierarchy.levels.size()); ++k) {
    const LevelData& level = hierarchy.level(k);
    state = transfer_state(state, level);
    for (int l = 0; l < plan.L; ++l) {
      state = aug_subspace_step(*level.aug, state, plan.theta, k);
      if (observer) observer(level, state);
    }
  }
  return state;
}

EigenState multilevel_solve(const LevelPlan& plan, const Geometry& geometry, const Coefficient& coeff) {
  const Hierarchy h = build_hierarchy(plan, geometry, coeff);
  return multilevel_solve(h, plan);
}

std::vector<LevelWork> work_accounting(const EigenState& state) {
  std::map<int, LevelWork> by_level;
  for (const auto& rec : state.history) {
    LevelWork& w = by_level[rec.level];
    w.level = rec.level;
    w.n_dof = rec.n_dof;
    if (rec.iteration > 0) ++w.steps;
    w.pcg_iterations += rec.pcg_iterations;
    w.spmv += rec.spmv;
    w.dense_dim = std::max(w.dense_dim, rec.dense_dim);
    w.seconds += rec.seconds;
  }
  std::vector<LevelWork> out;
  for (auto& [k, w] : by_level) out.push_back(w);
  return out;
}

}  // namespace ifeig
