#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ifeig/error.hpp"
#include "ifeig/examples.hpp"
#include "ifeig/measure.hpp"
#include "ifeig/multilevel.hpp"

using namespace ifeig;

namespace {

// Example 1 desk plan solved once and shared by several tests.
struct DeskRun {
  ExampleSpec spec = example1();
  Hierarchy hierarchy;
  std::vector<EigenState> per_level;  // state at the end of each level
  EigenState final_state;
};

const DeskRun& desk_run() {
  static const std::unique_ptr<DeskRun> run = [] {
    auto r = std::make_unique<DeskRun>();
    r->hierarchy = build_hierarchy(r->spec.plan, r->spec.geometry, r->spec.coefficient());
    r->final_state = multilevel_solve(r->hierarchy, r->spec.plan,
                                      [&](const LevelData& lv, const EigenState& st) {
                                        r->per_level.resize(static_cast<std::size_t>(lv.index));
                                        r->per_level.back() = st;
                                      });
    return r;
  }();
  return *run;
}

LevelPlan small_plan() {
  LevelPlan p = example1().plan;
  p.coarse_h = 2.0 / 9.0;
  p.h1 = 1.0 / 9.0;
  p.n_levels = 2;
  p.nev = 2;
  return p;
}

}  // namespace

TEST(LevelPlan, ValidatesFields) {
  LevelPlan p = small_plan();
  EXPECT_NO_THROW(p.validate());
  auto broken = [&](auto mutate) {
    LevelPlan q = p;
    mutate(q);
    return q;
  };
  EXPECT_THROW(broken([](LevelPlan& q) { q.coarse_h = 0.0; }).validate(), PreconditionError);
  EXPECT_THROW(broken([](LevelPlan& q) { q.h1 = q.coarse_h; }).validate(), PreconditionError);
  EXPECT_THROW(broken([](LevelPlan& q) { q.beta = 1.0; }).validate(), PreconditionError);
  EXPECT_THROW(broken([](LevelPlan& q) { q.n_levels = 0; }).validate(), PreconditionError);
  EXPECT_THROW(broken([](LevelPlan& q) { q.L = 0; }).validate(), PreconditionError);
  EXPECT_THROW(broken([](LevelPlan& q) { q.theta = 1.0; }).validate(), PreconditionError);
  EXPECT_THROW(broken([](LevelPlan& q) { q.nev = 0; }).validate(), PreconditionError);
}

TEST(LevelPlan, FineSizesFollowGeometricSequence) {
  LevelPlan p;
  p.coarse_h = 0.25;
  p.h1 = 1.0 / 8.0;
  p.beta = 2.0;
  p.n_levels = 3;
  EXPECT_DOUBLE_EQ(p.fine_h(1), 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(p.fine_h(2), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(p.fine_h(3), 1.0 / 32.0);
}

TEST(BuildHierarchy, SingleLevelHasCoarseAndOneFineSpace) {
  LevelPlan p = small_plan();
  p.n_levels = 1;
  const ExampleSpec ex = example1();
  const Hierarchy h = build_hierarchy(p, ex.geometry, ex.coefficient());
  EXPECT_EQ(h.levels.size(), 1u);
  EXPECT_NE(h.coarse, nullptr);
  EXPECT_EQ(h.level(1).aug, nullptr);
}

TEST(BuildHierarchy, DofsGrowFourfoldAndMeshesAreNonnested) {
  const Hierarchy& h = desk_run().hierarchy;
  ASSERT_EQ(h.levels.size(), 3u);
  for (int k = 2; k <= 3; ++k) {
    const double ratio = static_cast<double>(h.level(k).space->n_dof()) / h.level(k - 1).space->n_dof();
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
  }
  // Some interface node of level 1 is absent from level 2.
  const Mesh& m1 = *h.level(1).mesh;
  const Mesh& m2 = *h.level(2).mesh;
  std::set<std::pair<double, double>> fine_nodes;
  for (const Point& p : m2.nodes) fine_nodes.insert({p.x, p.y});
  bool missing = false;
  for (std::size_t n = 0; n < m1.num_nodes(); ++n)
    if (m1.interface_circle[n] != kNoInterface && !fine_nodes.count({m1.nodes[n].x, m1.nodes[n].y})) missing = true;
  EXPECT_TRUE(missing);
}

TEST(CoarsestSolve, UnitSquareWithinThreePercent) {
  ExampleSpec ex = unit_square();
  LevelPlan p = ex.plan;
  p.h1 = 1.0 / 8.0;
  p.n_levels = 1;
  const Hierarchy h = build_hierarchy(p, ex.geometry, ex.coefficient());
  const EigenState st = coarsest_solve(h.level(1), 1);
  const double exact = std::numbers::pi * std::numbers::pi / 2.0;
  EXPECT_LT(std::abs(st.lambdas[0] - exact) / exact, 0.03);
  EXPECT_NEAR(energy_norm(h.level(1).a, st.vectors[0]), 1.0, 1e-12);
  EXPECT_EQ(st.iteration, 0);
  EXPECT_THROW(coarsest_solve(h.level(1), static_cast<int>(h.level(1).space->n_dof())), PreconditionError);
}

TEST(MultilevelSolve, SingleLevelEqualsCoarsestSolve) {
  LevelPlan p = small_plan();
  p.n_levels = 1;
  const ExampleSpec ex = example1();
  const Hierarchy h = build_hierarchy(p, ex.geometry, ex.coefficient());
  const EigenState a = multilevel_solve(h, p);
  const EigenState b = coarsest_solve(h.level(1), p.nev, ReferenceOptions{}.tol, p.seed);
  EXPECT_EQ(a.lambdas, b.lambdas);
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(MultilevelSolve, DeskPlanReachesFinestReference) {
  const DeskRun& run = desk_run();
  const LevelData& fine = run.hierarchy.finest();
  const EigenPairs ref = reference_eigensolve(fine.a, fine.b, 1);
  EXPECT_LT(std::abs(run.final_state.lambdas[0] - ref.values[0]), 1e-6 * ref.values[0]);
  for (std::size_t i = 0; i < run.final_state.slots(); ++i) {
    EXPECT_NEAR(energy_norm(fine.a, run.final_state.vectors[i]), 1.0, 1e-10);
    if (i > 0) EXPECT_LE(run.final_state.lambdas[i - 1], run.final_state.lambdas[i]);
  }
}

TEST(MultilevelSolve, FirstStepPerLevelSelectsLowestPairs) {
  const DeskRun& run = desk_run();
  for (const IterationRecord& rec : run.final_state.history) {
    if (rec.iteration != 1) continue;
    for (std::size_t j = 0; j < rec.selected.size(); ++j) EXPECT_EQ(rec.selected[j], static_cast<int>(j));
  }
}

TEST(MultilevelSolve, MoreCorrectionStepsNeverHurt) {
  const ExampleSpec ex = example1();
  LevelPlan p = small_plan();
  const Hierarchy h = build_hierarchy(p, ex.geometry, ex.coefficient());
  const EigenPairs ref = reference_eigensolve(h.finest().a, h.finest().b, p.nev);
  const Clusters clusters = resolve_clusters(ref.values, ex.clusters, static_cast<std::size_t>(p.nev));
  auto total_error = [&](int l) {
    LevelPlan q = p;
    q.L = l;
    const ErrorReport e = measure_errors(multilevel_solve(h, q), ref, clusters, h.finest().a);
    double s = 0.0;
    for (double v : e.anorm) s += v;
    return s;
  };
  const double e2 = total_error(2), e3 = total_error(3);
  EXPECT_LE(e3, e2 + 1e-12);
}

TEST(TransferState, InterpolationIsABoundedPerturbation) {
  const DeskRun& run = desk_run();
  ASSERT_EQ(run.per_level.size(), 3u);
  for (int k = 2; k <= 3; ++k) {
    const LevelData& next = run.hierarchy.level(k);
    const EigenState& prev = run.per_level[static_cast<std::size_t>(k - 2)];
    for (const Vector& u : prev.vectors) {
      const double n = energy_norm(next.a, spmv(next.q.p, u));
      EXPECT_LT(std::abs(n - 1.0), 0.1);
    }
    const EigenState carried = transfer_state(prev, next);
    EXPECT_EQ(carried.lambdas, prev.lambdas);
    for (const Vector& u : carried.vectors) EXPECT_NEAR(energy_norm(next.a, u), 1.0, 1e-12);
  }
}

TEST(WorkAccounting, DenseSizeConstantAndWorkGrowsWithLevel) {
  const DeskRun& run = desk_run();
  const std::vector<LevelWork> work = work_accounting(run.final_state);
  ASSERT_EQ(work.size(), 3u);
  const std::size_t dense = run.hierarchy.coarse->n_dof() + static_cast<std::size_t>(run.spec.plan.nev);
  for (std::size_t k = 1; k < work.size(); ++k) {
    EXPECT_EQ(work[k].dense_dim, dense);
    EXPECT_EQ(work[k].steps, run.spec.plan.L);
    EXPECT_GT(work[k].seconds, 0.0);
  }
  const double growth = static_cast<double>(work[2].spmv) / static_cast<double>(work[1].spmv);
  EXPECT_GE(growth, 1.0);
  EXPECT_LE(growth, 8.0);
  EXPECT_GT(work[2].seconds, work[1].seconds);
  EXPECT_GT(work[2].n_dof, work[1].n_dof);
}

TEST(MultilevelSolve, IsDeterministic) {
  const ExampleSpec ex = example1();
  const LevelPlan p = small_plan();
  const EigenState a = multilevel_solve(p, ex.geometry, ex.coefficient());
  const EigenState b = multilevel_solve(p, ex.geometry, ex.coefficient());
  EXPECT_EQ(a.lambdas, b.lambdas);
  EXPECT_EQ(a.vectors, b.vectors);
}
