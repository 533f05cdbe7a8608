#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ifeig/augsub.hpp"
#include "ifeig/eigen.hpp"
#include "ifeig/error.hpp"
#include "ifeig/examples.hpp"
#include "ifeig/measure.hpp"
#include "ifeig/multilevel.hpp"

using namespace ifeig;

namespace {

struct Level {
  std::shared_ptr<const FeSpace> coarse, fine;
  Coefficient coeff;
  SparseMatrix a, b;
  TransferMatrix p;
  std::unique_ptr<AugContext> ctx;
};

std::unique_ptr<Level> make_level(const ExampleSpec& ex, double coarse_h, double fine_h) {
  auto lv = std::make_unique<Level>(Level{nullptr, nullptr, ex.coefficient(), {}, {}, {}, nullptr});
  lv->coarse = std::make_shared<const FeSpace>(std::make_shared<const Mesh>(build_mesh(ex.geometry, coarse_h)));
  lv->fine = std::make_shared<const FeSpace>(std::make_shared<const Mesh>(build_mesh(ex.geometry, fine_h)));
  lv->a = assemble_stiffness(*lv->fine, lv->coeff);
  lv->b = assemble_mass(*lv->fine);
  lv->p = build_transfer(*lv->coarse, *lv->fine);
  lv->ctx = std::make_unique<AugContext>(*lv->coarse, *lv->fine, lv->coeff, lv->a, lv->b, lv->p.p,
                                         AssemblyMode::galerkin);
  return lv;
}

const Level& unit_square_level() {
  static const std::unique_ptr<Level> lv = make_level(unit_square(), 0.25, 1.0 / 32.0);
  return *lv;
}

const EigenPairs& unit_square_reference() {
  static const EigenPairs ref = [] {
    ReferenceOptions opts;
    opts.tol = 1e-13;
    opts.residual_tol = 1e-11;
    return reference_eigensolve(unit_square_level().a, unit_square_level().b, 3, opts);
  }();
  return ref;
}

// Interpolated coarse eigenvectors as a starting state.
EigenState coarse_start(const Level& lv, int m) {
  EigenState st;
  const CoarseBasis& basis = lv.ctx->coarse_basis();
  for (int j = 0; j < m; ++j) {
    Vector u = spmv(lv.p.p, basis.z.column(static_cast<std::size_t>(j)));
    scale(u, 1.0 / energy_norm(lv.a, u));
    fix_sign(u);
    st.lambdas.push_back(basis.values[static_cast<std::size_t>(j)]);
    st.vectors.push_back(std::move(u));
  }
  return st;
}

EigenState reference_state(const EigenPairs& ref, int m) {
  EigenState st;
  for (int j = 0; j < m; ++j) {
    st.lambdas.push_back(ref.values[static_cast<std::size_t>(j)]);
    st.vectors.push_back(ref.vectors[static_cast<std::size_t>(j)]);
  }
  return st;
}

double sign_free_distance(const SparseMatrix& a, const Vector& u, const Vector& v) {
  Vector d = u, s = u;
  axpy(-1.0, v, d);
  axpy(1.0, v, s);
  return std::min(energy_norm(a, d), energy_norm(a, s));
}

DenseMatrix random_spd(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = g(rng);
  DenseMatrix m = r * r.transpose();
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 1.0;
  return m;
}

BorderedSystem decoupled_system(std::size_t n, double alpha, double beta, std::mt19937_64& rng) {
  BorderedSystem sys;
  sys.a_coarse = std::make_shared<const DenseMatrix>(random_spd(n, rng));
  sys.b_coarse = std::make_shared<const DenseMatrix>(random_spd(n, rng));
  sys.a_border = DenseMatrix(n, 1);
  sys.b_border = DenseMatrix(n, 1);
  sys.alpha = DenseMatrix(1, 1, alpha);
  sys.beta = DenseMatrix(1, 1, beta);
  return sys;
}

}  // namespace

TEST(CorrectionSolve, ExactEigenpairIsAFixedPoint) {
  const Level& lv = unit_square_level();
  const EigenState st = reference_state(unit_square_reference(), 1);
  const Correction c = correction_solve(lv.a, lv.b, lv.ctx->solver(), st, 1e-12);
  EXPECT_LT(sign_free_distance(lv.a, c.u_tilde[0], st.vectors[0]), 1e-9);
}

TEST(CorrectionSolve, ZeroEigenvalueIsDegenerate) {
  const Level& lv = unit_square_level();
  EigenState st = coarse_start(lv, 1);
  st.lambdas[0] = 0.0;
  EXPECT_THROW(correction_solve(lv.a, lv.b, lv.ctx->solver(), st, 0.1), NumericalError);
}

TEST(CorrectionSolve, ReportsContractionWithinTarget) {
  const ExampleSpec ex = example1();
  const auto lv = make_level(ex, ex.plan.coarse_h, ex.plan.h1);
  const EigenState st = coarse_start(*lv, 4);
  const Correction c = correction_solve(lv->a, lv->b, lv->ctx->solver(), st, 0.1);
  ASSERT_EQ(c.reports.size(), 4u);
  for (const SolveReport& r : c.reports) {
    EXPECT_FALSE(r.breakdown);
    EXPECT_LE(r.achieved_contraction, 0.1);
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_NEAR(bilinear(lv->a, c.u_tilde[i], c.u_tilde[j]), i == j ? 1.0 : 0.0, 1e-10);
}

TEST(SolveBordered, DecoupledBorderAddsAlphaOverBeta) {
  std::mt19937_64 rng(1);
  const BorderedSystem sys = decoupled_system(6, 3.0, 2.0, rng);
  const DenseEigen coarse = dense_sym_gen_eig(*sys.a_coarse, *sys.b_coarse);
  std::vector<double> expect = coarse.values;
  expect.push_back(1.5);
  std::sort(expect.begin(), expect.end());
  const CoarseBasis basis = make_coarse_basis(*sys.a_coarse, *sys.b_coarse);
  for (const BorderedEigen& e : {solve_bordered(sys), solve_bordered(sys, basis)}) {
    ASSERT_EQ(e.values.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(e.values[i], expect[i], 1e-10 * expect[i]);
  }
}

TEST(SolveBordered, FastPathMatchesGeneralPath) {
  const Level& lv = unit_square_level();
  const EigenState st = coarse_start(lv, 3);
  const Correction c = correction_solve(lv.a, lv.b, lv.ctx->solver(), st, 0.1);
  const BorderedSystem sys = lv.ctx->cross().assemble(c.u_tilde);
  const BorderedEigen fast = solve_bordered(sys, lv.ctx->coarse_basis());
  const BorderedEigen gen = solve_bordered(sys);
  ASSERT_EQ(fast.values.size(), gen.values.size());
  for (std::size_t i = 0; i < fast.values.size(); ++i)
    EXPECT_NEAR(fast.values[i], gen.values[i], 1e-9 * gen.values[i]);
  // Eigenvectors of the simple lowest eigenvalue agree up to sign.
  const DenseMatrix bm = sys.mass();
  Vector vf(bm.rows()), vg(bm.rows());
  for (std::size_t i = 0; i < sys.coarse_dim(); ++i) {
    vf[i] = fast.coarse(i, 0);
    vg[i] = gen.coarse(i, 0);
  }
  for (std::size_t j = 0; j < sys.border_dim(); ++j) {
    vf[sys.coarse_dim() + j] = fast.xi(j, 0);
    vg[sys.coarse_dim() + j] = gen.xi(j, 0);
  }
  EXPECT_NEAR(std::abs(dot(vf, bm * std::span<const double>(vg))), 1.0, 1e-8);
}

TEST(SolveBordered, StiffnessScalingScalesSpectrum) {
  const Level& lv = unit_square_level();
  const Correction c = correction_solve(lv.a, lv.b, lv.ctx->solver(), coarse_start(lv, 2), 0.1);
  BorderedSystem sys = lv.ctx->cross().assemble(c.u_tilde);
  const BorderedEigen base = solve_bordered(sys);
  DenseMatrix ac = *sys.a_coarse;
  for (DenseMatrix* m : {&ac, &sys.a_border, &sys.alpha})
    for (std::size_t i = 0; i < m->rows(); ++i)
      for (std::size_t j = 0; j < m->cols(); ++j) (*m)(i, j) *= 4.0;
  sys.a_coarse = std::make_shared<const DenseMatrix>(ac);
  const BorderedEigen scaled = solve_bordered(sys);
  for (std::size_t i = 0; i < base.values.size(); ++i)
    EXPECT_NEAR(scaled.values[i], 4.0 * base.values[i], 1e-9 * scaled.values[i]);
}

TEST(SolveBordered, GalerkinSandwichWithExactEigenvector) {
  const Level& lv = unit_square_level();
  const EigenPairs& ref = unit_square_reference();
  const std::vector<Vector> u{ref.vectors[0]};
  const BorderedSystem sys = lv.ctx->cross().assemble(u);
  const double low = solve_bordered(sys, lv.ctx->coarse_basis()).values[0];
  EXPECT_LE(low, ref.values[0] + 1e-10);
  EXPECT_GE(low, ref.values[0] - 1e-10);
}

TEST(SelectEigenpairs, DecoupledBorderPicksBorderPair) {
  std::mt19937_64 rng(2);
  const BorderedSystem sys = decoupled_system(5, 40.0, 1.0, rng);
  const BorderedEigen e = solve_bordered(sys);
  const Selection s = select_eigenpairs(e, sys, 1);
  const int i = s.index[0];
  EXPECT_NEAR(e.values[static_cast<std::size_t>(i)], 40.0, 1e-9);
  EXPECT_NEAR(s.score[0], 1.0, 1e-12);
}

TEST(SelectEigenpairs, ExactEigenvectorSelectsLowestRitzPair) {
  const Level& lv = unit_square_level();
  const std::vector<Vector> u{unit_square_reference().vectors[0]};
  const BorderedSystem sys = lv.ctx->cross().assemble(u);
  const BorderedEigen e = solve_bordered(sys, lv.ctx->coarse_basis());
  const Selection s = select_eigenpairs(e, sys, 1);
  EXPECT_EQ(s.index[0], 0);
  EXPECT_NEAR(s.score[0], 1.0, 1e-8);
}

TEST(SelectEigenpairs, OrthogonalCandidatesAreLost) {
  std::mt19937_64 rng(3);
  const BorderedSystem sys = decoupled_system(4, 2.0, 1.0, rng);
  BorderedEigen e = solve_bordered(sys);
  // Drop the border pair so no candidate touches the border direction.
  std::size_t border = 0;
  for (std::size_t i = 0; i < e.values.size(); ++i)
    if (std::abs(e.xi(0, i)) > 0.5) border = i;
  BorderedEigen coarse_only;
  coarse_only.coarse = DenseMatrix(4, 4);
  coarse_only.xi = DenseMatrix(1, 4);
  for (std::size_t i = 0, k = 0; i < e.values.size(); ++i) {
    if (i == border) continue;
    coarse_only.values.push_back(e.values[i]);
    for (std::size_t r = 0; r < 4; ++r) coarse_only.coarse(r, k) = e.coarse(r, i);
    ++k;
  }
  EXPECT_THROW(select_eigenpairs(coarse_only, sys, 1), NumericalError);
}

TEST(ReassembleFine, Examples) {
  const Level& lv = unit_square_level();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Vector ut(lv.fine->n_dof());
  for (auto& x : ut) x = g(rng);
  const std::vector<Vector> u{ut};
  const Vector zero_coarse(lv.coarse->n_dof(), 0.0);

  Vector expect = ut;
  scale(expect, 1.0 / energy_norm(lv.a, expect));
  fix_sign(expect);
  const Vector r1 = reassemble_fine(zero_coarse, Vector{1.0}, lv.p.p, u, lv.a);
  for (std::size_t i = 0; i < r1.size(); ++i) EXPECT_NEAR(r1[i], expect[i], 1e-12);

  Vector uc(lv.coarse->n_dof());
  for (auto& x : uc) x = g(rng);
  Vector interp = spmv(lv.p.p, uc);
  scale(interp, 1.0 / energy_norm(lv.a, interp));
  fix_sign(interp);
  const Vector r2 = reassemble_fine(uc, Vector{0.0}, lv.p.p, u, lv.a);
  for (std::size_t i = 0; i < r2.size(); ++i) EXPECT_NEAR(r2[i], interp[i], 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    for (auto& x : uc) x = g(rng);
    const Vector r = reassemble_fine(uc, Vector{g(rng)}, lv.p.p, u, lv.a);
    EXPECT_NEAR(bilinear(lv.a, r, r), 1.0, 1e-10);
  }
  EXPECT_THROW(reassemble_fine(zero_coarse, Vector{0.0}, lv.p.p, u, lv.a), NumericalError);
}

TEST(AugSubspaceStep, IdempotentAtConvergence) {
  const Level& lv = unit_square_level();
  const EigenPairs& ref = unit_square_reference();
  const EigenState st = reference_state(ref, 1);
  const EigenState next = aug_subspace_step(*lv.ctx, st, 0.1);
  EXPECT_LT(std::abs(next.lambdas[0] - ref.values[0]), 1e-9);
  EXPECT_EQ(next.iteration, st.iteration + 1);
  EXPECT_EQ(next.history.size(), st.history.size() + 1);
}

TEST(AugSubspaceStep, FirstStepHalvesTheErrorOnUnitSquare) {
  const Level& lv = unit_square_level();
  const EigenPairs& ref = unit_square_reference();
  const Clusters none;
  const EigenState st = coarse_start(lv, 1);
  const double e0 = measure_errors(st, ref, none, lv.a).anorm[0];
  const EigenState next = aug_subspace_step(*lv.ctx, st, 0.1);
  const double e1 = measure_errors(next, ref, none, lv.a).anorm[0];
  EXPECT_LT(e1, 0.5 * e0);
}

TEST(AugSubspaceStep, RitzValuesStayAboveDiscreteEigenvalues) {
  const Level& lv = unit_square_level();
  const EigenPairs& ref = unit_square_reference();
  EigenState st = coarse_start(lv, 3);
  for (int step = 0; step < 4; ++step) {
    st = aug_subspace_step(*lv.ctx, st, 0.1);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_GE(st.lambdas[i], ref.values[i] - 1e-10);
    for (int sel : st.history.back().selected) EXPECT_GE(sel, 0);
  }
}

TEST(AugSubspaceStep, ErrorSaturatesAtAStableFloor) {
  const Level& lv = unit_square_level();
  const EigenPairs& ref = unit_square_reference();
  const Clusters none;
  EigenState st = coarse_start(lv, 1);
  std::vector<double> err;
  for (int step = 0; step < 14; ++step) {
    st = aug_subspace_step(*lv.ctx, st, 0.1);
    err.push_back(measure_errors(st, ref, none, lv.a).anorm[0]);
  }
  const double floor = err[err.size() - 4];
  EXPECT_LT(floor, 1e-8);
  for (std::size_t k = err.size() - 3; k < err.size(); ++k) {
    EXPECT_GE(err[k], 0.0);
    EXPECT_NEAR(err[k], floor, 1e-2 * floor + 1e-13);
  }
}

TEST(AugSubspaceStep, LeavesLevelDataAndInputStateUntouched) {
  const Level& lv = unit_square_level();
  const std::vector<double> a_vals = lv.a.values(), b_vals = lv.b.values(), p_vals = lv.p.p.values();
  const DenseMatrix ah = *lv.ctx->cross().coarse_stiffness(), bh = *lv.ctx->cross().coarse_mass();
  const EigenState st = coarse_start(lv, 2);
  const EigenState copy = st;
  const EigenState next = aug_subspace_step(*lv.ctx, st, 0.1);
  EXPECT_EQ(lv.a.values(), a_vals);
  EXPECT_EQ(lv.b.values(), b_vals);
  EXPECT_EQ(lv.p.p.values(), p_vals);
  EXPECT_EQ(*lv.ctx->cross().coarse_stiffness(), ah);
  EXPECT_EQ(*lv.ctx->cross().coarse_mass(), bh);
  EXPECT_EQ(st.lambdas, copy.lambdas);
  EXPECT_EQ(st.vectors, copy.vectors);
  EXPECT_NE(next.lambdas, st.lambdas);
}

TEST(AugSubspaceStep, FailedStepLeavesStateUnchanged) {
  const Level& lv = unit_square_level();
  EigenState st = coarse_start(lv, 1);
  st.lambdas[0] = -1.0;
  const EigenState copy = st;
  EXPECT_THROW(aug_subspace_step(*lv.ctx, st, 0.1), NumericalError);
  EXPECT_EQ(st.lambdas, copy.lambdas);
  EXPECT_EQ(st.vectors, copy.vectors);
}
