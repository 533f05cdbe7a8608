#include "ifeig/augsub.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ifeig/eigen.hpp"
#include "ifeig/error.hpp"

namespace ifeig {

namespace {

constexpr double kDegenerateTol = 1e-10;
constexpr double kLostScore = 1e-12;

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMatrix to_eigen(const DenseMatrix& m) {
  EigenMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

DenseMatrix from_eigen(const EigenMatrix& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

CoarseBasis make_coarse_basis(const DenseMatrix& a_coarse, const DenseMatrix& b_coarse) {
  const Eigen::MatrixXd a = to_eigen(a_coarse);
  const Eigen::MatrixXd b = to_eigen(b_coarse);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b);
  if (solver.info() != Eigen::Success) throw NumericalError("coarse eigenbasis: mass block not SPD");
  CoarseBasis out;
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  out.z = from_eigen(solver.eigenvectors());
  return out;
}

AugContext::AugContext(const FeSpace& coarse, const FeSpace& fine, const Coefficient& coeff,
                       const SparseMatrix& a_fine, const SparseMatrix& b_fine, const SparseMatrix& transfer,
                       AssemblyMode mode, Preconditioner precond)
    : coarse_(&coarse), fine_(&fine), a_(&a_fine), b_(&b_fine), p_(&transfer),
      cross_(coarse, fine, coeff, a_fine, b_fine, transfer, mode), solver_(a_fine, precond),
      basis_(make_coarse_basis(*cross_.coarse_stiffness(), *cross_.coarse_mass())) {}

Correction correction_solve(const SparseMatrix& a, const SparseMatrix& b, const PcgSolver& solver,
                            const EigenState& state, double theta) {
  const std::size_t m = state.slots();
  if (m == 0 || state.vectors.size() != m) throw PreconditionError("correction_solve: invalid state");
  Correction out;
  out.u_tilde.reserve(m);
  std::vector<Vector> au;  // A u~_i of the already orthonormalized slots
  for (std::size_t j = 0; j < m; ++j) {
    const double lambda = state.lambdas[j];
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw NumericalError("degenerate correction");
    Vector rhs = spmv(b, state.vectors[j]);
    scale(rhs, lambda);
    SolveResult r = solver.solve(rhs, state.vectors[j], theta);
    Vector x = std::move(r.x);

    const double before = energy_norm(a, x);
    for (std::size_t i = 0; i < j; ++i) axpy(-dot(au[i], x), out.u_tilde[i], x);
    Vector ax = spmv(a, x);
    const double after = std::sqrt(std::max(dot(x, ax), 0.0));
    if (!(after > kDegenerateTol) || !(after > kDegenerateTol * before)) throw NumericalError("degenerate correction");
    scale(x, 1.0 / after);
    scale(ax, 1.0 / after);
    out.u_tilde.push_back(std::move(x));
    au.push_back(std::move(ax));
    out.reports.push_back(r.report);
  }
  return out;
}

BorderedEigen solve_bordered(const BorderedSystem& sys) {
  const std::size_t n = sys.coarse_dim(), m = sys.border_dim();
  const DenseEigen e = dense_sym_gen_eig(sys.stiffness(), sys.mass());
  BorderedEigen out;
  out.values = e.values;
  out.coarse = DenseMatrix(n, n + m);
  out.xi = DenseMatrix(m, n + m);
  for (std::size_t k = 0; k < n + m; ++k) {
    for (std::size_t i = 0; i < n; ++i) out.coarse(i, k) = e.vectors(i, k);
    for (std::size_t i = 0; i < m; ++i) out.xi(i, k) = e.vectors(n + i, k);
  }
  return out;
}

BorderedEigen solve_bordered(const BorderedSystem& sys, const CoarseBasis& basis) {
  const std::size_t n = sys.coarse_dim(), m = sys.border_dim();
  if (basis.z.rows() != n || basis.values.size() != n)
    throw PreconditionError("solve_bordered: coarse basis dimension mismatch");
  const EigenMatrix z = to_eigen(basis.z);
  const Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(basis.values.data(), static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd c = z.transpose() * to_eigen(sys.b_border);
  const Eigen::MatrixXd d = z.transpose() * to_eigen(sys.a_border);

  // In coordinates (Z y, xi) the pencil is ([Lambda d; d' alpha], [I c; c' beta]).
  const Eigen::MatrixXd schur = to_eigen(sys.beta) - c.transpose() * c;
  Eigen::LLT<Eigen::MatrixXd> llt(schur);
  if (llt.info() != Eigen::Success) throw NumericalError("mass block not SPD");
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i)
    if (!(llt.matrixL()(i, i) > 1e-12 * std::sqrt(std::abs(sys.beta(i, i)))))
      throw NumericalError("mass block not SPD");
  const auto ls = llt.matrixL();

  const Eigen::MatrixXd lc = lam.asDiagonal() * c;
  Eigen::MatrixXd s21 = d.transpose() - c.transpose() * lam.asDiagonal();
  ls.solveInPlace(s21);
  Eigen::MatrixXd s22 = to_eigen(sys.alpha) - c.transpose() * d - d.transpose() * c + c.transpose() * lc;
  ls.solveInPlace(s22);
  Eigen::MatrixXd s22t = s22.transpose();
  ls.solveInPlace(s22t);

  const auto nn = static_cast<Eigen::Index>(n), mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(nn + mm, nn + mm);
  s.topLeftCorner(nn, nn).diagonal() = lam;
  s.bottomLeftCorner(mm, nn) = s21;
  s.topRightCorner(nn, mm) = s21.transpose();
  s.bottomRightCorner(mm, mm) = 0.5 * (s22t + s22t.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw NumericalError("solve_bordered: eigensolver failed");
  const Eigen::MatrixXd& w = eig.eigenvectors();

  Eigen::MatrixXd xi = w.bottomRows(mm);
  ls.transpose().solveInPlace(xi);
  const Eigen::MatrixXd y = w.topRows(nn) - c * xi;

  BorderedEigen out;
  out.values.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  out.coarse = from_eigen(z * y);
  out.xi = from_eigen(xi);
  return out;
}

Selection select_eigenpairs(const BorderedEigen& pairs, const BorderedSystem& sys, std::size_t m) {
  const std::size_t count = pairs.values.size();
  const std::size_t n = sys.coarse_dim();
  if (m > sys.border_dim() || count < m) throw PreconditionError("select_eigenpairs: not enough pairs");
  Selection out;
  std::vector<bool> used(count, false);
  for (std::size_t j = 0; j < m; ++j) {
    const double u_norm = std::sqrt(std::max(sys.alpha(j, j), 0.0));
    int best = -1;
    double best_score = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (used[i]) continue;
      // a(v_i, u~_j) is row N_H + j of the bordered stiffness applied to v_i,
      // and ||v_i||_a^2 = lambda_i for B-orthonormal eigenvectors.
      double a_vu = 0.0;
      for (std::size_t r = 0; r < n; ++r) a_vu += sys.a_border(r, j) * pairs.coarse(r, i);
      for (std::size_t r = 0; r < sys.border_dim(); ++r) a_vu += sys.alpha(j, r) * pairs.xi(r, i);
      const double v_norm = std::sqrt(std::max(pairs.values[i], 0.0));
      const double s = v_norm > 0.0 && u_norm > 0.0 ? std::abs(a_vu) / (v_norm * u_norm) : 0.0;
      if (s > best_score) {
        best_score = s;
        best = static_cast<int>(i);
      }
    }
    if (!(best_score >= kLostScore)) throw NumericalError("lost eigenvector");
    used[static_cast<std::size_t>(best)] = true;
    out.index.push_back(best);
    out.score.push_back(best_score);
  }
  return out;
}

Vector reassemble_fine(std::span<const double> u_coarse, std::span<const double> xi, const SparseMatrix& transfer,
                       std::span<const Vector> u_tilde, const SparseMatrix& a) {
  if (u_coarse.size() != transfer.cols() || xi.size() != u_tilde.size())
    throw PreconditionError("reassemble_fine: dimension mismatch");
  Vector u = spmv(transfer, u_coarse);
  for (std::size_t j = 0; j < u_tilde.size(); ++j) {
    if (u_tilde[j].size() != u.size()) throw PreconditionError("reassemble_fine: dimension mismatch");
    axpy(xi[j], u_tilde[j], u);
  }
  const double norm = energy_norm(a, u);
  if (!(norm > 0.0)) throw NumericalError("reassemble_fine: zero vector");
  scale(u, 1.0 / norm);
  fix_sign(u);
  return u;
}

EigenState aug_subspace_step(const AugContext& ctx, const EigenState& state, double theta, int level) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = state.slots();
  for (const auto& v : state.vectors)
    if (v.size() != ctx.fine().n_dof()) throw PreconditionError("aug_subspace_step: state/level mismatch");

  const Correction corr = correction_solve(ctx.a(), ctx.b(), ctx.solver(), state, theta);
  const BorderedSystem sys = ctx.cross().assemble(corr.u_tilde);
  const BorderedEigen pairs = solve_bordered(sys, ctx.coarse_basis());
  const Selection sel = select_eigenpairs(pairs, sys, m);

  std::vector<Vector> vectors(m);
  std::vector<double> lambdas(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto k = static_cast<std::size_t>(sel.index[j]);
    vectors[j] = reassemble_fine(pairs.coarse.column(k), pairs.xi.column(k), ctx.transfer(), corr.u_tilde, ctx.a());
    lambdas[j] = pairs.values[k];
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return lambdas[x] < lambdas[y]; });

  EigenState next;
  next.iteration = state.iteration + 1;
  next.history = state.history;
  IterationRecord rec;
  rec.level = level;
  rec.iteration = next.iteration;
  rec.dense_dim = sys.coarse_dim() + m;
  rec.n_dof = ctx.fine().n_dof();
  for (std::size_t k : order) {
    next.lambdas.push_back(lambdas[k]);
    next.vectors.push_back(std::move(vectors[k]));
    rec.lambdas.push_back(lambdas[k]);
    rec.contraction.push_back(corr.reports[k].achieved_contraction);
    rec.selected.push_back(sel.index[k]);
    rec.scores.push_back(sel.score[k]);
  }
  for (const auto& r : corr.reports) {
    rec.pcg_iterations += r.iterations;
    rec.spmv += static_cast<std::size_t>(r.iterations) + 1;
  }
  // b u, orthonormalization, border assembly and renormalization
  rec.spmv += 5 * m;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  next.history.push_back(std::move(rec));
  return next;
}

}  // namespace ifeig
