#pragma once

#include <functional>
#include <span>

#include "ifeig/sparse.hpp"

namespace ifeig {

enum class Preconditioner { none, ssor };

struct SolveReport {
  int iterations = 0;
  // Preconditioned residual norms sqrt(r^T M^{-1} r) at start and end.
  double initial_residual_a = 0.0;
  double final_residual_a = 0.0;
  // Upper estimate of ||x_hat - x||_A / ||x_hat - x0||_A.
  double achieved_contraction = 0.0;
  bool breakdown = false;  // max_iter hit before the contraction target
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

/// Preconditioned conjugate gradients with an A-norm contraction target.
///
/// Stops as soon as ||x_hat - x_k||_A <= theta ||x_hat - x_0||_A is certified by
///   ||e_k||_A^2 <= rho_k / mu_min,
///   ||e_0||_A^2 >= sum_{j<k} alpha_j rho_j + rho_k / mu_max,
/// with rho = r^T M^{-1} r and mu_min, mu_max the extreme eigenvalues of
/// M^{-1}A estimated once per solver by 20 power-iteration steps each.
class PcgSolver {
 public:
  using Observer = std::function<void(int iteration, std::span<const double> x)>;

  explicit PcgSolver(const SparseMatrix& a, Preconditioner precond = Preconditioner::ssor,
                     double ssor_omega = 1.0);

  SolveResult solve(std::span<const double> rhs, std::span<const double> x0, double theta,
                    int max_iter = 20000, const Observer& observer = {}) const;

  void apply_preconditioner(std::span<const double> r, std::span<double> z) const;

  // (mu_min, mu_max) estimates of the spectrum of M^{-1}A, computed at construction.
  std::pair<double, double> spectrum_bounds() const { return {mu_min_, mu_max_}; }

  const SparseMatrix& matrix() const { return *a_; }

 private:
  const SparseMatrix* a_;
  Preconditioner precond_;
  double omega_;
  std::vector<std::size_t> diag_pos_;
  double mu_min_ = 0.0, mu_max_ = 0.0;
};

SolveResult pcg_solve(const SparseMatrix& a, std::span<const double> rhs, std::span<const double> x0,
                      double theta, int max_iter, Preconditioner precond = Preconditioner::ssor);

}  // namespace ifeig
