#include "ifeig/pcg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ifeig/error.hpp"

namespace ifeig {

namespace {

constexpr int kPowerSteps = 20;
// Power iteration underestimates mu_max and overestimates mu_min; widen both.
constexpr double kMaxInflation = 1.05;
constexpr double kMinDeflation = 0.25;

}  // namespace

PcgSolver::PcgSolver(const SparseMatrix& a, Preconditioner precond, double ssor_omega)
    : a_(&a), precond_(precond), omega_(ssor_omega) {
  if (a.rows() != a.cols()) throw std::invalid_argument("PcgSolver: matrix not square");
  if (!(ssor_omega > 0.0 && ssor_omega < 2.0)) throw std::invalid_argument("PcgSolver: SSOR omega must lie in (0, 2)");
  const std::size_t n = a.rows();
  diag_pos_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = a.col_index().begin() + static_cast<std::ptrdiff_t>(a.row_ptr()[i]);
    const auto last = a.col_index().begin() + static_cast<std::ptrdiff_t>(a.row_ptr()[i + 1]);
    const auto it = std::lower_bound(first, last, static_cast<int>(i));
    if (it == last || *it != static_cast<int>(i) || a.values()[static_cast<std::size_t>(it - a.col_index().begin())] <= 0.0)
      throw NumericalError("PcgSolver: matrix has a non-positive diagonal entry (not SPD)");
    diag_pos_[i] = static_cast<std::size_t>(it - a.col_index().begin());
  }
  if (n == 0) return;

  // Power iteration in the A inner product, where M^{-1}A is self-adjoint.
  auto rayleigh_power = [&](Vector y, double shift) {
    Vector ay(n), z(n);
    double mu = 0.0;
    for (int k = 0; k < kPowerSteps; ++k) {
      spmv(a, y, ay);
      const double yay = dot(y, ay);
      if (!(yay > 0.0)) throw NumericalError("PcgSolver: y^T A y <= 0 (not SPD)");
      apply_preconditioner(ay, z);
      // z = M^{-1} A y; shifted operator is shift*y - z.
      if (shift > 0.0)
        for (std::size_t i = 0; i < n; ++i) z[i] = shift * y[i] - z[i];
      mu = dot(ay, z) / yay;
      const double nz = norm2(z);
      if (nz == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) y[i] = z[i] / nz;
    }
    return mu;
  };

  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector start(n);
  for (double& v : start) v = unif(rng);
  mu_max_ = kMaxInflation * rayleigh_power(start, 0.0);
  // A smooth start vector keeps the shifted iteration close to the bottom of the spectrum.
  const double top = rayleigh_power(Vector(n, 1.0), mu_max_);
  mu_min_ = kMinDeflation * std::max(mu_max_ - top, 1e-300);
}

void PcgSolver::apply_preconditioner(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = a_->rows();
  if (precond_ == Preconditioner::none) {
    std::copy(r.begin(), r.end(), z.begin());
    return;
  }
  const auto& ptr = a_->row_ptr();
  const auto& col = a_->col_index();
  const auto& val = a_->values();
  // M^{-1} r = w(2-w) (D + wU)^{-1} D (D + wL)^{-1} r
  for (std::size_t i = 0; i < n; ++i) {
    double s = r[i];
    for (std::size_t k = ptr[i]; k < diag_pos_[i]; ++k) s -= omega_ * val[k] * z[static_cast<std::size_t>(col[k])];
    z[i] = s / val[diag_pos_[i]];
  }
  for (std::size_t i = 0; i < n; ++i) z[i] *= val[diag_pos_[i]];
  const double c = omega_ * (2.0 - omega_);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t k = diag_pos_[ii] + 1; k < ptr[ii + 1]; ++k) s -= omega_ * val[k] * z[static_cast<std::size_t>(col[k])];
    z[ii] = s / val[diag_pos_[ii]];
  }
  for (std::size_t i = 0; i < n; ++i) z[i] *= c;
}

SolveResult PcgSolver::solve(std::span<const double> rhs, std::span<const double> x0, double theta,
                             int max_iter, const Observer& observer) const {
  const SparseMatrix& a = *a_;
  const std::size_t n = a.rows();
  if (rhs.size() != n || x0.size() != n) throw std::invalid_argument("pcg_solve: dimension mismatch");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("pcg_solve: theta must lie in (0, 1)");

  SolveResult out;
  out.x.assign(x0.begin(), x0.end());
  Vector& x = out.x;
  Vector r(n), z(n), p(n), ap(n);
  spmv(a, x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  apply_preconditioner(r, z);
  double rho = dot(r, z);
  const double rho0 = rho;
  out.report.initial_residual_a = std::sqrt(std::max(rho0, 0.0));
  out.report.final_residual_a = out.report.initial_residual_a;
  if (observer) observer(0, x);
  if (rho0 <= 0.0) return out;

  p = z;
  double energy_drop = 0.0;  // sum_j alpha_j rho_j = ||e_0||_A^2 - ||e_k||_A^2
  const double theta2 = theta * theta;
  for (int k = 1; k <= max_iter; ++k) {
    spmv(a, p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw NumericalError("pcg_solve: p^T A p <= 0 (matrix not SPD)");
    const double alpha = rho / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    energy_drop += alpha * rho;
    apply_preconditioner(r, z);
    const double rho_new = dot(r, z);
    out.report.iterations = k;
    if (observer) observer(k, x);

    const double err_k = std::max(rho_new, 0.0) / mu_min_;
    const double err_0 = std::max(rho0 / mu_max_, energy_drop + std::max(rho_new, 0.0) / mu_max_);
    const double ratio2 = err_k / err_0;
    out.report.final_residual_a = std::sqrt(std::max(rho_new, 0.0));
    out.report.achieved_contraction = std::sqrt(std::min(ratio2, 1.0));
    if (rho_new <= 0.0 || ratio2 <= theta2) return out;

    const double beta = rho_new / rho;
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  out.report.breakdown = true;
  return out;
}

SolveResult pcg_solve(const SparseMatrix& a, std::span<const double> rhs, std::span<const double> x0,
                      double theta, int max_iter, Preconditioner precond) {
  return PcgSolver(a, precond).solve(rhs, x0, theta, max_iter);
}

}  // namespace ifeig
