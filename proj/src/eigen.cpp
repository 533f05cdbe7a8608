#include "ifeig/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ifeig {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kCholeskyRelTol = 1e-12;

// Solves L y = b in place for every column of b (L lower triangular).
void forward_substitute_columns(const DenseMatrix& l, DenseMatrix& b) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    auto bi = b.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) bi[j] -= lik * bk[j];
    }
    const double d = l(i, i);
    for (double& v : bi) v /= d;
  }
}

// Solves L^T y = b in place for every column of b.
void backward_substitute_columns(const DenseMatrix& l, DenseMatrix& b) {
  const std::size_t n = l.rows();
  for (std::size_t ii = n; ii-- > 0;) {
    auto bi = b.row(ii);
    const double d = l(ii, ii);
    for (double& v : bi) v /= d;
    for (std::size_t k = 0; k < ii; ++k) {
      const double lik = l(ii, k);
      if (lik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) bk[j] -= lik * bi[j];
    }
  }
}

}  // namespace

DenseMatrix cholesky(const DenseMatrix& b) {
  const std::size_t n = b.rows();
  if (b.cols() != n) throw std::invalid_argument("cholesky: matrix not square");
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = b(j, j);
    const auto lj = l.row(j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > kCholeskyRelTol * std::abs(b(j, j))) || !std::isfinite(d))
      throw NumericalError("mass block not SPD");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = l.row(i);
      double s = b(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      l(i, j) = s / ljj;
    }
  }
  return l;
}

DenseEigen jacobi_eigen(DenseMatrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigen: matrix not square");
  a.symmetrize();
  // Rows of vt are the eigenvectors; keeps rotation updates contiguous.
  DenseMatrix vt = DenseMatrix::identity(n);
  std::vector<double> d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i] = d[i] = a(i, i);

  bool converged = n <= 1;
  for (int sweep = 1; sweep <= kMaxJacobiSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == 0.0) {
      converged = true;
      break;
    }
    const double tresh = sweep < 4 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && std::abs(d[p]) + g == std::abs(d[p]) && std::abs(d[q]) + g == std::abs(d[q])) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        if (std::abs(apq) <= tresh) continue;
        const double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double dh = t * apq;
        z[p] -= dh;
        z[q] += dh;
        d[p] -= dh;
        d[q] += dh;
        a(p, q) = a(q, p) = 0.0;
        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double gp = rp[k];
          const double gq = rq[k];
          const double np = gp - s * (gq + gp * tau);
          const double nq = gq + s * (gp - gq * tau);
          rp[k] = np;
          rq[k] = nq;
          a(k, p) = np;
          a(k, q) = nq;
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double gp = vp[k];
          const double gq = vq[k];
          vp[k] = gp - s * (gq + gp * tau);
          vq[k] = gq + s * (gp - gq * tau);
        }
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0.0;
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off != 0.0) throw NumericalError("jacobi_eigen: no convergence");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  DenseEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    const auto v = vt.row(order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i];
  }
  return out;
}

DenseEigen dense_sym_gen_eig(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw std::invalid_argument("dense_sym_gen_eig: dimension mismatch");
  const DenseMatrix l = cholesky(b);
  DenseMatrix w = a;
  forward_substitute_columns(l, w);  // L^{-1} A
  DenseMatrix c = w.transpose();     // A L^{-T}
  forward_substitute_columns(l, c);  // L^{-1} A L^{-T}
  DenseEigen e = jacobi_eigen(std::move(c));
  backward_substitute_columns(l, e.vectors);  // L^{-T} Q
  return e;
}

EigenPairs reference_eigensolve(const SparseMatrix& a, const SparseMatrix& b, int nev,
                                const ReferenceOptions& opts, const std::optional<DenseMatrix>& initial) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw std::invalid_argument("reference_eigensolve: dimension mismatch");
  if (nev < 1 || static_cast<std::size_t>(nev) > n / 4)
    throw PreconditionError("reference_eigensolve: need 1 <= nev <= n/4 (nev=" + std::to_string(nev) +
                            ", n=" + std::to_string(n) + ")");
  const std::size_t p = std::min(n, static_cast<std::size_t>(nev + opts.guard));

  std::vector<Vector> x(p, Vector(n));
  if (initial) {
    if (initial->rows() != n || initial->cols() != p)
      throw std::invalid_argument("reference_eigensolve: initial block must be n x (nev + guard)");
    for (std::size_t j = 0; j < p; ++j) x[j] = initial->column(j);
  } else {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) x[j][i] = normal(rng);
  }

  const PcgSolver solver(a, opts.precond);
  std::vector<double> ritz(p, 0.0), prev(p, 0.0);
  bool have_ritz = false;
  std::vector<Vector> y(p), ay(p, Vector(n)), by(p, Vector(n));
  Vector rhs(n), x0(n);

  auto finish = [&](int sweeps) {
    EigenPairs out;
    out.sweeps = sweeps;
    for (int i = 0; i < nev; ++i) {
      Vector u = x[static_cast<std::size_t>(i)];
      const double an = std::sqrt(bilinear(a, u, u));
      scale(u, 1.0 / an);
      fix_sign(u);
      out.values.push_back(ritz[static_cast<std::size_t>(i)]);
      out.vectors.push_back(std::move(u));
    }
    return out;
  };

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    for (std::size_t j = 0; j < p; ++j) {
      spmv(b, x[j], rhs);
      if (have_ritz) {
        for (std::size_t i = 0; i < n; ++i) x0[i] = x[j][i] / ritz[j];
      } else {
        std::fill(x0.begin(), x0.end(), 0.0);
      }
      y[j] = solver.solve(rhs, x0, opts.inner_theta).x;
      spmv(a, y[j], ay[j]);
      spmv(b, y[j], by[j]);
    }
    DenseMatrix ar(p, p), br(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i; j < p; ++j) {
        ar(i, j) = ar(j, i) = dot(y[i], ay[j]);
        br(i, j) = br(j, i) = dot(y[i], by[j]);
      }
    }
    const DenseEigen rr = dense_sym_gen_eig(ar, br);
    prev = ritz;
    ritz = rr.values;

    bool converged = have_ritz;
    Vector ax(n), bx(n);
    for (std::size_t k = 0; k < p; ++k) {
      std::fill(x[k].begin(), x[k].end(), 0.0);
      std::fill(ax.begin(), ax.end(), 0.0);
      std::fill(bx.begin(), bx.end(), 0.0);
      for (std::size_t j = 0; j < p; ++j) {
        const double w = rr.vectors(j, k);
        axpy(w, y[j], x[k]);
        if (k < static_cast<std::size_t>(nev)) {
          axpy(w, ay[j], ax);
          axpy(w, by[j], bx);
        }
      }
      if (k < static_cast<std::size_t>(nev) && converged) {
        if (std::abs(ritz[k] - prev[k]) >= opts.tol) converged = false;
        Vector res = ax;
        axpy(-ritz[k], bx, res);
        if (norm2(res) >= opts.residual_tol * ritz[k] * norm2(bx)) converged = false;
      }
    }
    have_ritz = true;
    if (converged) return finish(sweep);
  }
  throw NonConvergenceError("reference_eigensolve: no convergence after " + std::to_string(opts.max_sweeps) +
                                " sweeps",
                            finish(opts.max_sweeps));
}

}  // namespace ifeig
