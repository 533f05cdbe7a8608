#include "ifeig/cross.hpp"

#include "ifeig/eigen.hpp"
#include "ifeig/error.hpp"
#include "ifeig/transfer.hpp"

namespace ifeig {

std::string to_string(AssemblyMode mode) { return mode == AssemblyMode::exact ? "exact" : "galerkin"; }

AssemblyMode parse_assembly_mode(std::string_view text) {
  if (text == "galerkin") return AssemblyMode::galerkin;
  if (text == "exact") return AssemblyMode::exact;
  throw PreconditionError("unknown assembly mode '" + std::string(text) + "'");
}

DenseMatrix BorderedSystem::stiffness() const {
  const std::size_t n = coarse_dim(), m = border_dim();
  DenseMatrix out(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = (*a_coarse)(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, n + j) = out(n + j, i) = a_border(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(n + i, n + j) = alpha(i, j);
  return out;
}

DenseMatrix BorderedSystem::mass() const {
  const std::size_t n = coarse_dim(), m = border_dim();
  DenseMatrix out(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = (*b_coarse)(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out(i, n + j) = out(n + j, i) = b_border(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out(n + i, n + j) = beta(i, j);
  return out;
}

void check_bordered_mass(const BorderedSystem& sys) {
  try {
    cholesky(sys.mass());
  } catch (const NumericalError&) {
    throw NumericalError("rank-deficient bordered mass matrix");
  }
}

CrossAssembler::CrossAssembler(const FeSpace& coarse, const FeSpace& fine, const Coefficient& coeff,
                               const SparseMatrix& a_fine, const SparseMatrix& b_fine,
                               const SparseMatrix& transfer, AssemblyMode mode)
    : coarse_(&coarse), fine_(&fine), coeff_(&coeff), a_fine_(&a_fine), b_fine_(&b_fine),
      transfer_(&transfer), mode_(mode) {
  if (a_fine.rows() != fine.n_dof() || b_fine.rows() != fine.n_dof() || transfer.rows() != fine.n_dof() ||
      transfer.cols() != coarse.n_dof())
    throw PreconditionError("CrossAssembler: dimension mismatch");
  auto a = std::make_shared<DenseMatrix>(coarse.n_dof(), coarse.n_dof());
  auto b = std::make_shared<DenseMatrix>(coarse.n_dof(), coarse.n_dof());
  if (mode_ == AssemblyMode::exact) {
    build_quadrature();
    assemble_coarse_exact(*a, *b);
  } else {
    assemble_coarse_galerkin(*a, *b);
  }
  a->symmetrize();
  b->symmetrize();
  a_coarse_ = std::move(a);
  b_coarse_ = std::move(b);
}

void CrossAssembler::build_quadrature() {
  const Mesh& cm = coarse_->mesh();
  const Mesh& fm = fine_->mesh();
  coarse_grad_.resize(cm.num_triangles());
  for (std::size_t t = 0; t < cm.num_triangles(); ++t) {
    const auto v = cm.vertices(t);
    coarse_grad_[t] = basis_gradients(v[0], v[1], v[2]);
  }
  const PointLocator locator(cm);
  quad_.resize(3 * fm.num_triangles());
  for (std::size_t t = 0; t < fm.num_triangles(); ++t) {
    const auto v = fm.vertices(t);
    const Point g = fm.centroid(t);
    for (int e = 0; e < 3; ++e) {
      const Point mid = 0.5 * (v[e] + v[(e + 1) % 3]);
      // Midpoints on a coarse edge belong to the coarse triangle on this fine
      // triangle's side; a small shift toward the centroid picks it.
      const LocateResult loc = locator.locate(mid + 1e-6 * (g - mid));
      const auto cv = cm.vertices(static_cast<std::size_t>(loc.triangle));
      quad_[3 * t + e] = {loc.triangle, barycentric(mid, cv[0], cv[1], cv[2])};
    }
  }
}

void CrossAssembler::assemble_coarse_exact(DenseMatrix& a, DenseMatrix& b) const {
  const Mesh& cm = coarse_->mesh();
  const Mesh& fm = fine_->mesh();
  for (std::size_t t = 0; t < fm.num_triangles(); ++t) {
    const double w = fm.signed_area(t) / 3.0;
    const double k = (*coeff_)(fm.region[t]);
    for (int q = 0; q < 3; ++q) {
      const QuadPoint& qp = quad_[3 * t + q];
      const auto& tri = cm.triangles[static_cast<std::size_t>(qp.coarse_triangle)];
      const auto& g = coarse_grad_[static_cast<std::size_t>(qp.coarse_triangle)];
      for (int i = 0; i < 3; ++i) {
        const int di = coarse_->dof(static_cast<std::size_t>(tri[i]));
        if (di < 0) continue;
        for (int j = 0; j < 3; ++j) {
          const int dj = coarse_->dof(static_cast<std::size_t>(tri[j]));
          if (dj < 0) continue;
          a(di, dj) += w * k * (g[i].x * g[j].x + g[i].y * g[j].y);
          b(di, dj) += w * qp.psi[i] * qp.psi[j];
        }
      }
    }
  }
}

void CrossAssembler::assemble_coarse_galerkin(DenseMatrix& a, DenseMatrix& b) const {
  const SparseMatrix pt = transfer_->transpose();
  a = multiply(pt, multiply(*a_fine_, *transfer_)).to_dense();
  b = multiply(pt, multiply(*b_fine_, *transfer_)).to_dense();
}

BorderedSystem CrossAssembler::assemble(std::span<const Vector> u_tilde) const {
  const std::size_t n = coarse_->n_dof(), m = u_tilde.size();
  if (m == 0) throw PreconditionError("assemble: no augmenting functions");
  for (const auto& u : u_tilde)
    if (u.size() != fine_->n_dof()) throw PreconditionError("assemble: u_tilde dimension mismatch");

  BorderedSystem sys;
  sys.a_coarse = a_coarse_;
  sys.b_coarse = b_coarse_;
  sys.a_border = DenseMatrix(n, m);
  sys.b_border = DenseMatrix(n, m);
  sys.alpha = DenseMatrix(m, m);
  sys.beta = DenseMatrix(m, m);

  std::vector<Vector> au(m), bu(m);
  for (std::size_t j = 0; j < m; ++j) {
    au[j] = spmv(*a_fine_, u_tilde[j]);
    bu[j] = spmv(*b_fine_, u_tilde[j]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      sys.alpha(i, j) = dot(u_tilde[i], au[j]);
      sys.beta(i, j) = dot(u_tilde[i], bu[j]);
    }
  }
  sys.alpha.symmetrize();
  sys.beta.symmetrize();

  if (mode_ == AssemblyMode::galerkin) {
    for (std::size_t j = 0; j < m; ++j) {
      sys.a_border.set_column(j, spmv_transpose(*transfer_, au[j]));
      sys.b_border.set_column(j, spmv_transpose(*transfer_, bu[j]));
    }
    return sys;
  }

  const Mesh& cm = coarse_->mesh();
  const Mesh& fm = fine_->mesh();
  std::vector<Vector> nodal(m);
  for (std::size_t j = 0; j < m; ++j) nodal[j] = to_nodal(*fine_, u_tilde[j]);
  for (std::size_t t = 0; t < fm.num_triangles(); ++t) {
    const auto v = fm.vertices(t);
    const auto& ftri = fm.triangles[t];
    const auto fg = basis_gradients(v[0], v[1], v[2]);
    const double w = fm.signed_area(t) / 3.0;
    const double k = (*coeff_)(fm.region[t]);
    for (std::size_t j = 0; j < m; ++j) {
      const Vector& u = nodal[j];
      Point grad{0.0, 0.0};
      for (int r = 0; r < 3; ++r) grad = grad + u[static_cast<std::size_t>(ftri[r])] * fg[r];
      for (int q = 0; q < 3; ++q) {
        const QuadPoint& qp = quad_[3 * t + q];
        const double uq =
            0.5 * (u[static_cast<std::size_t>(ftri[q])] + u[static_cast<std::size_t>(ftri[(q + 1) % 3])]);
        const auto& ctri = cm.triangles[static_cast<std::size_t>(qp.coarse_triangle)];
        const auto& g = coarse_grad_[static_cast<std::size_t>(qp.coarse_triangle)];
        for (int i = 0; i < 3; ++i) {
          const int di = coarse_->dof(static_cast<std::size_t>(ctri[i]));
          if (di < 0) continue;
          sys.a_border(di, j) += w * k * (g[i].x * grad.x + g[i].y * grad.y);
          sys.b_border(di, j) += w * qp.psi[i] * uq;
        }
      }
    }
  }
  return sys;
}

BorderedSystem assemble_cross(const FeSpace& coarse, const FeSpace& fine, const Coefficient& coeff,
                              std::span<const Vector> u_tilde, AssemblyMode mode) {
  const SparseMatrix a = assemble_stiffness(fine, coeff);
  const SparseMatrix b = assemble_mass(fine);
  const TransferMatrix p = build_transfer(coarse, fine);
  const CrossAssembler assembler(coarse, fine, coeff, a, b, p.p, mode);
  BorderedSystem sys = assembler.assemble(u_tilde);
  check_bordered_mass(sys);
  return sys;
}

}  // namespace ifeig
