#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ifeig/dense.hpp"
#include "ifeig/fem.hpp"
#include "ifeig/locate.hpp"
#include "ifeig/sparse.hpp"

namespace ifeig {

/// How coarse basis functions enter the augmented problem on the fine mesh.
/// galerkin: through their fine-space interpolants P psi (a true subspace of V_h).
/// exact: evaluated directly at fine-triangle quadrature points.
enum class AssemblyMode { galerkin, exact };

std::string to_string(AssemblyMode mode);
AssemblyMode parse_assembly_mode(std::string_view text);

/// Blocks of the bordered pencil
///   [A_H  a_h]      [B_H  b_h]
///   [a_h' alpha] ,  [b_h' beta]
/// with N_H coarse rows and m border rows.
struct BorderedSystem {
  std::shared_ptr<const DenseMatrix> a_coarse, b_coarse;
  DenseMatrix a_border, b_border;  // N_H x m
  DenseMatrix alpha, beta;         // m x m

  std::size_t coarse_dim() const { return a_coarse->rows(); }
  std::size_t border_dim() const { return alpha.rows(); }
  DenseMatrix stiffness() const;
  DenseMatrix mass() const;
};

// Throws NumericalError when the bordered mass matrix is not positive definite.
void check_bordered_mass(const BorderedSystem& sys);

/// Cross-mesh assembly for one (coarse, fine) pair. A_H and B_H are built once;
/// only the border blocks depend on the augmenting functions. All referenced
/// objects must outlive the assembler.
class CrossAssembler {
 public:
  CrossAssembler(const FeSpace& coarse, const FeSpace& fine, const Coefficient& coeff,
                 const SparseMatrix& a_fine, const SparseMatrix& b_fine, const SparseMatrix& transfer,
                 AssemblyMode mode);

  AssemblyMode mode() const { return mode_; }
  const std::shared_ptr<const DenseMatrix>& coarse_stiffness() const { return a_coarse_; }
  const std::shared_ptr<const DenseMatrix>& coarse_mass() const { return b_coarse_; }

  // u_tilde holds m fine dof vectors. No independence check (see assemble_cross).
  BorderedSystem assemble(std::span<const Vector> u_tilde) const;

 private:
  struct QuadPoint {
    int coarse_triangle;
    std::array<double, 3> psi;  // coarse barycentrics at the point
  };

  void build_quadrature();
  void assemble_coarse_exact(DenseMatrix& a, DenseMatrix& b) const;
  void assemble_coarse_galerkin(DenseMatrix& a, DenseMatrix& b) const;

  const FeSpace* coarse_;
  const FeSpace* fine_;
  const Coefficient* coeff_;
  const SparseMatrix* a_fine_;
  const SparseMatrix* b_fine_;
  const SparseMatrix* transfer_;
  AssemblyMode mode_;
  std::vector<QuadPoint> quad_;                   // 3 per fine triangle, exact mode only
  std::vector<std::array<Point, 3>> coarse_grad_;  // per coarse triangle
  std::shared_ptr<const DenseMatrix> a_coarse_, b_coarse_;
};

/// One-shot cross assembly: builds fine matrices and the transfer, then the
/// bordered blocks. Throws NumericalError for dependent u_tilde columns.
BorderedSystem assemble_cross(const FeSpace& coarse, const FeSpace& fine, const Coefficient& coeff,
                              std::span<const Vector> u_tilde, AssemblyMode mode);

}  // namespace ifeig
