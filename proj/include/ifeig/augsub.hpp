#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ifeig/cross.hpp"
#include "ifeig/dense.hpp"
#include "ifeig/fem.hpp"
#include "ifeig/pcg.hpp"
#include "ifeig/sparse.hpp"

namespace ifeig {

/// Diagnostics of one solver event: the coarsest direct solve (iteration 0)
/// or one augmented subspace step.
struct IterationRecord {
  int level = 1;
  int iteration = 0;
  std::vector<double> lambdas;
  std::vector<double> contraction;  // achieved PCG contraction per slot (0 for direct solves)
  std::vector<int> selected;        // bordered eigenpair index chosen per slot
  std::vector<double> scores;       // selection score of the chosen pair per slot
  int pcg_iterations = 0;
  std::size_t spmv = 0;
  std::size_t dense_dim = 0;
  std::size_t n_dof = 0;
  double seconds = 0.0;
};

/// m tracked fine eigenpair approximations, ascending in lambda, each vector
/// a-normalized (u^T A_h u = 1).
struct EigenState {
  std::vector<double> lambdas;
  std::vector<Vector> vectors;
  int iteration = 0;
  std::vector<IterationRecord> history;

  std::size_t slots() const { return lambdas.size(); }
};

/// Generalized eigenbasis of (A_H, B_H): Z^T B_H Z = I, Z^T A_H Z = diag(values).
struct CoarseBasis {
  std::vector<double> values;
  DenseMatrix z;
};

CoarseBasis make_coarse_basis(const DenseMatrix& a_coarse, const DenseMatrix& b_coarse);

/// Immutable per-(coarse, fine) data used by every step on that fine level.
/// Referenced spaces and matrices must outlive the context.
class AugContext {
 public:
  AugContext(const FeSpace& coarse, const FeSpace& fine, const Coefficient& coeff, const SparseMatrix& a_fine,
             const SparseMatrix& b_fine, const SparseMatrix& transfer, AssemblyMode mode,
             Preconditioner precond = Preconditioner::ssor);
  AugContext(const AugContext&) = delete;
  AugContext& operator=(const AugContext&) = delete;

  const FeSpace& coarse() const { return *coarse_; }
  const FeSpace& fine() const { return *fine_; }
  const SparseMatrix& a() const { return *a_; }
  const SparseMatrix& b() const { return *b_; }
  const SparseMatrix& transfer() const { return *p_; }
  const CrossAssembler& cross() const { return cross_; }
  const PcgSolver& solver() const { return solver_; }
  const CoarseBasis& coarse_basis() const { return basis_; }

 private:
  const FeSpace* coarse_;
  const FeSpace* fine_;
  const SparseMatrix* a_;
  const SparseMatrix* b_;
  const SparseMatrix* p_;
  CrossAssembler cross_;
  PcgSolver solver_;
  CoarseBasis basis_;
};

struct Correction {
  std::vector<Vector> u_tilde;  // a-orthonormal
  std::vector<SolveReport> reports;
};

/// Approximately solves A_h u~ = lambda B_h u per slot to contraction theta
/// from initial guess u, then a-orthonormalizes the block by modified
/// Gram-Schmidt. Throws NumericalError("degenerate correction") when a slot
/// has lambda <= 0 or its corrected function collapses.
Correction correction_solve(const SparseMatrix& a, const SparseMatrix& b, const PcgSolver& solver,
                            const EigenState& state, double theta);

/// All N_H + m eigenpairs of a bordered pencil, ascending and B-orthonormal.
/// Column i of `coarse` and `xi` are the two blocks of eigenvector i.
struct BorderedEigen {
  std::vector<double> values;
  DenseMatrix coarse;  // N_H x (N_H + m)
  DenseMatrix xi;      // m x (N_H + m)
};

BorderedEigen solve_bordered(const BorderedSystem& sys);
// Same result through the cached coarse eigenbasis, reducing to an arrowhead
// standard problem of the same size.
BorderedEigen solve_bordered(const BorderedSystem& sys, const CoarseBasis& basis);

struct Selection {
  std::vector<int> index;      // per slot
  std::vector<double> score;   // per slot
};

/// Greedy assignment of bordered eigenpairs to slots, slot order, without
/// replacement, by the a-cosine s_ij = |a(v_i, u~_j)| / (||v_i||_a ||u~_j||_a)
/// (ties: smaller index).
Selection select_eigenpairs(const BorderedEigen& pairs, const BorderedSystem& sys, std::size_t m);

/// P u_H + sum_j xi_j u~_j, a-normalized with the sign convention applied.
Vector reassemble_fine(std::span<const double> u_coarse, std::span<const double> xi, const SparseMatrix& transfer,
                       std::span<const Vector> u_tilde, const SparseMatrix& a);

/// One augmented subspace iteration. Returns the new state; the input state
/// and the context are untouched, also when a stage throws.
EigenState aug_subspace_step(const AugContext& ctx, const EigenState& state, double theta, int level = 1);

}  // namespace ifeig
