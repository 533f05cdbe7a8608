#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ifeig/dense.hpp"
#include "ifeig/error.hpp"
#include "ifeig/pcg.hpp"
#include "ifeig/sparse.hpp"

namespace ifeig {

// Eigenvalues ascending; column k of `vectors` belongs to values[k].
struct DenseEigen {
  std::vector<double> values;
  DenseMatrix vectors;
};

// Lower-triangular L with B = L L^T. Throws NumericalError("mass block not SPD").
DenseMatrix cholesky(const DenseMatrix& b);

/// Cyclic Jacobi rotations for a dense symmetric matrix. Orthonormal vectors.
DenseEigen jacobi_eigen(DenseMatrix a);

/// A v = lambda B v for symmetric A and SPD B, via Cholesky reduction to a
/// standard problem solved by jacobi_eigen. Vectors are B-orthonormal.
DenseEigen dense_sym_gen_eig(const DenseMatrix& a, const DenseMatrix& b);

struct ReferenceOptions {
  double tol = 1e-11;           // absolute change in each tracked eigenvalue per sweep
  double residual_tol = 1e-9;   // ||A u - lambda B u||_2 / (lambda ||B u||_2)
  int guard = 5;                // extra block columns beyond nev
  int max_sweeps = 400;
  double inner_theta = 1e-4;    // PCG contraction per inverse-iteration solve
  Preconditioner precond = Preconditioner::ssor;
  std::uint64_t seed = 1;
};

// Eigenpairs with a-normalized (u^T A u = 1), sign-fixed vectors.
struct EigenPairs {
  std::vector<double> values;
  std::vector<Vector> vectors;
  int sweeps = 0;
};

struct NonConvergenceError : NumericalError {
  NonConvergenceError(const std::string& what, EigenPairs best)
      : NumericalError(what), best_iterates(std::move(best)) {}
  EigenPairs best_iterates;
};

/// Smallest nev eigenpairs of the sparse pencil (A, B) by block inverse
/// subspace iteration with Rayleigh-Ritz per sweep. `initial` (n x p), when
/// given, replaces the seeded random start block.
EigenPairs reference_eigensolve(const SparseMatrix& a, const SparseMatrix& b, int nev,
                                const ReferenceOptions& opts = {},
                                const std::optional<DenseMatrix>& initial = std::nullopt);

}  // namespace ifeig
