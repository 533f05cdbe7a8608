#pragma once

#include <span>
#include <vector>

#include "ifeig/augsub.hpp"
#include "ifeig/eigen.hpp"
#include "ifeig/examples.hpp"

namespace ifeig {

inline constexpr double kClusterRelGap = 1e-6;

/// Groups slots 0..m-1: configured clusters first (clipped to m), then runs of
/// reference eigenvalues with relative gaps below kClusterRelGap, then singletons.
Clusters resolve_clusters(std::span<const double> reference_values, const Clusters& configured, std::size_t m);

struct ErrorReport {
  std::vector<double> anorm;   // per slot
  std::vector<double> lambda;  // |lambda - reference|, per slot
};

/// A-norm errors against a-normalized reference vectors: distance to the
/// span of the slot's cluster, or min(||u - ub||_A, ||u + ub||_A) for singletons.
ErrorReport measure_errors(std::span<const double> lambdas, std::span<const Vector> vectors,
                           const EigenPairs& reference, const Clusters& clusters, const SparseMatrix& a);
ErrorReport measure_errors(const EigenState& state, const EigenPairs& reference, const Clusters& clusters,
                           const SparseMatrix& a);

}  // namespace ifeig
