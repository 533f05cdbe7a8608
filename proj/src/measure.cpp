#include "ifeig/measure.hpp"

#include <algorithm>
#include <cmath>

#include "ifeig/error.hpp"
#include "ifeig/fem.hpp"

namespace ifeig {

Clusters resolve_clusters(std::span<const double> reference_values, const Clusters& configured, std::size_t m) {
  std::vector<int> owner(m, -1);
  Clusters out;
  for (const auto& cl : configured) {
    std::vector<int> kept;
    for (int i : cl)
      if (i >= 0 && static_cast<std::size_t>(i) < m && owner[static_cast<std::size_t>(i)] < 0) kept.push_back(i);
    if (kept.empty()) continue;
    for (int i : kept) owner[static_cast<std::size_t>(i)] = static_cast<int>(out.size());
    out.push_back(std::move(kept));
  }
  std::size_t i = 0;
  while (i < m) {
    if (owner[i] >= 0) {
      ++i;
      continue;
    }
    std::vector<int> run{static_cast<int>(i)};
    std::size_t j = i + 1;
    while (j < m && j < reference_values.size() && owner[j] < 0 &&
           std::abs(reference_values[j] - reference_values[j - 1]) <
               kClusterRelGap * std::abs(reference_values[j])) {
      run.push_back(static_cast<int>(j));
      ++j;
    }
    for (int k : run) owner[static_cast<std::size_t>(k)] = static_cast<int>(out.size());
    out.push_back(std::move(run));
    i = j;
  }
  std::sort(out.begin(), out.end());
  return out;
}

ErrorReport measure_errors(std::span<const double> lambdas, std::span<const Vector> vectors,
                           const EigenPairs& reference, const Clusters& clusters, const SparseMatrix& a) {
  const std::size_t m = lambdas.size();
  if (vectors.size() != m || reference.values.size() < m || reference.vectors.size() < m)
    throw PreconditionError("measure_errors: reference has fewer pairs than slots");
  for (const auto& v : vectors)
    if (v.size() != a.rows()) throw PreconditionError("measure_errors: dimension mismatch");

  std::vector<const std::vector<int>*> cluster_of(m, nullptr);
  for (const auto& cl : clusters)
    for (int i : cl)
      if (i >= 0 && static_cast<std::size_t>(i) < m) cluster_of[static_cast<std::size_t>(i)] = &cl;

  ErrorReport out;
  for (std::size_t s = 0; s < m; ++s) {
    const Vector& u = vectors[s];
    out.lambda.push_back(std::abs(lambdas[s] - reference.values[s]));
    const auto* cl = cluster_of[s];
    if (cl && cl->size() > 1) {
      const Vector au = spmv(a, u);
      Vector r = u;
      for (int j : *cl) {
        const Vector& ub = reference.vectors[static_cast<std::size_t>(j)];
        axpy(-dot(ub, au), ub, r);
      }
      out.anorm.push_back(energy_norm(a, r));
    } else {
      const Vector& ub = reference.vectors[s];
      Vector minus = u, plus = u;
      axpy(-1.0, ub, minus);
      axpy(1.0, ub, plus);
      out.anorm.push_back(std::min(energy_norm(a, minus), energy_norm(a, plus)));
    }
  }
  return out;
}

ErrorReport measure_errors(const EigenState& state, const EigenPairs& reference, const Clusters& clusters,
                           const SparseMatrix& a) {
  return measure_errors(state.lambdas, state.vectors, reference, clusters, a);
}

}  // namespace ifeig
