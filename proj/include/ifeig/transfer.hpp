#pragma once

#include "ifeig/fem.hpp"
#include "ifeig/locate.hpp"

namespace ifeig {

/// Nonnested nodal interpolation from a coarse P1 space into a fine one:
/// P(f, c) is the coarse basis function of dof c evaluated at fine dof f.
struct TransferMatrix {
  SparseMatrix p;                 // n_fine_dof x n_coarse_dof
  std::size_t snapped_rows = 0;   // fine nodes located outside the coarse mesh
};

TransferMatrix build_transfer(const FeSpace& coarse, const FeSpace& fine);
TransferMatrix build_transfer(const FeSpace& coarse, const PointLocator& coarse_locator, const FeSpace& fine);

}  // namespace ifeig
