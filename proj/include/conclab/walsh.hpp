#pragma once

#include "conclab/grid_function.hpp"

namespace conclab {

/// Exact Walsh-Hadamard analysis on a uniform cube: returns the sparse
/// expansion with coefficients E[f * prod_{i in S} x_i]; coefficients with
/// |coef| <= drop_tol are dropped.
GridFunction to_walsh(const GridFunction& f, double drop_tol = 1e-12);

/// Inverse transform: materialize a sparse Walsh form as a dense table.
GridFunction from_walsh(const GridFunction& f);

namespace detail {
/// In-place butterfly over all coordinates. Forward maps a dense table to
/// coefficients indexed by subset mask; inverse undoes it. The per-factor
/// sign order (which digit carries +1) is taken from the space.
void walsh_butterfly(const ProductSpace& space, Eigen::ArrayXd& v, bool forward);
}  // namespace detail

}  // namespace conclab
