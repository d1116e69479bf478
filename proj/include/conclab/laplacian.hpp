#pragma once

#include "conclab/grid_function.hpp"

#include <span>
#include <vector>

namespace conclab {

/// Sum of the pair mean differences over all ordered pairs i != j. Acts on
/// the degree-d part of a function as multiplication by d(d-1).
GridFunction laplace(const GridFunction& f);

/// Sum over i of the single-coordinate mean differences; multiplies the
/// degree-d part by d.
GridFunction degree_op(const GridFunction& f);

/// k-fold composition of degree_op: multiplies degree d by d^k.
GridFunction degree_op_power(const GridFunction& f, int k);

/// Sum of the composed mean differences over all k-tuples of pairwise
/// distinct coordinates; multiplies degree d by the falling factorial
/// d(d-1)...(d-k+1), so degrees below k are annihilated. Evaluated through
/// the falling-factorial polynomial in degree_op.
GridFunction falling_degree_op(const GridFunction& f, int k);

/// Relabel coordinates: result(x) = f(x_{perm^-1(0)}, ..., x_{perm^-1(n-1)}).
/// All factor sizes must agree along each orbit; we require identical
/// factors, which the invariance check needs anyway.
GridFunction permute_coordinates(const GridFunction& f, std::span<const int> perm);

/// sup |laplace(f o pi) - laplace(f) o pi| for i.i.d. factors.
double permutation_invariance_residual(const GridFunction& f, std::span<const int> perm);

struct SpectralReport {
    struct Entry {
        int degree = 0;
        double eigenvalue = 0.0;  // d(d-1)
        double rayleigh = 0.0;    // E[f_d laplace(f_d)] / E[f_d^2]
        double residual_sup = 0.0;
        double norm2 = 0.0;
    };
    std::vector<Entry> entries;
    /// max over degrees of residual_sup / max(1, sup|f_d|)
    double max_relative_residual = 0.0;
};

SpectralReport spectral_report(const GridFunction& f);

}  // namespace conclab
