#pragma once

#include "conclab/grid_function.hpp"

#include <vector>

namespace conclab {

/// The three first-order difference gradients:
///   MeanDiff   f - E_i f                                  (signed)
///   L2         sqrt(1/2 ((f - E_i f)^2 + E_i (f - E_i f)^2))   (>= 0)
///   L2Pos      same L2 average over an independent resample,
///              but of the positive part of the difference  (>= 0)
enum class GradientKind { MeanDiff, L2, L2Pos };

enum class HessianKind { MeanDiff2, L2Pair };

GridFunction mean_diff(const GridFunction& f, int i);
GridFunction l2_diff(const GridFunction& f, int i);
GridFunction l2_diff_pos(const GridFunction& f, int i);

/// Iterated mean difference along two coordinates (symmetric in i, j).
GridFunction mean_diff_pair(const GridFunction& f, int i, int j);
/// Second-order L2 difference over independent resamples of both coordinates.
GridFunction l2_diff_pair(const GridFunction& f, int i, int j);

/// Per-coordinate field of one gradient kind.
class GradientField {
public:
    GradientField(GradientKind kind, std::vector<GridFunction> components);

    GradientKind kind() const { return kind_; }
    int dimension() const { return static_cast<int>(components_.size()); }
    const GridFunction& component(int i) const;
    /// Pointwise Euclidean norm over the components.
    GridFunction euclidean_norm() const;

private:
    GradientKind kind_;
    std::vector<GridFunction> components_;
};

GradientField gradient(const GridFunction& f, GradientKind kind);

/// Pointwise |grad f| without materializing the field.
GridFunction gradient_norm(const GridFunction& f, GradientKind kind);

/// n x n field of pair differences with zero diagonal; only the upper
/// triangle is stored (both kinds are symmetric).
class HessianField {
public:
    HessianField(HessianKind kind, SpacePtr space, std::vector<GridFunction> upper);

    HessianKind kind() const { return kind_; }
    int dimension() const { return n_; }
    /// entry(i, i) is the zero function by definition.
    const GridFunction& entry(int i, int j) const;
    /// Pointwise Hilbert-Schmidt norm, sqrt(sum_{i != j} entry(i,j)^2).
    GridFunction hs_norm() const;

private:
    HessianKind kind_;
    int n_;
    std::vector<GridFunction> upper_;  // (i, j), i < j, row-major
    GridFunction zero_;
};

HessianField hessian_mean_diff(const GridFunction& f);
HessianField hessian_l2(const GridFunction& f);

/// Pointwise HS norm of the requested Hessian without storing the field.
GridFunction hessian_hs_norm(const GridFunction& f, HessianKind kind);

/// |d|d f||: the L2 gradient norm applied to the scalar field |d f|.
GridFunction iterated_l2(const GridFunction& f);
/// Same with the positive-part operator in both stages.
GridFunction iterated_l2_pos(const GridFunction& f);

}  // namespace conclab
