#pragma once

#include "conclab/product_space.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace conclab {

/// One Fourier-Walsh term: the coefficient of prod_{i in mask} x_i.
/// Bit i of the mask corresponds to coordinate i.
struct WalshTerm {
    std::uint64_t mask = 0;
    double coef = 0.0;
};

/// A real-valued function on a finite product space. Either a dense table
/// (one value per state, mixed-radix order) or a sparse Walsh expansion
/// (uniform cube only). Immutable after construction.
class GridFunction {
public:
    static GridFunction dense(SpacePtr space, Eigen::ArrayXd values);
    static GridFunction constant(SpacePtr space, double value);
    /// The coordinate map x -> x_i (atom values), dense.
    static GridFunction coordinate(SpacePtr space, int i);
    /// Sparse Walsh form on a uniform cube; terms are deduplicated/validated.
    static GridFunction walsh(SpacePtr space, std::vector<WalshTerm> terms);

    bool is_dense() const { return dense_; }
    bool is_walsh() const { return !dense_; }

    const Eigen::ArrayXd& values() const;
    const std::vector<WalshTerm>& walsh_terms() const;

    const ProductSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }

    /// Point evaluation by state index (works for both representations).
    double operator()(Index state) const;

    /// Exact sup norm for dense functions; for Walsh forms the coefficient
    /// l1 norm, which dominates the true sup.
    double sup_norm_bound() const;

private:
    GridFunction(SpacePtr space, Eigen::ArrayXd values);
    GridFunction(SpacePtr space, std::vector<WalshTerm> terms);

    SpacePtr space_;
    bool dense_ = true;
    Eigen::ArrayXd values_;
    std::vector<WalshTerm> walsh_;
};

GridFunction operator+(const GridFunction& f, const GridFunction& g);
GridFunction operator-(const GridFunction& f, const GridFunction& g);
GridFunction operator*(double scale, const GridFunction& f);

void require_same_space(const GridFunction& f, const GridFunction& g);
void require_dense(const GridFunction& f, const char* what);

/// Exact integral of f against the product measure (pairwise tree sum).
/// For Walsh forms this is the empty-set coefficient.
double expectation(const GridFunction& f);

/// Weighted pairwise-tree integral of an arbitrary dense table against the
/// space's product weights. Rejects non-finite integrands.
double weighted_mean(const ProductSpace& space, const Eigen::ArrayXd& integrand);

/// E_i f: integrate out coordinate i. The result is constant along i.
GridFunction partial_expectation(const GridFunction& f, int i);

double variance(const GridFunction& f);

/// Ent(g) = E[g log g] - E[g] log E[g] for g >= 0, with 0 log 0 = 0.
double entropy(const GridFunction& g);

}  // namespace conclab
