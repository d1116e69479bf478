#pragma once

#include "conclab/grid_function.hpp"

#include <cstdint>
#include <vector>

namespace conclab {

/// The unique expansion f = sum_S h_S over coordinate subsets S, where each
/// h_S depends only on the coordinates in S and integrates to zero against
/// every one of its own coordinates. On a uniform cube the terms are Walsh
/// monomials and only their coefficients are stored; otherwise each term is
/// tabulated over the reduced grid of its own coordinates (ascending
/// coordinate order, lowest index least significant).
class HoeffdingDecomposition {
public:
    struct Term {
        std::uint64_t mask = 0;
        Eigen::ArrayXd values;  // reduced-grid table; empty in coefficient form
        double coef = 0.0;      // Walsh coefficient (coefficient form only)
        double norm2 = 0.0;     // E[h_S^2]
    };

    HoeffdingDecomposition(SpacePtr space, std::vector<Term> terms, bool coefficient_form);

    const ProductSpace& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    bool coefficient_form() const { return coefficient_form_; }
    const std::vector<Term>& terms() const { return terms_; }

    /// Dense materialization of h_S (zero function if the term was dropped).
    GridFunction term_function(std::uint64_t mask) const;
    /// f_d = sum of the terms with |S| = d. Dense for table form; sparse
    /// Walsh for coefficient form (so it also works beyond the dense cap).
    GridFunction degree_part(int d) const;
    /// Sum of every stored term.
    GridFunction reconstruct() const;

    int max_degree() const;
    double degree_norm2(int d) const;
    /// Smallest degree whose term mass exceeds rel_tol^2 * E[f^2]; -1 if all
    /// degrees are negligible.
    int lowest_degree(double rel_tol = 1e-9) const;

private:
    SpacePtr space_;
    std::vector<Term> terms_;  // sorted by mask
    bool coefficient_form_ = false;
};

enum class DecomposeMethod { Auto, Generic, WalshFastPath };

/// Full decomposition. Auto picks the Walsh fast path on uniform cubes and
/// the generic operator iteration elsewhere. Terms with sup norm below
/// 1e-12 * sup|f| are dropped.
HoeffdingDecomposition decompose(const GridFunction& f,
                                 DecomposeMethod method = DecomposeMethod::Auto);

/// f_d without keeping the rest of the decomposition.
GridFunction project_degree(const GridFunction& f, int d);

/// E f as a constant function.
GridFunction degree_zero_part(const GridFunction& f);
/// f_1: the sum over i of the centered one-coordinate marginals.
GridFunction first_order_part(const GridFunction& f);
/// f - f_0 - f_1, the projection onto degrees >= 2.
GridFunction remainder(const GridFunction& f);

}  // namespace conclab
