#include "conclab/laplacian.hpp"

#include "conclab/diffops.hpp"
#include "conclab/hoeffding.hpp"
#include "conclab/walsh.hpp"

#include <algorithm>
#include <stdexcept>

namespace conclab {

GridFunction laplace(const GridFunction& f) {
    require_dense(f, "laplace");
    const int n = f.space().dimension();
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.space().total_states());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) acc += 2.0 * mean_diff_pair(f, i, j).values();
    return GridFunction::dense(f.space_ptr(), std::move(acc));
}

GridFunction degree_op(const GridFunction& f) {
    require_dense(f, "degree_op");
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.space().total_states());
    for (int i = 0; i < f.space().dimension(); ++i) acc += mean_diff(f, i).values();
    return GridFunction::dense(f.space_ptr(), std::move(acc));
}

GridFunction degree_op_power(const GridFunction& f, int k) {
    if (k < 1) throw std::invalid_argument("degree_op_power: order must be >= 1");
    GridFunction g = degree_op(f);
    for (int r = 1; r < k; ++r) g = degree_op(g);
    return g;
}

GridFunction falling_degree_op(const GridFunction& f, int k) {
    if (k < 1 || k > f.space().dimension())
        throw std::invalid_argument("falling_degree_op: order out of range");
    GridFunction g = f;
    for (int j = 0; j < k; ++j) {
        GridFunction lg = degree_op(g);
        g = GridFunction::dense(f.space_ptr(), lg.values() - static_cast<double>(j) * g.values());
    }
    return g;
}

GridFunction permute_coordinates(const GridFunction& f, std::span<const int> perm) {
    require_dense(f, "permute_coordinates");
    const ProductSpace& sp = f.space();
    const int n = sp.dimension();
    if (static_cast<int>(perm.size()) != n)
        throw std::invalid_argument("permute_coordinates: permutation length mismatch");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
            throw std::invalid_argument("permute_coordinates: not a permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }
    if (!sp.all_factors_identical())
        throw std::invalid_argument("permute_coordinates: factors must be identical");
    // result(x) reads f at y with y_{perm[i]} = x_i.
    Eigen::ArrayXd out(sp.total_states());
    std::vector<int> xdig(static_cast<std::size_t>(n)), ydig(static_cast<std::size_t>(n));
    for (Index s = 0; s < sp.total_states(); ++s) {
        Index rem = s;
        for (int i = 0; i < n; ++i) {
            xdig[static_cast<std::size_t>(i)] = static_cast<int>(rem % sp.factor(i).size());
            rem /= sp.factor(i).size();
        }
        for (int i = 0; i < n; ++i)
            ydig[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
                xdig[static_cast<std::size_t>(i)];
        out[s] = f.values()[sp.encode(ydig)];
    }
    return GridFunction::dense(f.space_ptr(), std::move(out));
}

double permutation_invariance_residual(const GridFunction& f, std::span<const int> perm) {
    if (!f.space().all_factors_identical())
        throw std::invalid_argument("permutation_invariance_residual: factors must be identical");
    GridFunction lhs = laplace(permute_coordinates(f, perm));
    GridFunction rhs = permute_coordinates(laplace(f), perm);
    return (lhs.values() - rhs.values()).abs().maxCoeff();
}

SpectralReport spectral_report(const GridFunction& f) {
    GridFunction dense_f = f.is_walsh() ? from_walsh(f) : f;
    HoeffdingDecomposition dec = decompose(dense_f);
    SpectralReport report;
    for (int d = 0; d <= dense_f.space().dimension(); ++d) {
        if (dec.degree_norm2(d) <= 0.0) continue;
        GridFunction part = dec.degree_part(d);
        if (part.is_walsh()) part = from_walsh(part);
        GridFunction lap = laplace(part);
        const double eig = static_cast<double>(d) * (d - 1);
        SpectralReport::Entry e;
        e.degree = d;
        e.eigenvalue = eig;
        e.norm2 = weighted_mean(part.space(), part.values().square());
        e.rayleigh = e.norm2 > 0.0
                         ? weighted_mean(part.space(), part.values() * lap.values()) / e.norm2
                         : 0.0;
        e.residual_sup = (lap.values() - eig * part.values()).abs().maxCoeff();
        const double scale = std::max(1.0, part.values().abs().maxCoeff());
        report.max_relative_residual = std::max(report.max_relative_residual, e.residual_sup / scale);
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace conclab
