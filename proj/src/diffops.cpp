#include "conclab/diffops.hpp"

#include "conclab/reduction.hpp"

#include <cmath>
#include <stdexcept>

namespace conclab {

namespace {

void check_coordinate(const GridFunction& f, int i, const char* what) {
    require_dense(f, what);
    if (i < 0 || i >= f.space().dimension())
        throw std::invalid_argument(std::string(what) + ": coordinate out of range");
}

// Radicands here are sums of squares; anything below -1e-15 would mean a
// real defect, smaller negatives are rounding and clamp to zero.
Eigen::ArrayXd sqrt_clamped(Eigen::ArrayXd radicand) {
    if ((radicand < -1e-15).any())
        throw std::logic_error("difference operator: radicand below the rounding floor");
    return radicand.max(0.0).sqrt();
}

// E_i applied to a raw table.
Eigen::ArrayXd contract(const ProductSpace& sp, const Eigen::ArrayXd& v, int i) {
    const Factor& fac = sp.factor(i);
    const Index stride = sp.stride(i);
    const Index block = stride * fac.size();
    Eigen::ArrayXd out(v.size());
    for (Index base = 0; base < v.size(); base += block) {
        for (Index low = 0; low < stride; ++low) {
            double m = 0.0;
            for (int d = 0; d < fac.size(); ++d) m += fac.prob(d) * v[base + low + d * stride];
            for (int d = 0; d < fac.size(); ++d) out[base + low + d * stride] = m;
        }
    }
    return out;
}

Eigen::ArrayXd mean_diff_values(const ProductSpace& sp, const Eigen::ArrayXd& v, int i) {
    return v - contract(sp, v, i);
}

Eigen::ArrayXd l2_diff_values(const ProductSpace& sp, const Eigen::ArrayXd& v, int i) {
    Eigen::ArrayXd diff = mean_diff_values(sp, v, i);
    Eigen::ArrayXd diff_sq = diff.square();
    return sqrt_clamped(0.5 * (diff_sq + contract(sp, diff_sq, i)));
}

Eigen::ArrayXd l2_diff_pos_values(const ProductSpace& sp, const Eigen::ArrayXd& v, int i) {
    const Factor& fac = sp.factor(i);
    const Index stride = sp.stride(i);
    const Index block = stride * fac.size();
    Eigen::ArrayXd out(v.size());
    for (Index base = 0; base < v.size(); base += block) {
        for (Index low = 0; low < stride; ++low) {
            for (int d = 0; d < fac.size(); ++d) {
                const double here = v[base + low + d * stride];
                double acc = 0.0;
                for (int e = 0; e < fac.size(); ++e) {
                    const double gap = here - v[base + low + e * stride];
                    if (gap > 0.0) acc += fac.prob(e) * gap * gap;
                }
                out[base + low + d * stride] = std::sqrt(0.5 * acc);  // acc >= 0 termwise
            }
        }
    }
    return out;
}

Eigen::ArrayXd pair_values(const ProductSpace& sp, const Eigen::ArrayXd& v, int i, int j) {
    return mean_diff_values(sp, mean_diff_values(sp, v, j), i);
}

Eigen::ArrayXd l2_pair_values(const ProductSpace& sp, const Eigen::ArrayXd& v, int i, int j) {
    Eigen::ArrayXd pair_sq = pair_values(sp, v, i, j).square();
    Eigen::ArrayXd ei = contract(sp, pair_sq, i);
    Eigen::ArrayXd ej = contract(sp, pair_sq, j);
    Eigen::ArrayXd eij = contract(sp, ei, j);
    return sqrt_clamped(0.25 * (pair_sq + ei + ej + eij));
}

void check_pair(const GridFunction& f, int i, int j, const char* what) {
    check_coordinate(f, i, what);
    check_coordinate(f, j, what);
    if (i == j) throw std::invalid_argument(std::string(what) + ": coordinates must differ");
}

}  // namespace

GridFunction mean_diff(const GridFunction& f, int i) {
    check_coordinate(f, i, "mean_diff");
    return GridFunction::dense(f.space_ptr(), mean_diff_values(f.space(), f.values(), i));
}

GridFunction l2_diff(const GridFunction& f, int i) {
    check_coordinate(f, i, "l2_diff");
    return GridFunction::dense(f.space_ptr(), l2_diff_values(f.space(), f.values(), i));
}

GridFunction l2_diff_pos(const GridFunction& f, int i) {
    check_coordinate(f, i, "l2_diff_pos");
    return GridFunction::dense(f.space_ptr(), l2_diff_pos_values(f.space(), f.values(), i));
}

GridFunction mean_diff_pair(const GridFunction& f, int i, int j) {
    check_pair(f, i, j, "mean_diff_pair");
    return GridFunction::dense(f.space_ptr(), pair_values(f.space(), f.values(), i, j));
}

GridFunction l2_diff_pair(const GridFunction& f, int i, int j) {
    check_pair(f, i, j, "l2_diff_pair");
    return GridFunction::dense(f.space_ptr(), l2_pair_values(f.space(), f.values(), i, j));
}

GradientField::GradientField(GradientKind kind, std::vector<GridFunction> components)
    : kind_(kind), components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("GradientField: empty");
}

const GridFunction& GradientField::component(int i) const {
    if (i < 0 || i >= dimension()) throw std::invalid_argument("GradientField: index out of range");
    return components_[static_cast<std::size_t>(i)];
}

GridFunction GradientField::euclidean_norm() const {
    Eigen::ArrayXd acc = components_[0].values().square();
    for (int i = 1; i < dimension(); ++i) acc += component(i).values().square();
    return GridFunction::dense(components_[0].space_ptr(), acc.sqrt());
}

GradientField gradient(const GridFunction& f, GradientKind kind) {
    require_dense(f, "gradient");
    std::vector<GridFunction> comps;
    comps.reserve(static_cast<std::size_t>(f.space().dimension()));
    for (int i = 0; i < f.space().dimension(); ++i) {
        switch (kind) {
            case GradientKind::MeanDiff: comps.push_back(mean_diff(f, i)); break;
            case GradientKind::L2: comps.push_back(l2_diff(f, i)); break;
            case GradientKind::L2Pos: comps.push_back(l2_diff_pos(f, i)); break;
        }
    }
    return GradientField(kind, std::move(comps));
}

GridFunction gradient_norm(const GridFunction& f, GradientKind kind) {
    require_dense(f, "gradient_norm");
    const ProductSpace& sp = f.space();
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(sp.total_states());
    for (int i = 0; i < sp.dimension(); ++i) {
        switch (kind) {
            case GradientKind::MeanDiff: acc += mean_diff_values(sp, f.values(), i).square(); break;
            case GradientKind::L2: acc += l2_diff_values(sp, f.values(), i).square(); break;
            case GradientKind::L2Pos: acc += l2_diff_pos_values(sp, f.values(), i).square(); break;
        }
    }
    return GridFunction::dense(f.space_ptr(), acc.sqrt());
}

HessianField::HessianField(HessianKind kind, SpacePtr space, std::vector<GridFunction> upper)
    : kind_(kind),
      n_(space->dimension()),
      upper_(std::move(upper)),
      zero_(GridFunction::constant(space, 0.0)) {
    if (static_cast<int>(upper_.size()) != n_ * (n_ - 1) / 2)
        throw std::invalid_argument("HessianField: wrong number of entries");
}

const GridFunction& HessianField::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::invalid_argument("HessianField: index out of range");
    if (i == j) return zero_;
    if (i > j) std::swap(i, j);
    const int idx = i * n_ - i * (i + 1) / 2 + (j - i - 1);
    return upper_[static_cast<std::size_t>(idx)];
}

GridFunction HessianField::hs_norm() const {
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(zero_.values().size());
    for (const GridFunction& e : upper_) acc += e.values().square();
    return GridFunction::dense(zero_.space_ptr(), (2.0 * acc).sqrt());
}

HessianField hessian_mean_diff(const GridFunction& f) {
    require_dense(f, "hessian_mean_diff");
    const int n = f.space().dimension();
    std::vector<GridFunction> upper;
    upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) upper.push_back(mean_diff_pair(f, i, j));
    return HessianField(HessianKind::MeanDiff2, f.space_ptr(), std::move(upper));
}

HessianField hessian_l2(const GridFunction& f) {
    require_dense(f, "hessian_l2");
    const int n = f.space().dimension();
    std::vector<GridFunction> upper;
    upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) upper.push_back(l2_diff_pair(f, i, j));
    return HessianField(HessianKind::L2Pair, f.space_ptr(), std::move(upper));
}

GridFunction hessian_hs_norm(const GridFunction& f, HessianKind kind) {
    require_dense(f, "hessian_hs_norm");
    const ProductSpace& sp = f.space();
    const int n = sp.dimension();
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(sp.total_states());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (kind == HessianKind::MeanDiff2)
                acc += pair_values(sp, f.values(), i, j).square();
            else
                acc += l2_pair_values(sp, f.values(), i, j).square();
        }
    return GridFunction::dense(f.space_ptr(), (2.0 * acc).sqrt());
}

GridFunction iterated_l2(const GridFunction& f) {
    return gradient_norm(gradient_norm(f, GradientKind::L2), GradientKind::L2);
}

GridFunction iterated_l2_pos(const GridFunction& f) {
    return gradient_norm(gradient_norm(f, GradientKind::L2Pos), GradientKind::L2Pos);
}

}  // namespace conclab
