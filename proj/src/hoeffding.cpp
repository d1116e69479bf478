#include "conclab/hoeffding.hpp"

#include "conclab/reduction.hpp"
#include "conclab/walsh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace conclab {

namespace {

constexpr double kTermDropTol = 1e-12;  // relative to sup|f|

int popcount(std::uint64_t m) { return std::popcount(m); }

// Strides of the mask's coordinates inside the reduced grid (ascending
// coordinate order, lowest index least significant).
std::vector<Index> reduced_strides(const ProductSpace& sp, std::uint64_t mask) {
    std::vector<Index> strides;
    Index acc = 1;
    for (int i = 0; i < sp.dimension(); ++i) {
        if (mask & (std::uint64_t{1} << i)) {
            strides.push_back(acc);
            acc *= sp.factor(i).size();
        } else {
            strides.push_back(0);
        }
    }
    return strides;
}


// E_i on a reduced-grid table whose active coordinate set is `active`.
Eigen::ArrayXd contract_reduced(const ProductSpace& sp, std::uint64_t active,
                                const Eigen::ArrayXd& v, int i) {
    Index stride = 1;
    for (int k = 0; k < i; ++k)
        if (active & (std::uint64_t{1} << k)) stride *= sp.factor(k).size();
    const Factor& fac = sp.factor(i);
    const Index block = stride * fac.size();
    Eigen::ArrayXd out(v.size() / fac.size());
    Index opos = 0;
    for (Index base = 0; base < v.size(); base += block) {
        for (Index low = 0; low < stride; ++low) {
            double m = 0.0;
            for (int d = 0; d < fac.size(); ++d) m += fac.prob(d) * v[base + low + d * stride];
            out[opos + low] = m;
        }
        opos += stride;
    }
    return out;
}

// v minus its coordinate-i mean, broadcast back over digit i.
Eigen::ArrayXd subtract_mean_reduced(const ProductSpace& sp, std::uint64_t active,
                                     const Eigen::ArrayXd& v, const Eigen::ArrayXd& mean, int i) {
    Index stride = 1;
    for (int k = 0; k < i; ++k)
        if (active & (std::uint64_t{1} << k)) stride *= sp.factor(k).size();
    const Factor& fac = sp.factor(i);
    const Index block = stride * fac.size();
    Eigen::ArrayXd out(v.size());
    Index mpos = 0;
    for (Index base = 0; base < v.size(); base += block) {
        for (Index low = 0; low < stride; ++low)
            for (int d = 0; d < fac.size(); ++d)
                out[base + low + d * stride] = v[base + low + d * stride] - mean[mpos + low];
        mpos += stride;
    }
    return out;
}

double reduced_norm2(const ProductSpace& sp, std::uint64_t mask, const Eigen::ArrayXd& v) {
    Eigen::ArrayXd w(1);
    w[0] = 1.0;
    for (int i = 0; i < sp.dimension(); ++i) {
        if (!(mask & (std::uint64_t{1} << i))) continue;
        const Factor& f = sp.factor(i);
        Eigen::ArrayXd next(w.size() * f.size());
        for (int d = 0; d < f.size(); ++d) next.segment(d * w.size(), w.size()) = w * f.prob(d);
        w.swap(next);
    }
    return pairwise_sum(Eigen::ArrayXd(w * v.square()));
}

struct TableBuilder {
    const ProductSpace& sp;
    double drop_tol;
    std::vector<HoeffdingDecomposition::Term> terms;

    void walk(int level, std::uint64_t active, std::uint64_t chosen, Eigen::ArrayXd v) {
        if (level == sp.dimension()) {
            if (v.abs().maxCoeff() <= drop_tol) return;
            HoeffdingDecomposition::Term t;
            t.mask = chosen;
            t.norm2 = reduced_norm2(sp, chosen, v);
            t.values = std::move(v);
            terms.push_back(std::move(t));
            return;
        }
        Eigen::ArrayXd mean = contract_reduced(sp, active, v, level);
        Eigen::ArrayXd centered = subtract_mean_reduced(sp, active, v, mean, level);
        walk(level + 1, active & ~(std::uint64_t{1} << level), chosen, std::move(mean));
        walk(level + 1, active, chosen | (std::uint64_t{1} << level), std::move(centered));
    }
};

}  // namespace

HoeffdingDecomposition::HoeffdingDecomposition(SpacePtr space, std::vector<Term> terms,
                                               bool coefficient_form)
    : space_(std::move(space)), terms_(std::move(terms)), coefficient_form_(coefficient_form) {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return a.mask < b.mask; });
}

GridFunction HoeffdingDecomposition::term_function(std::uint64_t mask) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const Term& t, std::uint64_t m) { return t.mask < m; });
    if (it == terms_.end() || it->mask != mask) return GridFunction::constant(space_, 0.0);
    if (coefficient_form_)
        return from_walsh(GridFunction::walsh(space_, {WalshTerm{mask, it->coef}}));
    const std::vector<Index> rstrides = reduced_strides(*space_, mask);
    Eigen::ArrayXd out(space_->total_states());
    for (Index s = 0; s < space_->total_states(); ++s) {
        Index red = 0;
        std::uint64_t m = mask;
        while (m != 0) {
            const int i = std::countr_zero(m);
            m &= m - 1;
            red += rstrides[static_cast<std::size_t>(i)] * space_->digit(s, i);
        }
        out[s] = it->values[red];
    }
    return GridFunction::dense(space_, std::move(out));
}

GridFunction HoeffdingDecomposition::degree_part(int d) const {
    if (d < 0 || d > space_->dimension())
        throw std::invalid_argument("degree_part: degree out of range");
    if (coefficient_form_) {
        std::vector<WalshTerm> keep;
        for (const Term& t : terms_)
            if (popcount(t.mask) == d) keep.push_back({t.mask, t.coef});
        return GridFunction::walsh(space_, std::move(keep));
    }
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(space_->total_states());
    for (const Term& t : terms_)
        if (popcount(t.mask) == d) acc += term_function(t.mask).values();
    return GridFunction::dense(space_, std::move(acc));
}

GridFunction HoeffdingDecomposition::reconstruct() const {
    if (coefficient_form_) {
        std::vector<WalshTerm> all;
        all.reserve(terms_.size());
        for (const Term& t : terms_) all.push_back({t.mask, t.coef});
        return GridFunction::walsh(space_, std::move(all));
    }
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(space_->total_states());
    for (const Term& t : terms_) acc += term_function(t.mask).values();
    return GridFunction::dense(space_, std::move(acc));
}

int HoeffdingDecomposition::max_degree() const {
    int deg = 0;
    for (const Term& t : terms_) deg = std::max(deg, popcount(t.mask));
    return deg;
}

double HoeffdingDecomposition::degree_norm2(int d) const {
    // Terms of one degree are pairwise orthogonal, so masses add.
    double acc = 0.0;
    for (const Term& t : terms_)
        if (popcount(t.mask) == d) acc += t.norm2;
    return acc;
}

int HoeffdingDecomposition::lowest_degree(double rel_tol) const {
    double total = 0.0;
    for (const Term& t : terms_) total += t.norm2;
    const double floor = rel_tol * rel_tol * std::max(1.0, total);
    for (int d = 0; d <= space_->dimension(); ++d)
        if (degree_norm2(d) > floor) return d;
    return -1;
}

HoeffdingDecomposition decompose(const GridFunction& f, DecomposeMethod method) {
    const SpacePtr& sp = f.space_ptr();
    const bool want_walsh =
        method == DecomposeMethod::WalshFastPath ||
        (method == DecomposeMethod::Auto && sp->is_uniform_cube());
    if (want_walsh) {
        if (!sp->is_uniform_cube())
            throw std::invalid_argument("decompose: Walsh fast path requires a uniform cube");
        GridFunction coeffs =
            f.is_walsh() ? f : to_walsh(f, kTermDropTol * std::max(0.0, f.sup_norm_bound()));
        std::vector<HoeffdingDecomposition::Term> terms;
        terms.reserve(coeffs.walsh_terms().size());
        for (const WalshTerm& w : coeffs.walsh_terms()) {
            HoeffdingDecomposition::Term t;
            t.mask = w.mask;
            t.coef = w.coef;
            t.norm2 = w.coef * w.coef;
            terms.push_back(std::move(t));
        }
        return HoeffdingDecomposition(sp, std::move(terms), true);
    }
    require_dense(f, "decompose");
    Index cost = 1;
    for (const Factor& fac : sp->factors()) {
        if (cost > (Index{1} << 27) / (fac.size() + 1))
            throw std::invalid_argument("decompose: generic path too large for this space");
        cost *= fac.size() + 1;
    }
    if (!f.values().isFinite().all()) throw std::invalid_argument("decompose: non-finite value");
    std::uint64_t all = sp->dimension() >= 64 ? ~std::uint64_t{0}
                                              : (std::uint64_t{1} << sp->dimension()) - 1;
    TableBuilder builder{*sp, kTermDropTol * f.values().abs().maxCoeff(), {}};
    builder.walk(0, all, 0, f.values());
    return HoeffdingDecomposition(sp, std::move(builder.terms), false);
}

GridFunction project_degree(const GridFunction& f, int d) {
    if (d < 0 || d > f.space().dimension())
        throw std::invalid_argument("project_degree: degree out of range");
    return decompose(f).degree_part(d);
}

GridFunction degree_zero_part(const GridFunction& f) {
    return GridFunction::constant(f.space_ptr(), expectation(f));
}

GridFunction first_order_part(const GridFunction& f) {
    require_dense(f, "first_order_part");
    const int n = f.space().dimension();
    const double mean = expectation(f);
    Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(f.space().total_states(), 0.0);
    for (int i = 0; i < n; ++i) {
        GridFunction g = f;
        for (int j = 0; j < n; ++j)
            if (j != i) g = partial_expectation(g, j);
        acc += g.values() - mean;
    }
    return GridFunction::dense(f.space_ptr(), std::move(acc));
}

GridFunction remainder(const GridFunction& f) {
    require_dense(f, "remainder");
    const double mean = expectation(f);
    GridFunction f1 = first_order_part(f);
    return GridFunction::dense(f.space_ptr(), f.values() - mean - f1.values());
}

}  // namespace conclab
