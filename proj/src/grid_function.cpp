#include "conclab/grid_function.hpp"

#include "conclab/reduction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace conclab {

GridFunction::GridFunction(SpacePtr space, Eigen::ArrayXd values)
    : space_(std::move(space)), dense_(true), values_(std::move(values)) {}

GridFunction::GridFunction(SpacePtr space, std::vector<WalshTerm> terms)
    : space_(std::move(space)), dense_(false), walsh_(std::move(terms)) {}

GridFunction GridFunction::dense(SpacePtr space, Eigen::ArrayXd values) {
    if (!space) throw std::invalid_argument("GridFunction: null space");
    if (!space->dense_enumerable())
        throw std::invalid_argument("GridFunction: space exceeds the dense enumeration cap");
    if (values.size() != space->total_states())
        throw std::invalid_argument("GridFunction: table length must equal total_states");
    return GridFunction(std::move(space), std::move(values));
}

GridFunction GridFunction::constant(SpacePtr space, double value) {
    if (!space) throw std::invalid_argument("GridFunction: null space");
    return dense(space, Eigen::ArrayXd::Constant(space->total_states(), value));
}

GridFunction GridFunction::coordinate(SpacePtr space, int i) {
    if (!space) throw std::invalid_argument("GridFunction: null space");
    if (i < 0 || i >= space->dimension())
        throw std::invalid_argument("GridFunction::coordinate: index out of range");
    Eigen::ArrayXd v(space->total_states());
    for (Index s = 0; s < space->total_states(); ++s)
        v[s] = space->factor(i).atom(space->digit(s, i));
    return dense(std::move(space), std::move(v));
}

GridFunction GridFunction::walsh(SpacePtr space, std::vector<WalshTerm> terms) {
    if (!space) throw std::invalid_argument("GridFunction: null space");
    if (!space->is_uniform_cube())
        throw std::invalid_argument("GridFunction: Walsh form requires a uniform cube");
    const int n = space->dimension();
    const std::uint64_t all = n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    std::sort(terms.begin(), terms.end(),
              [](const WalshTerm& a, const WalshTerm& b) { return a.mask < b.mask; });
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if ((terms[k].mask & ~all) != 0)
            throw std::invalid_argument("GridFunction: Walsh subset outside coordinate range");
        if (!std::isfinite(terms[k].coef))
            throw std::invalid_argument("GridFunction: non-finite Walsh coefficient");
        if (k > 0 && terms[k].mask == terms[k - 1].mask)
            throw std::invalid_argument("GridFunction: duplicate Walsh subset");
    }
    return GridFunction(std::move(space), std::move(terms));
}

const Eigen::ArrayXd& GridFunction::values() const {
    if (!dense_) throw std::logic_error("GridFunction: dense values requested from Walsh form");
    return values_;
}

const std::vector<WalshTerm>& GridFunction::walsh_terms() const {
    if (dense_) throw std::logic_error("GridFunction: Walsh terms requested from dense form");
    return walsh_;
}

double GridFunction::operator()(Index state) const {
    if (dense_) return values_[state];
    // On the cube the sign of coordinate i at this state is its atom value.
    double acc = 0.0;
    for (const WalshTerm& t : walsh_) {
        std::uint64_t m = t.mask;
        double sign = 1.0;
        while (m != 0) {
            const int i = std::countr_zero(m);
            m &= m - 1;
            sign *= space_->factor(i).atom(space_->digit(state, i));
        }
        acc += t.coef * sign;
    }
    return acc;
}

double GridFunction::sup_norm_bound() const {
    if (dense_) return values_.size() == 0 ? 0.0 : values_.abs().maxCoeff();
    double acc = 0.0;
    for (const WalshTerm& t : walsh_) acc += std::abs(t.coef);
    return acc;
}

void require_same_space(const GridFunction& f, const GridFunction& g) {
    if (!f.space().same_as(g.space()))
        throw std::invalid_argument("grid functions live on different spaces");
}

void require_dense(const GridFunction& f, const char* what) {
    if (!f.is_dense())
        throw std::invalid_argument(std::string(what) + ": requires a dense representation");
}

GridFunction operator+(const GridFunction& f, const GridFunction& g) {
    require_same_space(f, g);
    require_dense(f, "operator+");
    require_dense(g, "operator+");
    return GridFunction::dense(f.space_ptr(), f.values() + g.values());
}

GridFunction operator-(const GridFunction& f, const GridFunction& g) {
    require_same_space(f, g);
    require_dense(f, "operator-");
    require_dense(g, "operator-");
    return GridFunction::dense(f.space_ptr(), f.values() - g.values());
}

GridFunction operator*(double scale, const GridFunction& f) {
    if (f.is_dense()) return GridFunction::dense(f.space_ptr(), scale * f.values());
    std::vector<WalshTerm> terms = f.walsh_terms();
    for (WalshTerm& t : terms) t.coef *= scale;
    return GridFunction::walsh(f.space_ptr(), std::move(terms));
}

double weighted_mean(const ProductSpace& space, const Eigen::ArrayXd& integrand) {
    if (!integrand.isFinite().all())
        throw std::invalid_argument("weighted_mean: non-finite value in integrand");
    if (integrand.size() != space.total_states())
        throw std::invalid_argument("weighted_mean: length mismatch");
    Eigen::ArrayXd products = integrand * space.dense_weights();
    return pairwise_sum(products);
}

double expectation(const GridFunction& f) {
    if (f.is_walsh()) {
        for (const WalshTerm& t : f.walsh_terms())
            if (t.mask == 0) return t.coef;
        return 0.0;
    }
    return weighted_mean(f.space(), f.values());
}

GridFunction partial_expectation(const GridFunction& f, int i) {
    require_dense(f, "partial_expectation");
    const ProductSpace& sp = f.space();
    if (i < 0 || i >= sp.dimension())
        throw std::invalid_argument("partial_expectation: coordinate out of range");
    const Factor& fac = sp.factor(i);
    const Index stride = sp.stride(i);
    const Index block = stride * fac.size();
    const Eigen::ArrayXd& v = f.values();
    Eigen::ArrayXd out(v.size());
    for (Index base = 0; base < v.size(); base += block) {
        for (Index low = 0; low < stride; ++low) {
            double m = 0.0;
            for (int d = 0; d < fac.size(); ++d) m += fac.prob(d) * v[base + low + d * stride];
            for (int d = 0; d < fac.size(); ++d) out[base + low + d * stride] = m;
        }
    }
    return GridFunction::dense(f.space_ptr(), std::move(out));
}

double variance(const GridFunction& f) {
    require_dense(f, "variance");
    const double mean = expectation(f);
    const double mean_sq = weighted_mean(f.space(), f.values().square());
    const double var = mean_sq - mean * mean;
    if (var < 0.0) return 0.0;  // cancellation noise
    return var;
}

double entropy(const GridFunction& g) {
    require_dense(g, "entropy");
    const Eigen::ArrayXd& v = g.values();
    if (!v.isFinite().all()) throw std::invalid_argument("entropy: non-finite value");
    if ((v < 0.0).any()) throw std::invalid_argument("entropy: negative value");
    Eigen::ArrayXd glogg(v.size());
    for (Index s = 0; s < v.size(); ++s) glogg[s] = v[s] > 0.0 ? v[s] * std::log(v[s]) : 0.0;
    const double mean_glogg = weighted_mean(g.space(), glogg);
    const double mean_g = weighted_mean(g.space(), v);
    const double ent = mean_g > 0.0 ? mean_glogg - mean_g * std::log(mean_g) : 0.0;
    if (ent < 0.0 && ent >= -1e-12 * std::max(1.0, std::abs(mean_glogg))) return 0.0;
    return ent;
}

}  // namespace conclab
