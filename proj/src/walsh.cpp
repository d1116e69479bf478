#include "conclab/walsh.hpp"

#include <cmath>
#include <stdexcept>

namespace conclab {

namespace detail {

void walsh_butterfly(const ProductSpace& space, Eigen::ArrayXd& v, bool forward) {
    const int n = space.dimension();
    for (int i = 0; i < n; ++i) {
        const Index stride = space.stride(i);
        const Index block = 2 * stride;
        const double a0 = space.factor(i).atom(0);  // +1 or -1
        for (Index base = 0; base < v.size(); base += block) {
            for (Index low = 0; low < stride; ++low) {
                const double u = v[base + low];
                const double w = v[base + low + stride];
                if (forward) {
                    v[base + low] = 0.5 * (u + w);
                    v[base + low + stride] = 0.5 * a0 * (u - w);
                } else {
                    v[base + low] = u + a0 * w;
                    v[base + low + stride] = u - a0 * w;
                }
            }
        }
    }
}

}  // namespace detail

GridFunction to_walsh(const GridFunction& f, double drop_tol) {
    if (!f.space().is_uniform_cube())
        throw std::invalid_argument("to_walsh: requires a uniform cube");
    if (f.is_walsh()) return f;
    Eigen::ArrayXd coef = f.values();
    if (!coef.isFinite().all()) throw std::invalid_argument("to_walsh: non-finite value");
    detail::walsh_butterfly(f.space(), coef, true);
    std::vector<WalshTerm> terms;
    for (Index mask = 0; mask < coef.size(); ++mask)
        if (std::abs(coef[mask]) > drop_tol)
            terms.push_back({static_cast<std::uint64_t>(mask), coef[mask]});
    return GridFunction::walsh(f.space_ptr(), std::move(terms));
}

GridFunction from_walsh(const GridFunction& f) {
    if (f.is_dense()) return f;
    const ProductSpace& sp = f.space();
    if (!sp.dense_enumerable())
        throw std::invalid_argument("from_walsh: space exceeds the dense enumeration cap");
    Eigen::ArrayXd coef = Eigen::ArrayXd::Zero(sp.total_states());
    for (const WalshTerm& t : f.walsh_terms()) coef[static_cast<Index>(t.mask)] = t.coef;
    detail::walsh_butterfly(sp, coef, false);
    return GridFunction::dense(f.space_ptr(), std::move(coef));
}

}  // namespace conclab
