#include "conclab/product_space.hpp"

#include "conclab/reduction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conclab {

namespace {

constexpr Index kIndexCap = Index{1} << 62;

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

Factor::Factor(Eigen::ArrayXd atoms, Eigen::ArrayXd probs)
    : atoms_(std::move(atoms)), probs_(std::move(probs)) {
    if (atoms_.size() < 1) throw std::invalid_argument("Factor: needs at least one atom");
    if (atoms_.size() != probs_.size())
        throw std::invalid_argument("Factor: atoms/probs length mismatch");
    if (!atoms_.isFinite().all() || !probs_.isFinite().all())
        throw std::invalid_argument("Factor: non-finite entry");
    for (int k = 0; k < atoms_.size(); ++k) {
        if (probs_[k] <= 0.0) throw std::invalid_argument("Factor: probabilities must be > 0");
        for (int l = k + 1; l < atoms_.size(); ++l)
            if (atoms_[k] == atoms_[l]) throw std::invalid_argument("Factor: atoms must be distinct");
    }
    if (!close(probs_.sum(), 1.0, 1e-12))
        throw std::invalid_argument("Factor: probabilities must sum to 1 within 1e-12");
    mean_ = (atoms_ * probs_).sum();
    symmetric_sign_ = size() == 2 && close(probs_[0], 0.5, 1e-12) && close(probs_[1], 0.5, 1e-12) &&
                      ((atoms_[0] == 1.0 && atoms_[1] == -1.0) || (atoms_[0] == -1.0 && atoms_[1] == 1.0));
}

Factor Factor::symmetric_sign() {
    return two_point(0.5);
}

Factor Factor::two_point(double p_plus) {
    Eigen::ArrayXd a(2), p(2);
    a << 1.0, -1.0;
    p << p_plus, 1.0 - p_plus;
    return Factor(std::move(a), std::move(p));
}

bool Factor::operator==(const Factor& other) const {
    return atoms_.size() == other.atoms_.size() && (atoms_ == other.atoms_).all() &&
           (probs_ == other.probs_).all();
}

ProductSpace::ProductSpace(std::vector<Factor> factors)
    : factors_(std::move(factors)), weight_cache_(std::make_shared<WeightCache>()) {
    if (factors_.empty()) throw std::invalid_argument("ProductSpace: needs at least one factor");
    strides_.reserve(factors_.size());
    for (const Factor& f : factors_) {
        strides_.push_back(total_states_);
        if (total_states_ > kIndexCap / f.size())
            throw std::invalid_argument("ProductSpace: state space too large to index");
        total_states_ *= f.size();
    }
    is_uniform_cube_ = true;
    all_two_point_ = true;
    for (const Factor& f : factors_) {
        is_uniform_cube_ = is_uniform_cube_ && f.is_symmetric_sign();
        all_two_point_ = all_two_point_ && f.is_two_point();
    }
}

SpacePtr ProductSpace::uniform_cube(int n) {
    if (n < 1) throw std::invalid_argument("uniform_cube: dimension must be >= 1");
    std::vector<Factor> fs;
    fs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) fs.push_back(Factor::symmetric_sign());
    return make(std::move(fs));
}

SpacePtr ProductSpace::make(std::vector<Factor> factors) {
    return std::make_shared<const ProductSpace>(std::move(factors));
}

bool ProductSpace::all_factors_identical() const {
    for (std::size_t i = 1; i < factors_.size(); ++i)
        if (!(factors_[i] == factors_[0])) return false;
    return true;
}

Index ProductSpace::encode(std::span<const int> digits) const {
    if (static_cast<int>(digits.size()) != dimension())
        throw std::invalid_argument("encode: digit count mismatch");
    Index state = 0;
    for (int i = dimension() - 1; i >= 0; --i) {
        const int d = digits[static_cast<std::size_t>(i)];
        if (d < 0 || d >= factor(i).size()) throw std::invalid_argument("encode: digit out of range");
        state = state * factor(i).size() + d;
    }
    return state;
}

std::vector<int> ProductSpace::decode(Index state) const {
    if (state < 0 || state >= total_states_) throw std::invalid_argument("decode: state out of range");
    std::vector<int> digits(static_cast<std::size_t>(dimension()));
    for (int i = 0; i < dimension(); ++i) {
        digits[static_cast<std::size_t>(i)] = static_cast<int>(state % factor(i).size());
        state /= factor(i).size();
    }
    return digits;
}

double ProductSpace::weight(Index state) const {
    double w = 1.0;
    for (int i = 0; i < dimension(); ++i) {
        w *= factor(i).prob(static_cast<int>(state % factor(i).size()));
        state /= factor(i).size();
    }
    return w;
}

const Eigen::ArrayXd& ProductSpace::dense_weights() const {
    if (!dense_enumerable())
        throw std::invalid_argument("dense_weights: space exceeds the dense enumeration cap");
    std::call_once(weight_cache_->once, [this] {
        Eigen::ArrayXd w(1);
        w[0] = 1.0;
        // Kronecker build-up, least significant coordinate innermost.
        for (const Factor& f : factors_) {
            Eigen::ArrayXd next(w.size() * f.size());
            for (int d = 0; d < f.size(); ++d)
                next.segment(d * w.size(), w.size()) = w * f.prob(d);
            w.swap(next);
        }
        weight_cache_->weights = std::move(w);
    });
    return weight_cache_->weights;
}

bool ProductSpace::same_as(const ProductSpace& other) const {
    if (this == &other) return true;
    if (dimension() != other.dimension()) return false;
    for (int i = 0; i < dimension(); ++i)
        if (!(factor(i) == other.factor(i))) return false;
    return true;
}

}  // namespace conclab
