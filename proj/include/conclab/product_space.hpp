#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace conclab {

using Index = std::int64_t;

/// One coordinate of a product space: a finitely supported probability
/// measure on the real line. Atoms are pairwise distinct, probabilities are
/// strictly positive and sum to one (within 1e-12). A single-atom factor is
/// a deterministic coordinate.
class Factor {
public:
    Factor(Eigen::ArrayXd atoms, Eigen::ArrayXd probs);

    static Factor symmetric_sign();                 // {+1, -1} with equal mass
    static Factor two_point(double p_plus);         // {+1, -1} with P(+1) = p_plus

    int size() const { return static_cast<int>(atoms_.size()); }
    double atom(int k) const { return atoms_[k]; }
    double prob(int k) const { return probs_[k]; }
    const Eigen::ArrayXd& atoms() const { return atoms_; }
    const Eigen::ArrayXd& probs() const { return probs_; }

    double mean() const { return mean_; }
    bool is_two_point() const { return size() == 2; }
    /// True iff the support is {+1, -1} (either order) with mass 1/2 each.
    bool is_symmetric_sign() const { return symmetric_sign_; }

    bool operator==(const Factor& other) const;

private:
    Eigen::ArrayXd atoms_;
    Eigen::ArrayXd probs_;
    double mean_ = 0.0;
    bool symmetric_sign_ = false;
};

/// A finite product probability space with mixed-radix state indexing:
/// coordinate 0 is the least significant digit, so
/// state = d_0 + size_0 * (d_1 + size_1 * (d_2 + ...)).
class ProductSpace {
public:
    /// Dense tabulation is only permitted up to this many states; larger
    /// spaces are restricted to the sparse-Walsh / Monte Carlo paths.
    static constexpr Index kDenseCap = Index{1} << 24;

    explicit ProductSpace(std::vector<Factor> factors);

    static std::shared_ptr<const ProductSpace> uniform_cube(int n);
    static std::shared_ptr<const ProductSpace> make(std::vector<Factor> factors);

    int dimension() const { return static_cast<int>(factors_.size()); }
    const Factor& factor(int i) const { return factors_[static_cast<std::size_t>(i)]; }
    const std::vector<Factor>& factors() const { return factors_; }

    Index total_states() const { return total_states_; }
    bool dense_enumerable() const { return total_states_ <= kDenseCap; }

    bool is_uniform_cube() const { return is_uniform_cube_; }
    bool all_two_point() const { return all_two_point_; }
    bool all_factors_identical() const;

    Index stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }
    int digit(Index state, int i) const {
        return static_cast<int>((state / stride(i)) % factor(i).size());
    }
    Index replace_digit(Index state, int i, int d) const {
        return state + (static_cast<Index>(d) - digit(state, i)) * stride(i);
    }

    Index encode(std::span<const int> digits) const;
    std::vector<int> decode(Index state) const;

    /// Product weight of a single state, O(dimension).
    double weight(Index state) const;

    /// All state weights as one array (cached; requires dense_enumerable).
    const Eigen::ArrayXd& dense_weights() const;

    bool same_as(const ProductSpace& other) const;

private:
    std::vector<Factor> factors_;
    std::vector<Index> strides_;
    Index total_states_ = 1;
    bool is_uniform_cube_ = false;
    bool all_two_point_ = false;

    struct WeightCache {
        std::once_flag once;
        Eigen::ArrayXd weights;
    };
    std::shared_ptr<WeightCache> weight_cache_;
};

using SpacePtr = std::shared_ptr<const ProductSpace>;

}  // namespace conclab
