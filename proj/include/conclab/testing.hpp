#pragma once

#include "conclab/grid_function.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace conclab::testing {

/// Deterministic generator for random spaces and functions, shared by the
/// self test, the unit tests and the acceptance suite.
class InputRng {
public:
    explicit InputRng(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double symmetric(double amp = 1.0) { return amp * (2.0 * uniform() - 1.0); }
    int integer(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    std::uint64_t bits() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

/// Random product space: dimension in [1, max_dim], factor sizes in
/// [2, max_atoms], distinct atoms in [-2, 2], probabilities bounded away
/// from zero.
inline SpacePtr random_space(InputRng& rng, int max_dim, int max_atoms) {
    const int n = rng.integer(1, max_dim);
    std::vector<Factor> factors;
    factors.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int size = rng.integer(2, max_atoms);
        Eigen::ArrayXd atoms(size), probs(size);
        for (int k = 0; k < size; ++k) {
            atoms[k] = -2.0 + 4.0 * (k + rng.uniform() * 0.8) / size;
            probs[k] = 0.2 + rng.uniform();
        }
        probs /= probs.sum();
        factors.emplace_back(std::move(atoms), std::move(probs));
    }
    return ProductSpace::make(std::move(factors));
}

/// Random product of (possibly biased) two-point factors on {+1, -1}.
inline SpacePtr random_two_point_space(InputRng& rng, int max_dim, bool uniform = false) {
    const int n = rng.integer(1, max_dim);
    std::vector<Factor> factors;
    factors.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        factors.push_back(Factor::two_point(uniform ? 0.5 : 0.15 + 0.7 * rng.uniform()));
    return ProductSpace::make(std::move(factors));
}

inline GridFunction random_dense(InputRng& rng, SpacePtr space, double amp = 1.0) {
    Eigen::ArrayXd v(space->total_states());
    for (Index s = 0; s < v.size(); ++s) v[s] = rng.symmetric(amp);
    return GridFunction::dense(std::move(space), std::move(v));
}

/// Random chaos sum_S alpha_S prod_{i in S} (x_i - E x_i) over subsets of
/// the given sizes; the product of centered coordinates is exactly the
/// Hoeffding term for S, so degree structure is known by construction.
inline GridFunction random_chaos(InputRng& rng, SpacePtr space, std::vector<int> degrees,
                                 double amp = 1.0, int terms_per_degree = 4) {
    const int n = space->dimension();
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(space->total_states());
    for (int d : degrees) {
        if (d > n) continue;
        for (int t = 0; t < terms_per_degree; ++t) {
            // Random subset of size d.
            std::vector<int> coords;
            while (static_cast<int>(coords.size()) < d) {
                const int c = rng.integer(0, n - 1);
                bool dup = false;
                for (int existing : coords) dup = dup || existing == c;
                if (!dup) coords.push_back(c);
            }
            const double coef = rng.symmetric(amp);
            for (Index s = 0; s < acc.size(); ++s) {
                double prod = coef;
                for (int c : coords)
                    prod *= space->factor(c).atom(space->digit(s, c)) - space->factor(c).mean();
                acc[s] += prod;
            }
        }
    }
    return GridFunction::dense(std::move(space), std::move(acc));
}

}  // namespace conclab::testing
