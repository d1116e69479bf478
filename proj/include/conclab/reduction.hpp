#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <stdexcept>

namespace conclab {

namespace detail {

inline constexpr std::ptrdiff_t kPairwiseBlock = 64;

inline double pairwise_sum_impl(const double* data, std::ptrdiff_t n) {
    if (n <= kPairwiseBlock) {
        double acc = 0.0;
        for (std::ptrdiff_t k = 0; k < n; ++k) acc += data[k];
        return acc;
    }
    const std::ptrdiff_t half = n / 2;
    return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

}  // namespace detail

/// Fixed-fan-in pairwise tree sum. The split points depend only on the
/// length, so the result is independent of how callers chunk their work.
inline double pairwise_sum(std::span<const double> values) {
    return detail::pairwise_sum_impl(values.data(), static_cast<std::ptrdiff_t>(values.size()));
}

inline double pairwise_sum(const Eigen::ArrayXd& values) {
    return detail::pairwise_sum_impl(values.data(), values.size());
}

/// Square root that tolerates radicands down to -1e-15 (rounding noise from
/// sums of squares) and treats anything more negative as an internal error.
inline double checked_sqrt(double radicand) {
    if (radicand < 0.0) {
        if (radicand < -1e-15) throw std::logic_error("checked_sqrt: radicand below rounding floor");
        return 0.0;
    }
    return std::sqrt(radicand);
}

}  // namespace conclab
