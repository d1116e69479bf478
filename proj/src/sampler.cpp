#include "conclab/sampler.hpp"

#include <stdexcept>

namespace conclab {

SampleStream::SampleStream(SpacePtr space, std::uint64_t seed)
    : space_(std::move(space)), rng_(seed) {
    if (!space_) throw std::invalid_argument("SampleStream: null space");
    cdf_.reserve(static_cast<std::size_t>(space_->dimension()));
    for (const Factor& f : space_->factors()) {
        std::vector<double> c(static_cast<std::size_t>(f.size()));
        double acc = 0.0;
        for (int d = 0; d < f.size(); ++d) {
            acc += f.prob(d);
            c[static_cast<std::size_t>(d)] = acc;
        }
        c.back() = 1.0;
        cdf_.push_back(std::move(c));
    }
}

Index SampleStream::next() {
    Index state = 0;
    for (int i = space_->dimension() - 1; i >= 0; --i) {
        const std::vector<double>& c = cdf_[static_cast<std::size_t>(i)];
        const double u = next_uniform();
        int d = 0;
        while (u >= c[static_cast<std::size_t>(d)]) ++d;
        state = state * space_->factor(i).size() + d;
    }
    return state;
}

std::vector<Index> sample_states(SpacePtr space, std::uint64_t seed, Index count) {
    if (count < 0) throw std::invalid_argument("sample_states: count must be >= 0");
    SampleStream stream(std::move(space), seed);
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) out.push_back(stream.next());
    return out;
}

}  // namespace conclab
