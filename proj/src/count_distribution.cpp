#include "isingpa/count_distribution.hpp"

#include <cmath>
#include <string>

#include "isingpa/error.hpp"

namespace isingpa {

CountDistribution CountDistribution::from_pmf(std::map<std::int64_t, double> pmf, std::size_t sample_size) {
    double total = 0.0;
    for (const auto& [value, p] : pmf) {
        if (value < 0) throw Error(ErrorKind::InvalidArgument, "count values must be nonnegative");
        if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "masses must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::NotNormalized, "pmf sums to " + std::to_string(total));
    CountDistribution d;
    d.pmf_ = std::move(pmf);
    d.sample_size_ = sample_size;
    d.compute_moments();
    return d;
}

CountDistribution CountDistribution::from_samples(std::span<const std::int64_t> counts) {
    if (counts.empty()) throw Error(ErrorKind::InvalidArgument, "empirical law needs at least one sample");
    std::map<std::int64_t, std::size_t> tally;
    for (auto c : counts) ++tally[c];
    std::map<std::int64_t, double> pmf;
    const double n = static_cast<double>(counts.size());
    for (const auto& [value, hits] : tally) pmf[value] = static_cast<double>(hits) / n;
    return from_pmf(std::move(pmf), counts.size());
}

CountDistribution CountDistribution::point_mass(std::int64_t value) { return from_pmf({{value, 1.0}}); }

double CountDistribution::mass(std::int64_t value) const {
    auto it = pmf_.find(value);
    return it == pmf_.end() ? 0.0 : it->second;
}

std::int64_t CountDistribution::max_value() const { return pmf_.empty() ? 0 : pmf_.rbegin()->first; }

double CountDistribution::factorial_moment(int l) const {
    if (l >= 1 && l <= 4) return moments_[static_cast<std::size_t>(l - 1)];
    return falling_factorial_moment(*this, l);
}

void CountDistribution::compute_moments() {
    for (int l = 1; l <= 4; ++l) moments_[static_cast<std::size_t>(l - 1)] = falling_factorial_moment(*this, l);
}

double falling_factorial_moment(const CountDistribution& dist, int l) {
    if (l < 1) throw Error(ErrorKind::InvalidArgument, "factorial moment order must be >= 1");
    double acc = 0.0;
    for (const auto& [value, p] : dist.pmf()) {
        double term = 1.0;
        for (int i = 0; i < l; ++i) term *= static_cast<double>(value - i);
        if (value >= l) acc += p * term;
    }
    return acc;
}

}  // namespace isingpa
