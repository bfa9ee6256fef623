#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>

namespace isingpa {

/// Law of a nonnegative integer count, exact (sample_size = 0) or empirical.
/// The pmf is stored sparsely; moments are computed once at construction.
class CountDistribution {
public:
    /// Throws NotNormalized if the masses do not sum to 1 within 1e-9, and
    /// InvalidArgument on negative masses or values.
    static CountDistribution from_pmf(std::map<std::int64_t, double> pmf, std::size_t sample_size = 0);
    static CountDistribution from_samples(std::span<const std::int64_t> counts);
    static CountDistribution point_mass(std::int64_t value);

    [[nodiscard]] const std::map<std::int64_t, double>& pmf() const noexcept { return pmf_; }
    [[nodiscard]] double mass(std::int64_t value) const;
    [[nodiscard]] std::size_t sample_size() const noexcept { return sample_size_; }
    [[nodiscard]] bool is_exact() const noexcept { return sample_size_ == 0; }
    [[nodiscard]] std::int64_t max_value() const;

    [[nodiscard]] double mean() const noexcept { return moments_[0]; }
    [[nodiscard]] double variance() const noexcept { return moments_[1] + moments_[0] - moments_[0] * moments_[0]; }
    /// M_l = E[Y (Y-1) ... (Y-l+1)] for l in 1..4.
    [[nodiscard]] double factorial_moment(int l) const;

private:
    CountDistribution() = default;
    void compute_moments();

    std::map<std::int64_t, double> pmf_;
    std::size_t sample_size_ = 0;
    std::array<double, 4> moments_{};
};

/// M_l for arbitrary l >= 1: sum_k pmf(k) k! / (k - l)!.
[[nodiscard]] double falling_factorial_moment(const CountDistribution& dist, int l);

}  // namespace isingpa
