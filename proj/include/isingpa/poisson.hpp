#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isingpa/count_distribution.hpp"
#include "isingpa/gibbs_exact.hpp"
#include "isingpa/local_config.hpp"

namespace isingpa {

class PoissonTarget {
public:
    /// Throws InvalidArgument unless lambda is positive and finite.
    explicit PoissonTarget(double lambda);

    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    /// pmf(0..last), by upward recursion in the log domain.
    [[nodiscard]] std::vector<double> pmf_upto(std::size_t last) const;
    /// Smallest m with P(X <= m) > 1 - tail.
    [[nodiscard]] std::size_t quantile_index(double tail) const;

private:
    double lambda_;
};

/// lambda = c^k e^{-2 b gamma}. Throws MotifScheduleMismatch if k(motif) is
/// not the schedule's k_target.
[[nodiscard]] PoissonTarget poisson_target(const FieldSchedule& schedule, double b, const LocalConfig& motif);

struct TvResult {
    double value = 0.0;
    /// Poisson truncation mass plus the plug-in bias bound.
    double error_budget = 0.0;
    /// sqrt(support / sample size) for empirical inputs, 0 for exact ones.
    double plugin_bias_bound = 0.0;
};

/// Half-L1 distance between two count laws.
[[nodiscard]] TvResult tv_distance(const CountDistribution& p, const CountDistribution& q);
/// Half-L1 distance to a Poisson law truncated once its cumulative mass
/// exceeds 1 - 1e-12.
[[nodiscard]] TvResult tv_distance(const CountDistribution& p, const PoissonTarget& q);

[[nodiscard]] std::vector<double> factorial_moments(const CountDistribution& dist, int l_max);

/// Stein-Chen bound on d_TV(L(W), P(lambda_n)) for a sum W of n^d
/// translation-invariant positively related indicators:
/// (1 - e^{-lambda_n}) / lambda_n * (Var W - lambda_n + 2 lambda_n^2 / n^d),
/// with lambda_n = E W taken from the supplied law.
[[nodiscard]] double stein_chen_bound(const CountDistribution& increasing_count_law, std::size_t volume);

/// The same bound for the increasing count of `motif` under an exact measure.
/// Throws FerromagneticOnly when b < 0.
[[nodiscard]] double stein_chen_bound(const ExactMeasure& measure, const LocalConfig& motif);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Least squares of log(value) on log(n). Throws DegenerateFit on fewer than
/// three points or a nonpositive value.
[[nodiscard]] RateFit rate_fit(std::span<const double> ns, std::span<const double> values);

/// Drops points whose value is below 10x their error floor before fitting.
[[nodiscard]] RateFit rate_fit(std::span<const double> ns, std::span<const double> values,
                               std::span<const double> error_floors);

struct RingReport {
    double tv = 0.0;          // d_TV(L(X(ring eta)), L(X(eta)))
    double mean_diff = 0.0;   // |E X(ring eta) - E X(eta)|
    double mean_motif = 0.0;
    double mean_ringed = 0.0;
};

/// Compares the exact count laws of a motif and of its ringed version.
/// Throws InvalidArgument for the null motif.
[[nodiscard]] RingReport ring_equivalence_check(const ExactMeasure& measure, const LocalConfig& motif);

}  // namespace isingpa
