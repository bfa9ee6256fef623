#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isingpa/error.hpp"
#include "isingpa/motif_count.hpp"
#include "isingpa/poisson.hpp"
#include "oracles.hpp"

using namespace isingpa;

namespace {

const LatticeSignature kLine{1, 1, Norm::lp(1)};
const LatticeSignature kSquare{2, 1, Norm::lp(1)};

std::shared_ptr<const TorusLattice> line(int n) { return std::make_shared<const TorusLattice>(1, n, 1, Norm::lp(1)); }

CountDistribution exact_law(int n, double a, double b, const LocalConfig& motif, MatchMode mode) {
    return count_distribution_exact(ExactMeasure::build(line(n), {a, b}), motif, mode);
}

double schedule_field(int n, int k, double c = 1.0) { return FieldSchedule(c, k, 1).field(n); }

CountDistribution random_law(std::mt19937_64& rng, int support) {
    std::map<std::int64_t, double> pmf;
    double total = 0;
    for (int v = 0; v < support; ++v) total += pmf[v] = std::uniform_real_distribution<>(0, 1)(rng);
    for (auto& [v, p] : pmf) p /= total;
    return CountDistribution::from_pmf(pmf);
}

}  // namespace

TEST_CASE("Poisson targets") {
    const FieldSchedule c1(1.0, 1, 2);
    CHECK(poisson_target(c1, 0.0, LocalConfig(kSquare, 1, {{0, 0}})).lambda() == doctest::Approx(1.0));
    CHECK(poisson_target(FieldSchedule(1.0, 2, 2), 0.0, LocalConfig(kSquare, 1, {{0, 0}, {1, 0}})).lambda() ==
          doctest::Approx(1.0));
    for (double c : {0.5, 3.0}) {
        for (double b : {-0.2, 0.7}) {
            CHECK(poisson_target(FieldSchedule(c, 1, 2), b, LocalConfig(kSquare, 1, {{0, 0}})).lambda() ==
                  doctest::Approx(c * std::exp(-8 * b)));
        }
    }
    CHECK(poisson_target(FieldSchedule(2.0, 2, 2), 0.1, LocalConfig(kSquare, 1, {{0, 0}, {1, 0}})).lambda() ==
          doctest::Approx(4 * std::exp(-1.2)));
    CHECK_THROWS_WITH_AS((void)poisson_target(c1, 0.0, LocalConfig(kSquare, 1, {{0, 0}, {1, 0}})),
                         doctest::Contains("MotifScheduleMismatch"), Error);
    CHECK_THROWS_AS(PoissonTarget(0.0), Error);

    const PoissonTarget p(2.5);
    const auto pmf = p.pmf_upto(40);
    for (int m = 0; m <= 40; ++m) CHECK(pmf[m] == doctest::Approx(oracle::poisson_pmf(2.5, m)).epsilon(1e-12));
    const PoissonTarget big(700.0);
    const auto tail = big.pmf_upto(800);
    CHECK(tail[700] == doctest::Approx(oracle::poisson_pmf(700.0, 700)).epsilon(1e-9));
}

TEST_CASE("total variation examples") {
    std::mt19937_64 rng(1);
    const auto p = random_law(rng, 6);
    CHECK(tv_distance(p, p).value == 0.0);
    for (double lambda : {0.1, 1.0, 4.0}) {
        CHECK(tv_distance(CountDistribution::point_mass(0), PoissonTarget(lambda)).value ==
              doctest::Approx(1 - std::exp(-lambda)).epsilon(1e-12));
    }
}

TEST_CASE("total variation agrees with the sup-over-subsets definition") {
    for (double b : {-0.3, 0.0, 0.4}) {
        const int n = 10;
        const auto law = exact_law(n, schedule_field(n, 1), b, LocalConfig(kLine, 1, {{0}}), MatchMode::exact_match);
        const double lambda = std::exp(-4 * b);
        // Atoms 0..11 plus one lumped Poisson tail atom; the law has no mass there.
        std::vector<double> p(13, 0.0), q(13, 0.0);
        double head = 0;
        for (int m = 0; m < 12; ++m) {
            p[m] = law.mass(m);
            q[m] = oracle::poisson_pmf(lambda, m);
            head += q[m];
        }
        q[12] = 1 - head;
        REQUIRE(law.max_value() < 12);
        CHECK(tv_distance(law, PoissonTarget(lambda)).value == doctest::Approx(oracle::tv_sup(p, q)).epsilon(1e-10));
    }
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_law(rng, 8), b = random_law(rng, 10);
        std::vector<double> pa(10, 0), pb(10, 0);
        for (int v = 0; v < 10; ++v) {
            pa[v] = a.mass(v);
            pb[v] = b.mass(v);
        }
        CHECK(tv_distance(a, b).value == doctest::Approx(oracle::tv_sup(pa, pb)).epsilon(1e-12));
    }
}

TEST_CASE("total variation is a metric") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_law(rng, 1 + static_cast<int>(rng() % 8));
        const auto b = random_law(rng, 1 + static_cast<int>(rng() % 8));
        const auto c = random_law(rng, 1 + static_cast<int>(rng() % 8));
        CHECK(tv_distance(a, b).value == tv_distance(b, a).value);
        CHECK(tv_distance(a, c).value <= tv_distance(a, b).value + tv_distance(b, c).value + 1e-12);
    }
}

TEST_CASE("empirical laws carry a plug-in bias bound") {
    const std::vector<std::int64_t> counts{0, 0, 1, 2, 0, 1, 1, 0};
    const auto emp = CountDistribution::from_samples(counts);
    CHECK(emp.sample_size() == 8);
    const auto r = tv_distance(emp, PoissonTarget(0.6));
    CHECK(r.plugin_bias_bound == doctest::Approx(std::sqrt(4.0 / 8.0)));
    CHECK(r.error_budget >= r.plugin_bias_bound);
    CHECK(tv_distance(CountDistribution::point_mass(1), PoissonTarget(1.0)).plugin_bias_bound == 0.0);
    CHECK_THROWS_WITH_AS((void)CountDistribution::from_pmf({{0, 0.5}, {1, 0.4}}), doctest::Contains("NotNormalized"), Error);
}

TEST_CASE("factorial moments") {
    const auto pm = factorial_moments(CountDistribution::point_mass(3), 4);
    CHECK(pm == std::vector<double>{3, 6, 6, 0});
    CHECK(falling_factorial_moment(CountDistribution::point_mass(7), 5) == doctest::Approx(2520));

    const double lambda = 1.7;
    const PoissonTarget target(lambda);
    const auto q = target.pmf_upto(target.quantile_index(1e-15));
    std::map<std::int64_t, double> pmf;
    double total = 0;
    for (std::size_t m = 0; m < q.size(); ++m) total += q[m];
    for (std::size_t m = 0; m < q.size(); ++m) pmf[static_cast<std::int64_t>(m)] = q[m] / total;
    const auto moments = factorial_moments(CountDistribution::from_pmf(pmf), 4);
    for (int l = 1; l <= 4; ++l) CHECK(moments[l - 1] == doctest::Approx(std::pow(lambda, l)).epsilon(1e-10));
    CHECK_THROWS_AS((void)factorial_moments(CountDistribution::point_mass(1), 0), Error);
}

TEST_CASE("empirical factorial moments from exact-oracle draws") {
    const int n = 12;
    const auto measure = ExactMeasure::build(line(n), {schedule_field(n, 1), 0.2});
    const LocalConfig center(kLine, 1, {{0}});
    const auto exact = count_distribution_exact(measure, center, MatchMode::exact_match);
    const MotifScanner scan(measure.lattice(), center, MatchMode::exact_match);

    std::vector<double> cdf(measure.state_count());
    double acc = 0;
    for (std::size_t s = 0; s < cdf.size(); ++s) cdf[s] = acc += measure.probability(s);
    std::mt19937_64 rng(10);
    const std::size_t draws = 100000;
    std::vector<std::int64_t> counts;
    for (std::size_t i = 0; i < draws; ++i) {
        const double u = std::uniform_real_distribution<>(0, acc)(rng);
        const auto s = static_cast<std::uint64_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        counts.push_back(scan.count(s));
    }
    const auto emp = CountDistribution::from_samples(counts);
    for (int l = 1; l <= 3; ++l) {
        double sq = 0;
        for (const auto& [v, p] : exact.pmf()) {
            double ff = 1;
            for (int j = 0; j < l; ++j) ff *= static_cast<double>(v - j);
            sq += p * ff * ff;
        }
        const double m = exact.factorial_moment(l);
        const double se = std::sqrt((sq - m * m) / draws);
        CHECK(std::abs(emp.factorial_moment(l) - m) < 3 * se);
    }
}

TEST_CASE("Stein-Chen bound: binomial closed form") {
    for (int n : {6, 10}) {
        const double a = -0.7;
        const auto measure = ExactMeasure::build(line(n), {a, 0.0});
        const double p = std::exp(a) / (std::exp(a) + std::exp(-a));
        const double lambda_n = n * p;
        const double closed = (1 - std::exp(-lambda_n)) / lambda_n * (n * p * (1 - p) - lambda_n + 2 * lambda_n * lambda_n / n);
        const double bound = stein_chen_bound(measure, LocalConfig(kLine, 0, {{0}}));
        CHECK(bound == doctest::Approx(closed).epsilon(1e-12));
        CHECK(bound == doctest::Approx((1 - std::exp(-lambda_n)) * p).epsilon(1e-12));
    }
}

TEST_CASE("Stein-Chen bound dominates the exact TV when b >= 0") {
    for (const auto& motif : {LocalConfig(kLine, 1, {{0}}), LocalConfig(kLine, 1, {{-1}, {0}}), LocalConfig(kLine, 0, {{0}})}) {
        for (double b : {0.0, 0.25, 0.6}) {
            for (int n : {8, 11, 14}) {
                const auto measure = ExactMeasure::build(line(n), {schedule_field(n, k(motif)), b});
                const auto law = count_distribution_exact(measure, motif, MatchMode::superset_match);
                const double lambda_n = law.mean();
                const double prefactor = -std::expm1(-lambda_n) / lambda_n;
                CHECK(prefactor > 0.0);
                CHECK(prefactor < 1.0);
                const double bound = stein_chen_bound(measure, motif);
                CHECK(bound >= tv_distance(law, PoissonTarget(lambda_n)).value);
            }
        }
    }
    const auto measure = ExactMeasure::build(line(8), {-1.0, -0.2});
    CHECK_THROWS_WITH_AS((void)stein_chen_bound(measure, LocalConfig(kLine, 1, {{0}})), doctest::Contains("FerromagneticOnly"),
                         Error);
}

TEST_CASE("rate fits") {
    const std::vector<double> ns{8, 10, 12, 16, 20};
    std::vector<double> inv_sq, flat(ns.size(), 0.3);
    for (double n : ns) inv_sq.push_back(std::pow(n, -2.0));
    const auto f = rate_fit(ns, inv_sq);
    CHECK(f.slope == doctest::Approx(-2.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.points == 5);
    CHECK(rate_fit(ns, flat).slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_WITH_AS((void)rate_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}), doctest::Contains("DegenerateFit"),
                         Error);
    CHECK_THROWS_AS((void)rate_fit(ns, std::vector<double>{1, 2, 0, 4, 5}), Error);
    std::vector<double> floors(ns.size(), 0.0);
    floors[4] = 1.0;
    auto noisy = inv_sq;
    noisy[4] = 0.5;
    CHECK(rate_fit(ns, noisy, floors).slope == doctest::Approx(-2.0));
    CHECK(rate_fit(ns, noisy, floors).points == 4);
}

TEST_CASE("Poisson approximation rate on the exact pipeline") {
    const LocalConfig center(kLine, 1, {{0}});
    std::vector<double> ns, tvs;
    for (int n = 8; n <= 20; n += 2) {
        const auto law = exact_law(n, schedule_field(n, 1), 0.0, center, MatchMode::exact_match);
        ns.push_back(n);
        tvs.push_back(tv_distance(law, PoissonTarget(1.0)).value);
    }
    for (std::size_t i = 1; i < tvs.size(); ++i) CHECK(tvs[i] < tvs[i - 1]);
    const auto fit = rate_fit(ns, tvs);
    CHECK(fit.slope >= -1.5);
    CHECK(fit.slope <= -0.5);
}

TEST_CASE("expected counts respect the upper Poisson parameter") {
    for (const auto& motif : {LocalConfig(kLine, 1, {{0}}), LocalConfig(kLine, 2, {{-1}, {0}})}) {
        REQUIRE(is_clean(motif));
        for (double c : {0.5, 2.0}) {
            for (double b : {-0.3, 0.0, 0.4}) {
                for (int n = 7; n <= 15; n += 4) {
                    const auto law = exact_law(n, FieldSchedule(c, k(motif), 1).field(n), b, motif, MatchMode::exact_match);
                    CHECK(law.mean() <= std::pow(c, k(motif)) * std::exp(-2 * b * perimeter(motif)) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("second factorial moment of the increasing count approaches lambda squared") {
    const LocalConfig center(kLine, 1, {{0}});
    for (double b : {0.0, 0.4}) {
        double previous = 1e9;
        for (int n = 8; n <= 16; n += 2) {
            const auto law = exact_law(n, schedule_field(n, 1), b, center, MatchMode::superset_match);
            const double lambda = std::exp(-4 * b);
            const double gap = std::abs(law.factorial_moment(2) - lambda * lambda);
            CHECK(gap < previous);
            previous = gap;
        }
    }
}

TEST_CASE("ring equivalence") {
    const LocalConfig center(kLine, 1, {{0}});
    for (double b : {-0.3, 0.4}) {
        std::vector<RingReport> reps;
        for (int n = 8; n <= 18; n += 2) {
            reps.push_back(ring_equivalence_check(ExactMeasure::build(line(n), {schedule_field(n, 1), b}), center));
        }
        CHECK(reps.back().tv < reps.front().tv);
        CHECK(reps.back().mean_diff < reps.front().mean_diff);
        if (b > 0) {
            for (std::size_t i = 1; i < reps.size(); ++i) CHECK(reps[i].tv < reps[i - 1].tv);
        }
        for (const auto& r : reps) {
            CHECK(r.mean_ringed <= r.mean_motif);
            CHECK(r.mean_diff == doctest::Approx(r.mean_motif - r.mean_ringed));
        }
    }
    const auto measure = ExactMeasure::build(line(8), {-1.0, 0.0});
    CHECK_THROWS_AS((void)ring_equivalence_check(measure, LocalConfig::null(kLine, 1)), Error);
    CHECK_THROWS_AS((void)ring_equivalence_check(measure, LocalConfig(kLine, 3, {{0}})), Error);
}
