#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "isingpa/error.hpp"
#include "isingpa/gibbs_exact.hpp"
#include "isingpa/sampler.hpp"
#include "oracles.hpp"

using namespace isingpa;

namespace {

std::shared_ptr<const TorusLattice> torus(int d, int n, Norm norm = Norm::lp(1)) {
    return std::make_shared<const TorusLattice>(d, n, 1, norm);
}

double tv_against(const ExactMeasure& m, const std::vector<SpinConfig>& samples) {
    std::vector<double> freq(m.state_count(), 0.0);
    for (const auto& s : samples) freq[s.to_bits()] += 1.0 / static_cast<double>(samples.size());
    double acc = 0;
    for (std::size_t s = 0; s < freq.size(); ++s) acc += std::abs(freq[s] - m.probability(s));
    return 0.5 * acc;
}

SpinConfig random_config(const std::shared_ptr<const TorusLattice>& lat, std::mt19937_64& rng) {
    std::vector<std::int8_t> v(lat->site_count());
    for (auto& s : v) s = (rng() & 1U) ? 1 : -1;
    return SpinConfig(lat, v);
}

}  // namespace

TEST_CASE("stream derivation is the documented splitmix rule") {
    auto splitmix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    for (std::uint64_t s : {0ULL, 1ULL, 123456789ULL}) {
        for (std::uint64_t i : {0ULL, 5ULL}) CHECK(derive_seed(s, i) == splitmix(s ^ splitmix(i + 1)));
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
}

TEST_CASE("flip delta matches the hamiltonian difference") {
    std::mt19937_64 rng(1);
    for (const auto& [d, n, norm] : {std::tuple{1, 9, Norm::lp(1)}, std::tuple{2, 5, Norm::infinity()}, std::tuple{2, 4, Norm::lp(1)}}) {
        const auto lat = torus(d, n, norm);
        for (int t = 0; t < 50; ++t) {
            auto cfg = random_config(lat, rng);
            const ModelParams p{std::uniform_real_distribution<>(-2, 2)(rng), std::uniform_real_distribution<>(-2, 2)(rng)};
            const Site x = static_cast<Site>(rng() % lat->site_count());
            const double before = hamiltonian(cfg, p);
            const double delta = flip_delta(cfg.spins(), *lat, x, p);
            cfg.flip(x);
            CHECK(delta == doctest::Approx(hamiltonian(cfg, p) - before));
        }
    }
}

TEST_CASE("metropolis accepts everything at a = b = 0") {
    const auto lat = torus(1, 8);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto cfg = random_config(lat, rng);
        for (Site x = 0; x < lat->site_count(); ++x) CHECK(metropolis_acceptance(cfg.spins(), *lat, x, {0, 0}) == 1.0);
    }
}

TEST_CASE("heat bath at b = 0 gives the product law") {
    const auto lat = torus(1, 8);
    const double a = -0.4;
    const double p = std::exp(a) / (std::exp(a) + std::exp(-a));
    ChainState st(SpinConfig(lat, -1), 99);
    const int sweeps = 100000;
    std::vector<int> plus(lat->site_count(), 0);
    for (int t = 0; t < sweeps; ++t) {
        heat_bath_sweep(st, {a, 0});
        for (Site x = 0; x < lat->site_count(); ++x) plus[x] += st.config[x] > 0;
    }
    const double se = std::sqrt(p * (1 - p) / sweeps);
    for (int c : plus) CHECK(std::abs(static_cast<double>(c) / sweeps - p) < 3 * se);
    CHECK(st.sweep_count == static_cast<std::uint64_t>(sweeps));
}

TEST_CASE("strong negative field empties the lattice in one sweep") {
    const auto lat = torus(2, 8);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ChainState st(SpinConfig(lat, 1), seed);
        heat_bath_sweep(st, {-30, 0});
        CHECK(st.config == SpinConfig(lat, -1));
    }
}

TEST_CASE("approximate kernels reproduce the exact law") {
    const auto lat = torus(1, 4);
    const ModelParams p{0.3, 0.5};
    const auto exact = ExactMeasure::build(lat, p);
    for (auto kind : {SamplerKind::heat_bath, SamplerKind::metropolis}) {
        SamplerSpec spec;
        spec.kind = kind;
        spec.seed = 7;
        spec.thinning_sweeps = 2;
        const auto samples = sample_batch(lat, p, spec, 1000000, 8);
        CHECK(tv_against(exact, samples) < 0.01);
    }
}

TEST_CASE("CFTP draws are exact") {
    {
        const auto lat = torus(1, 4);
        const ModelParams p{0.3, 0.5};
        SamplerSpec spec;
        spec.kind = SamplerKind::cftp;
        spec.seed = 11;
        const auto samples = sample_batch(lat, p, spec, 100000, 8);
        CHECK(tv_against(ExactMeasure::build(lat, p), samples) < 0.01);
    }
    {
        // b = 0: independent sites. Per-site chi-square with 64 degrees of
        // freedom; the 1% critical value is 93.22.
        const auto lat = torus(2, 8);
        const double a = 0.35;
        const double p = std::exp(a) / (std::exp(a) + std::exp(-a));
        SamplerSpec spec;
        spec.kind = SamplerKind::cftp;
        spec.seed = 12;
        const std::size_t draws = 10000;
        const auto samples = sample_batch(lat, {a, 0}, spec, draws, 8);
        std::vector<double> plus(lat->site_count(), 0);
        for (const auto& s : samples) {
            for (Site x = 0; x < lat->site_count(); ++x) plus[x] += s[x] > 0;
        }
        double chi2 = 0;
        for (double c : plus) chi2 += (c - draws * p) * (c - draws * p) / (draws * p * (1 - p));
        CHECK(chi2 < 93.22);
    }
}

TEST_CASE("CFTP failure modes") {
    const auto lat = torus(1, 6);
    CHECK_THROWS_WITH_AS((void)cftp_sample(lat, {0, -0.1}, 1), doctest::Contains("AntiferromagneticUnsupported"), Error);
    SamplerSpec spec;
    spec.kind = SamplerKind::cftp;
    CHECK_THROWS_AS((void)sample_batch(lat, ModelParams{0, -0.1}, spec, 3), Error);
    const auto big = torus(2, 8);
    CHECK_THROWS_WITH_AS((void)cftp_sample(big, {0, 2.0}, 1, 4), doctest::Contains("CoalescenceTimeout"), Error);
}

TEST_CASE("reversibility of the single-site kernels, exhaustively") {
    for (const auto& [d, n, norm] :
         {std::tuple{1, 12, Norm::lp(1)}, std::tuple{2, 3, Norm::lp(1)}, std::tuple{2, 3, Norm::infinity()}}) {
        const auto lat = torus(d, n, norm);
        for (const ModelParams p : {ModelParams{0.3, 0.5}, ModelParams{-0.8, -0.4}, ModelParams{1.2, 0.0}}) {
            const auto m = ExactMeasure::build(lat, p);
            const std::size_t v = lat->site_count();
            double worst_hb = 0, worst_mh = 0;
            for (std::uint64_t s = 0; s < m.state_count(); ++s) {
                const auto cfg = m.config(s);
                for (Site x = 0; x < v; ++x) {
                    const std::uint64_t t = s ^ (std::uint64_t{1} << x);
                    const auto other = m.config(t);
                    const double hp_s = heat_bath_plus_probability(cfg.spins(), *lat, x, p);
                    const double hp_t = heat_bath_plus_probability(other.spins(), *lat, x, p);
                    // Probability of moving s -> t and t -> s under the update of site x.
                    const double fwd = cfg[x] > 0 ? 1 - hp_s : hp_s;
                    const double bwd = other[x] > 0 ? 1 - hp_t : hp_t;
                    worst_hb = std::max(worst_hb, std::abs(m.probability(s) * fwd - m.probability(t) * bwd));
                    const double mf = metropolis_acceptance(cfg.spins(), *lat, x, p);
                    const double mb = metropolis_acceptance(other.spins(), *lat, x, p);
                    worst_mh = std::max(worst_mh, std::abs(m.probability(s) * mf - m.probability(t) * mb));
                }
            }
            CHECK(worst_hb < 1e-10);
            CHECK(worst_mh < 1e-10);
        }
    }
}

TEST_CASE("heat-bath updates preserve the partial order when b >= 0") {
    std::mt19937_64 rng(31);
    for (const auto& [d, n, norm] : {std::tuple{1, 10, Norm::lp(1)}, std::tuple{2, 6, Norm::infinity()}}) {
        const auto lat = torus(d, n, norm);
        for (double b : {0.0, 0.4, 1.5}) {
            const ModelParams p{std::uniform_real_distribution<>(-1, 1)(rng), b};
            for (int t = 0; t < 200; ++t) {
                auto lo = random_config(lat, rng);
                auto hi = lo;
                for (Site x = 0; x < lat->site_count(); ++x) {
                    if (rng() & 1U) hi.set(x, 1);
                }
                REQUIRE(lo.below(hi));
                for (int step = 0; step < 3 * static_cast<int>(lat->site_count()); ++step) {
                    const Site x = static_cast<Site>(rng() % lat->site_count());
                    const double u = std::uniform_real_distribution<>(0, 1)(rng);
                    heat_bath_update(lo.spins(), *lat, x, u, p);
                    heat_bath_update(hi.spins(), *lat, x, u, p);
                    CHECK(lo.below(hi));
                }
            }
        }
    }
}

TEST_CASE("batches are deterministic and thread-count independent") {
    const auto lat = torus(2, 8);
    for (auto kind : {SamplerKind::heat_bath, SamplerKind::metropolis, SamplerKind::cftp}) {
        SamplerSpec spec;
        spec.kind = kind;
        spec.seed = 42;
        spec.burn_in_sweeps = 10;
        const FieldSchedule sched(1.0, 1, 2);
        const auto a = sample_batch(lat, sched, 0.2, spec, 100, 1);
        const auto b = sample_batch(lat, sched, 0.2, spec, 100, 8);
        CHECK(a == b);
        spec.seed = 43;
        const auto c = sample_batch(lat, sched, 0.2, spec, 100, 4);
        CHECK(a != c);
    }
}

TEST_CASE("sample_batch applies the schedule field") {
    const auto lat = torus(2, 16);
    const FieldSchedule sched(1.0, 1, 2);
    CHECK(sched.params(16, 0.0).a == doctest::Approx(0.5 * std::log(1.0 / 256)));
    SamplerSpec spec;
    spec.seed = 5;
    spec.burn_in_sweeps = 20;
    const auto with_schedule = sample_batch(lat, sched, 0.1, spec, 10);
    const auto explicit_params = sample_batch(lat, ModelParams{0.5 * std::log(1.0 / 256), 0.1}, spec, 10);
    CHECK(with_schedule == explicit_params);
    CHECK_THROWS_AS((void)sample_batch(lat, FieldSchedule(1.0, 1, 1), 0.1, spec, 10), Error);
}

TEST_CASE("sampler spec validation") {
    const auto lat = torus(1, 6);
    SamplerSpec spec;
    spec.chains = 0;
    CHECK_THROWS_AS((void)sample_batch(lat, ModelParams{0, 0}, spec, 3), Error);
    spec = SamplerSpec{};
    spec.burn_in_sweeps = -1;
    CHECK_THROWS_AS((void)sample_batch(lat, ModelParams{0, 0}, spec, 3), Error);
    CHECK_THROWS_AS((void)sample_batch(lat, ModelParams{0, 0}, SamplerSpec{}, 0), Error);
}

TEST_CASE("snapshot round trip") {
    std::mt19937_64 rng(8);
    for (const auto& [d, n] : {std::pair{1, 13}, std::pair{2, 5}, std::pair{2, 8}}) {
        const auto lat = torus(d, n, Norm::infinity());
        const auto cfg = random_config(lat, rng);
        std::stringstream buf;
        write_snapshot(buf, cfg);
        const std::string bytes = buf.str();
        const std::string header = std::to_string(d) + " " + std::to_string(n) + " 1 inf\n";
        CHECK(bytes.substr(0, header.size()) == header);
        CHECK(bytes.size() == header.size() + (lat->site_count() + 7) / 8);
        const auto first = static_cast<unsigned char>(bytes[header.size()]);
        CHECK(((first >> 7) & 1U) == (cfg[0] > 0 ? 1U : 0U));
        const auto back = read_snapshot(buf);
        CHECK(back == cfg);
        CHECK(back.lattice().signature() == lat->signature());
    }
    std::stringstream bad("1 8 1 1\n");
    CHECK_THROWS_AS((void)read_snapshot(bad), Error);
}
