#include "isingpa/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "isingpa/error.hpp"

namespace isingpa {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept { return mix64(seed ^ mix64(index + 1)); }

void SamplerSpec::validate() const {
    if (burn_in_sweeps < 0 || thinning_sweeps < 0) throw Error(ErrorKind::InvalidArgument, "burn-in and thinning must be >= 0");
    if (chains < 1) throw Error(ErrorKind::InvalidArgument, "chains must be >= 1");
    if (max_cftp_sweeps < 1) throw Error(ErrorKind::InvalidArgument, "CFTP horizon must be >= 1");
}

namespace {

int neighbor_sum(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x) {
    int sum = 0;
    for (Site y : lat.neighbor_sites(x)) sum += spins[y];
    return sum;
}

double plus_probability(double h) { return 1.0 / (1.0 + std::exp(-2.0 * h)); }

// p_plus indexed by neighbor sum + coordination.
std::vector<double> heat_bath_table(const TorusLattice& lat, const ModelParams& params) {
    const int z = lat.coordination();
    std::vector<double> table(static_cast<std::size_t>(2 * z + 1));
    for (int s = -z; s <= z; ++s) table[static_cast<std::size_t>(s + z)] = plus_probability(params.a + params.b * s);
    return table;
}

void heat_bath_scan(std::span<std::int8_t> spins, const TorusLattice& lat, const std::vector<double>& table, Rng& rng) {
    const int z = lat.coordination();
    for (Site x = 0; x < spins.size(); ++x) {
        const double u = uniform01(rng);
        spins[x] = u < table[static_cast<std::size_t>(neighbor_sum(spins, lat, x) + z)] ? 1 : -1;
    }
}

}  // namespace

double heat_bath_plus_probability(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x,
                                  const ModelParams& params) {
    return plus_probability(params.a + params.b * neighbor_sum(spins, lat, x));
}

void heat_bath_update(std::span<std::int8_t> spins, const TorusLattice& lat, Site x, double u, const ModelParams& params) {
    spins[x] = u < heat_bath_plus_probability(spins, lat, x, params) ? 1 : -1;
}

double flip_delta(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x, const ModelParams& params) {
    return -2.0 * spins[x] * (params.a + params.b * neighbor_sum(spins, lat, x));
}

double metropolis_acceptance(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x,
                             const ModelParams& params) {
    return std::min(1.0, std::exp(flip_delta(spins, lat, x, params)));
}

void heat_bath_sweep(ChainState& state, const ModelParams& params) {
    const auto& lat = state.config.lattice();
    heat_bath_scan(state.config.spins(), lat, heat_bath_table(lat, params), state.rng);
    ++state.sweep_count;
}

void metropolis_sweep(ChainState& state, const ModelParams& params) {
    const auto& lat = state.config.lattice();
    auto spins = state.config.spins();
    for (Site x = 0; x < spins.size(); ++x) {
        const double u = uniform01(state.rng);
        if (u < metropolis_acceptance(spins, lat, x, params)) spins[x] = static_cast<std::int8_t>(-spins[x]);
    }
    ++state.sweep_count;
}

SpinConfig cftp_sample(std::shared_ptr<const TorusLattice> lat, const ModelParams& params, std::uint64_t seed,
                       std::uint64_t max_sweeps) {
    params.validate();
    if (params.b < 0.0) throw Error(ErrorKind::AntiferromagneticUnsupported, "monotone CFTP needs b >= 0");
    const auto table = heat_bath_table(*lat, params);
    SpinConfig upper(lat, 1), lower(lat, -1);

    // Epoch j starts at time -2^j. Block i covers [-2^i, -2^(i-1)) (block 0
    // is the last sweep) and always replays the stream derive_seed(seed, i).
    for (int j = 0;; ++j) {
        const std::uint64_t horizon = std::uint64_t{1} << j;
        if (horizon > max_sweeps) {
            throw Error(ErrorKind::CoalescenceTimeout, "no coalescence within " + std::to_string(max_sweeps) + " sweeps");
        }
        std::fill(upper.spins().begin(), upper.spins().end(), std::int8_t{1});
        std::fill(lower.spins().begin(), lower.spins().end(), std::int8_t{-1});
        for (int i = j; i >= 0; --i) {
            const std::uint64_t sweeps = i == 0 ? 1 : std::uint64_t{1} << (i - 1);
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
            const int z = lat->coordination();
            auto up = upper.spins();
            auto lo = lower.spins();
            for (std::uint64_t t = 0; t < sweeps; ++t) {
                for (Site x = 0; x < up.size(); ++x) {
                    const double u = uniform01(rng);
                    up[x] = u < table[static_cast<std::size_t>(neighbor_sum(up, *lat, x) + z)] ? 1 : -1;
                    lo[x] = u < table[static_cast<std::size_t>(neighbor_sum(lo, *lat, x) + z)] ? 1 : -1;
                }
            }
        }
        if (upper == lower) return upper;
    }
}

std::vector<SpinConfig> sample_batch(std::shared_ptr<const TorusLattice> lat, const FieldSchedule& schedule, double b,
                                     const SamplerSpec& spec, std::size_t count, unsigned jobs) {
    if (schedule.d() != lat->d()) throw Error(ErrorKind::InvalidSchedule, "schedule dimension differs from lattice");
    return sample_batch(lat, schedule.params(lat->n(), b), spec, count, jobs);
}

std::vector<SpinConfig> sample_batch(std::shared_ptr<const TorusLattice> lat, const ModelParams& params,
                                     const SamplerSpec& spec, std::size_t count, unsigned jobs) {
    spec.validate();
    params.validate();
    if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be >= 1");
    if (spec.kind == SamplerKind::cftp && params.b < 0.0) {
        throw Error(ErrorKind::AntiferromagneticUnsupported, "monotone CFTP needs b >= 0");
    }
    std::vector<SpinConfig> out(count, SpinConfig(lat));
    const std::size_t units = spec.kind == SamplerKind::cftp ? count : std::min<std::size_t>(count, spec.chains);

    auto run_unit = [&](std::size_t unit) {
        if (spec.kind == SamplerKind::cftp) {
            out[unit] = cftp_sample(lat, params, derive_seed(spec.seed, unit), spec.max_cftp_sweeps);
            return;
        }
        ChainState state(SpinConfig(lat, -1), derive_seed(spec.seed, unit));
        auto sweep = [&] {
            if (spec.kind == SamplerKind::heat_bath) heat_bath_sweep(state, params);
            else metropolis_sweep(state, params);
        };
        for (int t = 0; t < spec.burn_in_sweeps; ++t) sweep();
        for (std::size_t i = unit; i < count; i += units) {
            if (i != unit) {
                for (int t = 0; t < spec.thinning_sweeps; ++t) sweep();
            }
            out[i] = state.config;
        }
    };

    const unsigned workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(units)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t u = next++; u < units; u = next++) {
                try {
                    run_unit(u);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace isingpa
