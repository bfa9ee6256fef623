#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "isingpa/gibbs_exact.hpp"
#include "isingpa/spin_config.hpp"

namespace isingpa {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the independent stream for (seed, index): mix64(seed ^ mix64(index + 1)).
/// Part of the reproducibility contract for batches and CFTP epochs.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) from the top 53 bits.
[[nodiscard]] inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct ChainState {
    SpinConfig config;
    Rng rng;
    std::uint64_t sweep_count = 0;

    ChainState(SpinConfig cfg, std::uint64_t seed) : config(std::move(cfg)), rng(seed) {}
};

enum class SamplerKind { heat_bath, metropolis, cftp };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::heat_bath;
    int burn_in_sweeps = 100;  // 100 * n^d single-site updates
    int thinning_sweeps = 1;
    std::uint64_t seed = 0;
    int chains = 8;                              // independent chains for approximate kernels
    std::uint64_t max_cftp_sweeps = 1ULL << 20;  // CoalescenceTimeout beyond this horizon

    void validate() const;
};

/// Heat-bath probability that site x becomes +1 given its neighbors:
/// e^h / (e^h + e^-h), h = a + b * (neighbor spin sum).
[[nodiscard]] double heat_bath_plus_probability(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x,
                                                const ModelParams& params);

/// One heat-bath update of site x driven by the uniform u: +1 iff u < p_plus.
/// With b >= 0 this map is monotone in the spins for a shared u.
void heat_bath_update(std::span<std::int8_t> spins, const TorusLattice& lat, Site x, double u, const ModelParams& params);

/// Change of the Gibbs exponent when the spin at x is flipped:
/// -2 s (a + b * neighbor sum).
[[nodiscard]] double flip_delta(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x,
                                const ModelParams& params);

/// Metropolis acceptance min(1, e^{delta}) of flipping x.
[[nodiscard]] double metropolis_acceptance(std::span<const std::int8_t> spins, const TorusLattice& lat, Site x,
                                           const ModelParams& params);

/// One systematic scan over all sites in site order.
void heat_bath_sweep(ChainState& state, const ModelParams& params);
void metropolis_sweep(ChainState& state, const ModelParams& params);

/// Exact draw from mu_{a,b} by monotone coupling from the past. Requires b >= 0.
[[nodiscard]] SpinConfig cftp_sample(std::shared_ptr<const TorusLattice> lat, const ModelParams& params,
                                     std::uint64_t seed, std::uint64_t max_sweeps = 1ULL << 20);

/// `count` configurations under the field a(n) from the schedule. Output is
/// a pure function of (lattice, schedule, b, spec, count); `jobs` only sets
/// the thread count.
[[nodiscard]] std::vector<SpinConfig> sample_batch(std::shared_ptr<const TorusLattice> lat, const FieldSchedule& schedule,
                                                   double b, const SamplerSpec& spec, std::size_t count,
                                                   unsigned jobs = 1);

/// Same, with explicit model parameters.
[[nodiscard]] std::vector<SpinConfig> sample_batch(std::shared_ptr<const TorusLattice> lat, const ModelParams& params,
                                                   const SamplerSpec& spec, std::size_t count, unsigned jobs = 1);

}  // namespace isingpa
