#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "isingpa/lattice.hpp"
#include "isingpa/local_config.hpp"
#include "isingpa/spin_config.hpp"

namespace isingpa {

/// Magnetic field a and pair potential b.
struct ModelParams {
    double a = 0.0;
    double b = 0.0;

    void validate() const;
};

/// e^{2 a(n)} = c * n^{-d / k_target}.
class FieldSchedule {
public:
    /// Throws InvalidSchedule unless c > 0, k_target >= 1 and d >= 1.
    FieldSchedule(double c, int k_target, int d);

    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] int k_target() const noexcept { return k_target_; }
    [[nodiscard]] int d() const noexcept { return d_; }

    [[nodiscard]] double field(int n) const;
    [[nodiscard]] ModelParams params(int n, double b) const { return {field(n), b}; }

private:
    double c_;
    int k_target_;
    int d_;
};

/// Exponent of the Gibbs weight: a * sum sigma(x) + b * sum_{edges} sigma(x) sigma(y).
[[nodiscard]] double hamiltonian(const SpinConfig& cfg, const ModelParams& params);

/// Exact enumeration limit in sites: ISINGPA_EXACT_MAX_SITES if set, else 24.
[[nodiscard]] std::size_t exact_site_cap();

/// Full table of the Gibbs measure mu_{a,b} on a small torus. Configurations
/// are indexed by bit patterns (bit s set = site s positive). Immutable after
/// build.
class ExactMeasure {
public:
    static ExactMeasure build(std::shared_ptr<const TorusLattice> lat, const ModelParams& params,
                              std::size_t site_cap = exact_site_cap());

    [[nodiscard]] const TorusLattice& lattice() const noexcept { return *lat_; }
    [[nodiscard]] const std::shared_ptr<const TorusLattice>& lattice_ptr() const noexcept { return lat_; }
    [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
    [[nodiscard]] double log_z() const noexcept { return log_z_; }
    [[nodiscard]] std::size_t state_count() const noexcept { return log_weights_.size(); }

    [[nodiscard]] double log_weight(std::uint64_t state) const { return log_weights_[state]; }
    [[nodiscard]] double probability(std::uint64_t state) const { return probs_[state]; }
    [[nodiscard]] double probability(const SpinConfig& cfg) const { return probs_[cfg.to_bits()]; }
    [[nodiscard]] const std::vector<double>& probabilities() const noexcept { return probs_; }

    [[nodiscard]] SpinConfig config(std::uint64_t state) const { return SpinConfig::from_bits(lat_, state); }

    /// E[f] for f(state) -> double.
    template <typename F>
    [[nodiscard]] double expectation(F&& f) const {
        double acc = 0.0;
        for (std::uint64_t s = 0; s < probs_.size(); ++s) acc += probs_[s] * static_cast<double>(f(s));
        return acc;
    }

    template <typename F>
    [[nodiscard]] double variance(F&& f) const {
        double m1 = 0.0, m2 = 0.0;
        for (std::uint64_t s = 0; s < probs_.size(); ++s) {
            const double v = static_cast<double>(f(s));
            m1 += probs_[s] * v;
            m2 += probs_[s] * v * v;
        }
        return m2 - m1 * m1;
    }

    /// mu(event | spins fixed by `given`), by direct summation over the
    /// unfixed sites.
    template <typename F>
    [[nodiscard]] double conditional_probability(F&& event, const PartialSpins& given) const {
        const auto [mask, value] = fixed_bits(given);
        double num = 0.0, den = 0.0;
        for (std::uint64_t s = 0; s < probs_.size(); ++s) {
            if ((s & mask) != value) continue;
            den += probs_[s];
            if (event(s)) num += probs_[s];
        }
        return num / den;
    }

private:
    ExactMeasure() = default;
    [[nodiscard]] std::pair<std::uint64_t, std::uint64_t> fixed_bits(const PartialSpins& given) const;

    std::shared_ptr<const TorusLattice> lat_;
    ModelParams params_;
    double log_z_ = 0.0;
    std::vector<double> log_weights_;
    std::vector<double> probs_;
};

/// Spin (+1/-1) of site s in an enumeration state.
[[nodiscard]] inline int spin_of(std::uint64_t state, Site s) { return ((state >> s) & 1U) ? 1 : -1; }

/// H^{B(x,r)}: field term over B(x, r) plus pair term over every edge with at
/// least one endpoint in B(x, r). Throws MissingSpin unless all of
/// B(x, r + 1) is specified.
[[nodiscard]] double local_energy(const TorusLattice& lat, const PartialSpins& closure, Site x, int r,
                                  const ModelParams& params);

/// mu(I_x^eta = 1 | sigma on delta B(x, r)) by enumerating all 2^beta(r)
/// motifs in the log domain.
[[nodiscard]] double conditional_motif_probability(const TorusLattice& lat, Site x, const LocalConfig& cfg,
                                                   const PartialSpins& boundary, const ModelParams& params,
                                                   std::size_t cap = default_family_cap());

struct SandwichReport {
    int n = 0;
    double lambda = 0.0;              // c^k e^{-2 b gamma}
    double max_scaled = 0.0;          // max over boundaries of n^d mu(I = 1 | sigma)
    double worst_lower_ratio = 0.0;   // min over boundaries of n^d mu / lambda
    double max_upper_excess = 0.0;    // max of n^d mu - lambda
    bool upper_holds = false;         // max_upper_excess <= 1e-12
    std::size_t boundary_count = 0;
};

/// Exhaustive check of the two-sided bound on n^d mu(I_x = 1 | boundary) for
/// a clean motif with the field taken from the schedule.
[[nodiscard]] SandwichReport check_conditional_sandwich(const TorusLattice& lat, const LocalConfig& cfg,
                                                        const FieldSchedule& schedule, double b);

/// logsumexp with max shift.
[[nodiscard]] double log_sum_exp(const std::vector<double>& values);

}  // namespace isingpa
