#include "isingpa/gibbs_exact.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <thread>

#include "isingpa/error.hpp"

namespace isingpa {

void ModelParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorKind::InvalidArgument, "model parameters must be finite");
}

FieldSchedule::FieldSchedule(double c, int k_target, int d) : c_(c), k_target_(k_target), d_(d) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::InvalidSchedule, "c must be a positive finite real");
    if (k_target < 1) throw Error(ErrorKind::InvalidSchedule, "k_target must be >= 1");
    if (d < 1) throw Error(ErrorKind::InvalidSchedule, "d must be >= 1");
}

double FieldSchedule::field(int n) const {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    return 0.5 * (std::log(c_) - static_cast<double>(d_) / k_target_ * std::log(static_cast<double>(n)));
}

double hamiltonian(const SpinConfig& cfg, const ModelParams& params) {
    double field = 0.0;
    for (auto s : cfg.spins()) field += s;
    double pair = 0.0;
    for (const auto& [x, y] : cfg.lattice().edges()) pair += cfg[x] * cfg[y];
    return params.a * field + params.b * pair;
}

std::size_t exact_site_cap() {
    if (const char* env = std::getenv("ISINGPA_EXACT_MAX_SITES")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v < 40) return static_cast<std::size_t>(v);
    }
    return 24;
}

double log_sum_exp(const std::vector<double>& values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(values.begin(), values.end());
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

ExactMeasure ExactMeasure::build(std::shared_ptr<const TorusLattice> lat, const ModelParams& params,
                                 std::size_t site_cap) {
    params.validate();
    const std::size_t sites = lat->site_count();
    if (sites > site_cap || sites > 34) {
        throw Error(ErrorKind::TooLargeForExact,
                    "n^d=" + std::to_string(sites) + " exceeds exact cap " + std::to_string(site_cap));
    }
    ExactMeasure m;
    m.lat_ = std::move(lat);
    m.params_ = params;
    const std::uint64_t states = std::uint64_t{1} << sites;
    m.log_weights_.resize(states);

    std::vector<std::uint64_t> edge_masks;
    edge_masks.reserve(m.lat_->edges().size());
    for (const auto& [x, y] : m.lat_->edges()) edge_masks.push_back((std::uint64_t{1} << x) | (std::uint64_t{1} << y));
    const double n_sites = static_cast<double>(sites);
    const double n_edges = static_cast<double>(edge_masks.size());

    // Fixed chunking so the reduction order never depends on thread count.
    constexpr std::uint64_t kChunks = 64;
    const std::uint64_t chunk = (states + kChunks - 1) / kChunks;
    std::vector<double> chunk_max(kChunks, -std::numeric_limits<double>::infinity());
    std::vector<double> chunk_sum(kChunks, 0.0);

    auto fill = [&](std::uint64_t c) {
        const std::uint64_t lo = c * chunk, hi = std::min(states, lo + chunk);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::uint64_t s = lo; s < hi; ++s) {
            int disagree = 0;
            for (auto em : edge_masks) disagree += std::popcount(s & em) == 1;
            const double plus = std::popcount(s);
            const double w = params.a * (2.0 * plus - n_sites) + params.b * (n_edges - 2.0 * disagree);
            m.log_weights_[s] = w;
            mx = std::max(mx, w);
        }
        chunk_max[c] = mx;
    };
    auto run_parallel = [&](auto&& task) {
        const unsigned workers = states < 4096 ? 1U : std::max(1U, std::min(8U, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t c = w; c < kChunks; c += workers) task(c);
            });
        }
        for (auto& t : pool) t.join();
    };
    run_parallel(fill);

    const double global_max = *std::max_element(chunk_max.begin(), chunk_max.end());
    run_parallel([&](std::uint64_t c) {
        const std::uint64_t lo = c * chunk, hi = std::min(states, lo + chunk);
        double acc = 0.0;
        for (std::uint64_t s = lo; s < hi; ++s) acc += std::exp(m.log_weights_[s] - global_max);
        chunk_sum[c] = acc;
    });
    double total = 0.0;
    for (double v : chunk_sum) total += v;
    m.log_z_ = global_max + std::log(total);

    m.probs_.resize(states);
    for (std::uint64_t s = 0; s < states; ++s) m.probs_[s] = std::exp(m.log_weights_[s] - m.log_z_);
    return m;
}

std::pair<std::uint64_t, std::uint64_t> ExactMeasure::fixed_bits(const PartialSpins& given) const {
    if (given.values.size() != lat_->site_count()) throw Error(ErrorKind::InvalidArgument, "partial spins sized for another lattice");
    std::uint64_t mask = 0, value = 0;
    for (Site s = 0; s < given.values.size(); ++s) {
        if (!given.has(s)) continue;
        mask |= std::uint64_t{1} << s;
        if (given.get(s) > 0) value |= std::uint64_t{1} << s;
    }
    return {mask, value};
}

double local_energy(const TorusLattice& lat, const PartialSpins& closure, Site x, int r, const ModelParams& params) {
    const auto dist = lat.distances_from(x);
    auto spin = [&](Site s) {
        if (!closure.has(s)) throw Error(ErrorKind::MissingSpin, "site " + std::to_string(s) + " of the closure is unspecified");
        return static_cast<double>(closure.get(s));
    };
    double field = 0.0;
    for (Site s = 0; s < lat.site_count(); ++s) {
        if (dist[s] <= r + 1) spin(s);  // closure must be complete
        if (dist[s] <= r) field += spin(s);
    }
    double pair = 0.0;
    for (const auto& [y, z] : lat.edges()) {
        if (dist[y] <= r || dist[z] <= r) pair += spin(y) * spin(z);
    }
    return params.a * field + params.b * pair;
}

namespace {

// Local energies of every motif placed at x against a fixed boundary.
class LocalEnergyTable {
public:
    LocalEnergyTable(const TorusLattice& lat, Site x, const BallShape& shape) {
        sites_ = lat.place(x, shape);
        std::vector<int> slot(lat.site_count(), -1);
        for (std::size_t i = 0; i < sites_.size(); ++i) slot[sites_[i]] = static_cast<int>(i);
        for (const auto& [y, z] : lat.edges()) {
            const int iy = slot[y], iz = slot[z];
            if (iy >= 0 && iz >= 0) {
                internal_.emplace_back(iy, iz);
            } else if (iy >= 0 || iz >= 0) {
                const int inside = iy >= 0 ? iy : iz;
                const Site outside = iy >= 0 ? z : y;
                auto it = std::find(boundary_.begin(), boundary_.end(), outside);
                int bidx;
                if (it == boundary_.end()) {
                    bidx = static_cast<int>(boundary_.size());
                    boundary_.push_back(outside);
                } else {
                    bidx = static_cast<int>(it - boundary_.begin());
                }
                crossing_.emplace_back(inside, bidx);
            }
        }
    }

    [[nodiscard]] const std::vector<Site>& boundary_sites() const { return boundary_; }

    /// Log-weights of all 2^beta ball patterns (bit i = ball member i positive).
    [[nodiscard]] std::vector<double> energies(const std::vector<std::int8_t>& boundary_spins,
                                               const ModelParams& params) const {
        const std::size_t beta = sites_.size();
        std::vector<double> h(beta, 0.0);
        for (const auto& [i, bidx] : crossing_) h[static_cast<std::size_t>(i)] += boundary_spins[static_cast<std::size_t>(bidx)];
        std::vector<double> out(std::size_t{1} << beta);
        for (std::uint64_t m = 0; m < out.size(); ++m) {
            double field = 0.0, pair = 0.0;
            for (std::size_t i = 0; i < beta; ++i) {
                const double s = ((m >> i) & 1U) ? 1.0 : -1.0;
                field += s;
                pair += s * h[i];
            }
            for (const auto& [i, j] : internal_) {
                pair += (((m >> i) ^ (m >> j)) & 1U) ? -1.0 : 1.0;
            }
            out[m] = params.a * field + params.b * pair;
        }
        return out;
    }

private:
    std::vector<Site> sites_;
    std::vector<std::pair<int, int>> internal_;
    std::vector<std::pair<int, int>> crossing_;
    std::vector<Site> boundary_;
};

std::uint64_t motif_bits(const LocalConfig& cfg) {
    std::uint64_t bits = 0;
    for (int i : cfg.positive_indices()) bits |= std::uint64_t{1} << i;
    return bits;
}

void require_enumerable(const LocalConfig& cfg, std::size_t cap) {
    const std::size_t beta = cfg.shape().size();
    if (beta >= 40 || (std::size_t{1} << beta) > cap) {
        throw Error(ErrorKind::FamilyTooLarge, "2^" + std::to_string(beta) + " motifs exceeds cap " + std::to_string(cap));
    }
}

}  // namespace

double conditional_motif_probability(const TorusLattice& lat, Site x, const LocalConfig& cfg,
                                     const PartialSpins& boundary, const ModelParams& params, std::size_t cap) {
    require_compatible(cfg, lat);
    lat.require_ball_fits(cfg.radius());
    require_enumerable(cfg, cap);
    params.validate();
    const LocalEnergyTable table(lat, x, cfg.shape());
    std::vector<std::int8_t> spins;
    for (Site s : table.boundary_sites()) {
        if (!boundary.has(s)) throw Error(ErrorKind::MissingSpin, "boundary site " + std::to_string(s) + " unspecified");
        spins.push_back(boundary.get(s));
    }
    const auto energies = table.energies(spins, params);
    return std::exp(energies[motif_bits(cfg)] - log_sum_exp(energies));
}

SandwichReport check_conditional_sandwich(const TorusLattice& lat, const LocalConfig& cfg, const FieldSchedule& schedule,
                                          double b) {
    if (!is_clean(cfg)) throw Error(ErrorKind::NotClean, "sandwich bounds need a clean motif");
    if (k(cfg) != schedule.k_target()) {
        throw Error(ErrorKind::MotifScheduleMismatch,
                    "k(eta)=" + std::to_string(k(cfg)) + " but schedule k_target=" + std::to_string(schedule.k_target()));
    }
    if (schedule.d() != lat.d()) throw Error(ErrorKind::InvalidSchedule, "schedule dimension differs from lattice");
    require_compatible(cfg, lat);
    lat.require_ball_fits(cfg.radius() + 1);
    require_enumerable(cfg, default_family_cap());

    const ModelParams params = schedule.params(lat.n(), b);
    const LocalEnergyTable table(lat, 0, cfg.shape());
    const std::size_t nb = table.boundary_sites().size();
    if (nb >= 40 || (std::size_t{1} << nb) > default_family_cap()) {
        throw Error(ErrorKind::FamilyTooLarge, "2^" + std::to_string(nb) + " boundary configurations exceeds cap");
    }
    const double volume = static_cast<double>(lat.site_count());
    const double lambda = std::pow(schedule.c(), k(cfg)) * std::exp(-2.0 * b * perimeter(cfg));
    const std::uint64_t target = motif_bits(cfg);

    SandwichReport rep;
    rep.n = lat.n();
    rep.lambda = lambda;
    rep.worst_lower_ratio = std::numeric_limits<double>::infinity();
    rep.max_upper_excess = -std::numeric_limits<double>::infinity();
    rep.boundary_count = std::size_t{1} << nb;
    std::vector<std::int8_t> spins(nb);
    for (std::uint64_t bm = 0; bm < rep.boundary_count; ++bm) {
        for (std::size_t i = 0; i < nb; ++i) spins[i] = ((bm >> i) & 1U) ? 1 : -1;
        const auto energies = table.energies(spins, params);
        const double scaled = volume * std::exp(energies[target] - log_sum_exp(energies));
        rep.max_scaled = std::max(rep.max_scaled, scaled);
        rep.worst_lower_ratio = std::min(rep.worst_lower_ratio, scaled / lambda);
        rep.max_upper_excess = std::max(rep.max_upper_excess, scaled - lambda);
    }
    rep.upper_holds = rep.max_upper_excess <= 1e-12;
    return rep;
}

}  // namespace isingpa
