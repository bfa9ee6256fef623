#include "isingpa/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isingpa/error.hpp"
#include "isingpa/motif_count.hpp"

namespace isingpa {

namespace {

constexpr double kPoissonTail = 1e-12;

void require_normalized(const CountDistribution& d) {
    double total = 0.0;
    for (const auto& [v, p] : d.pmf()) total += p;
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::NotNormalized, "pmf sums to " + std::to_string(total));
}

double plugin_bias(const CountDistribution& d) {
    if (d.is_exact()) return 0.0;
    return std::sqrt(static_cast<double>(d.pmf().size() + 1) / static_cast<double>(d.sample_size()));
}

}  // namespace

PoissonTarget::PoissonTarget(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "Poisson parameter must be positive");
}

std::vector<double> PoissonTarget::pmf_upto(std::size_t last) const {
    std::vector<double> out(last + 1);
    double log_p = -lambda_;
    const double log_lambda = std::log(lambda_);
    for (std::size_t m = 0; m <= last; ++m) {
        if (m > 0) log_p += log_lambda - std::log(static_cast<double>(m));
        out[m] = std::exp(log_p);
    }
    return out;
}

std::size_t PoissonTarget::quantile_index(double tail) const {
    double log_p = -lambda_;
    const double log_lambda = std::log(lambda_);
    double cdf = std::exp(log_p);
    std::size_t m = 0;
    // Terminates: the upper tail decays superexponentially past lambda.
    while (cdf <= 1.0 - tail && m < 100000) {
        ++m;
        log_p += log_lambda - std::log(static_cast<double>(m));
        cdf += std::exp(log_p);
    }
    return m;
}

PoissonTarget poisson_target(const FieldSchedule& schedule, double b, const LocalConfig& motif) {
    if (k(motif) != schedule.k_target()) {
        throw Error(ErrorKind::MotifScheduleMismatch,
                    "k(eta)=" + std::to_string(k(motif)) + " but schedule k_target=" + std::to_string(schedule.k_target()));
    }
    return PoissonTarget(std::pow(schedule.c(), k(motif)) * std::exp(-2.0 * b * perimeter(motif)));
}

TvResult tv_distance(const CountDistribution& p, const CountDistribution& q) {
    require_normalized(p);
    require_normalized(q);
    double acc = 0.0;
    auto ip = p.pmf().begin();
    auto iq = q.pmf().begin();
    while (ip != p.pmf().end() || iq != q.pmf().end()) {
        if (iq == q.pmf().end() || (ip != p.pmf().end() && ip->first < iq->first)) {
            acc += ip->second;
            ++ip;
        } else if (ip == p.pmf().end() || iq->first < ip->first) {
            acc += iq->second;
            ++iq;
        } else {
            acc += std::abs(ip->second - iq->second);
            ++ip;
            ++iq;
        }
    }
    TvResult r;
    r.value = std::min(1.0, 0.5 * acc);
    r.plugin_bias_bound = plugin_bias(p) + plugin_bias(q);
    r.error_budget = r.plugin_bias_bound;
    return r;
}

TvResult tv_distance(const CountDistribution& p, const PoissonTarget& q) {
    require_normalized(p);
    const std::size_t last =
        std::max<std::size_t>(static_cast<std::size_t>(p.max_value()), q.quantile_index(kPoissonTail));
    const auto qm = q.pmf_upto(last);
    double acc = 0.0, covered = 0.0;
    for (std::size_t m = 0; m <= last; ++m) {
        acc += std::abs(p.mass(static_cast<std::int64_t>(m)) - qm[m]);
        covered += qm[m];
    }
    TvResult r;
    r.value = std::min(1.0, 0.5 * acc);
    r.plugin_bias_bound = plugin_bias(p);
    r.error_budget = std::max(0.0, 1.0 - covered) + r.plugin_bias_bound;
    return r;
}

std::vector<double> factorial_moments(const CountDistribution& dist, int l_max) {
    if (l_max < 1) throw Error(ErrorKind::InvalidArgument, "l_max must be >= 1");
    std::vector<double> out;
    for (int l = 1; l <= l_max; ++l) out.push_back(dist.factorial_moment(l));
    return out;
}

double stein_chen_bound(const CountDistribution& law, std::size_t volume) {
    const double lambda_n = law.mean();
    if (!(lambda_n > 0.0)) throw Error(ErrorKind::InvalidArgument, "Stein-Chen bound needs a positive mean");
    const double prefactor = -std::expm1(-lambda_n) / lambda_n;
    return prefactor * (law.variance() - lambda_n + 2.0 * lambda_n * lambda_n / static_cast<double>(volume));
}

double stein_chen_bound(const ExactMeasure& measure, const LocalConfig& motif) {
    if (measure.params().b < 0.0) throw Error(ErrorKind::FerromagneticOnly, "Stein-Chen bound needs b >= 0");
    const auto law = count_distribution_exact(measure, motif, MatchMode::superset_match);
    return stein_chen_bound(law, measure.lattice().site_count());
}

RateFit rate_fit(std::span<const double> ns, std::span<const double> values) {
    if (ns.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "ns and values differ in length");
    if (ns.size() < 3) throw Error(ErrorKind::DegenerateFit, "need at least 3 points");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (!(values[i] > 0.0) || !(ns[i] > 0.0)) throw Error(ErrorKind::DegenerateFit, "values and n must be positive");
        x.push_back(std::log(ns[i]));
        y.push_back(std::log(values[i]));
    }
    const double m = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw Error(ErrorKind::DegenerateFit, "all n identical");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy <= 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = x.size();
    return fit;
}

RateFit rate_fit(std::span<const double> ns, std::span<const double> values, std::span<const double> error_floors) {
    if (error_floors.size() != values.size()) throw Error(ErrorKind::InvalidArgument, "error floors differ in length");
    std::vector<double> kept_n, kept_v;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= 10.0 * error_floors[i]) {
            kept_n.push_back(ns[i]);
            kept_v.push_back(values[i]);
        }
    }
    return rate_fit(kept_n, kept_v);
}

RingReport ring_equivalence_check(const ExactMeasure& measure, const LocalConfig& motif) {
    if (k(motif) < 1) throw Error(ErrorKind::InvalidArgument, "ring check needs a motif with k(eta) >= 1");
    measure.lattice().require_ball_fits(motif.radius() + 1);
    const auto plain = count_distribution_exact(measure, motif, MatchMode::exact_match);
    const auto ringed = count_distribution_exact(measure, ring(motif), MatchMode::exact_match);
    RingReport rep;
    rep.tv = tv_distance(ringed, plain).value;
    rep.mean_motif = plain.mean();
    rep.mean_ringed = ringed.mean();
    rep.mean_diff = std::abs(rep.mean_ringed - rep.mean_motif);
    return rep;
}

}  // namespace isingpa
