#include "isingpa/motif_count.hpp"

#include <map>
#include <string>

#include "isingpa/error.hpp"

namespace isingpa {

std::string_view to_string(MatchMode mode) noexcept {
    return mode == MatchMode::exact_match ? "exact_match" : "superset_match";
}

MatchMode parse_match_mode(std::string_view text) {
    if (text == "exact_match" || text == "exact") return MatchMode::exact_match;
    if (text == "superset_match" || text == "superset") return MatchMode::superset_match;
    throw Error(ErrorKind::InvalidArgument, "unknown match mode '" + std::string(text) + "'");
}

MotifScanner::MotifScanner(const TorusLattice& lat, const LocalConfig& motif, MatchMode mode)
    : mode_(mode), sites_(lat.site_count()) {
    require_compatible(motif, lat);
    lat.require_ball_fits(motif.radius());
    const auto& shape = motif.shape();
    std::vector<Offset> pos, neg;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        (motif.is_positive(static_cast<int>(i)) ? pos : neg).push_back(shape.offsets()[i]);
    }
    npos_ = pos.size();
    nneg_ = neg.size();
    pos_table_.reserve(sites_ * npos_);
    neg_table_.reserve(sites_ * nneg_);
    for (Site x = 0; x < sites_; ++x) {
        for (const auto& off : pos) pos_table_.push_back(lat.translate(x, off));
        for (const auto& off : neg) neg_table_.push_back(lat.translate(x, off));
    }
    if (sites_ <= 64) {
        pos_mask_.assign(sites_, 0);
        neg_mask_.assign(sites_, 0);
        for (std::size_t x = 0; x < sites_; ++x) {
            for (std::size_t j = 0; j < npos_; ++j) pos_mask_[x] |= std::uint64_t{1} << pos_table_[x * npos_ + j];
            for (std::size_t j = 0; j < nneg_; ++j) neg_mask_[x] |= std::uint64_t{1} << neg_table_[x * nneg_ + j];
        }
    }
}

bool MotifScanner::indicator(std::span<const std::int8_t> spins, Site x) const {
    const auto* p = pos_table_.data() + static_cast<std::size_t>(x) * npos_;
    for (std::size_t j = 0; j < npos_; ++j) {
        if (spins[p[j]] < 0) return false;
    }
    if (mode_ == MatchMode::superset_match) return true;
    const auto* q = neg_table_.data() + static_cast<std::size_t>(x) * nneg_;
    for (std::size_t j = 0; j < nneg_; ++j) {
        if (spins[q[j]] > 0) return false;
    }
    return true;
}

std::int64_t MotifScanner::count(std::span<const std::int8_t> spins) const {
    if (spins.size() != sites_) throw Error(ErrorKind::InvalidArgument, "configuration sized for another lattice");
    std::int64_t c = 0;
    for (Site x = 0; x < sites_; ++x) c += indicator(spins, x);
    return c;
}

int indicator(const SpinConfig& cfg, Site x, const LocalConfig& motif, MatchMode mode) {
    return MotifScanner(cfg.lattice(), motif, mode).indicator(cfg.spins(), x) ? 1 : 0;
}

std::int64_t count(const SpinConfig& cfg, const LocalConfig& motif, MatchMode mode) {
    return MotifScanner(cfg.lattice(), motif, mode).count(cfg.spins());
}

CountDistribution count_distribution_exact(const ExactMeasure& measure, const LocalConfig& motif, MatchMode mode) {
    const MotifScanner scanner(measure.lattice(), motif, mode);
    std::vector<double> pmf(measure.lattice().site_count() + 1, 0.0);
    const auto& probs = measure.probabilities();
    for (std::uint64_t s = 0; s < probs.size(); ++s) pmf[static_cast<std::size_t>(scanner.count(s))] += probs[s];
    std::map<std::int64_t, double> sparse;
    for (std::size_t v = 0; v < pmf.size(); ++v) {
        if (pmf[v] > 0.0) sparse.emplace(static_cast<std::int64_t>(v), pmf[v]);
    }
    return CountDistribution::from_pmf(std::move(sparse));
}

}  // namespace isingpa
