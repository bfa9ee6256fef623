#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "isingpa/count_distribution.hpp"
#include "isingpa/gibbs_exact.hpp"
#include "isingpa/local_config.hpp"
#include "isingpa/spin_config.hpp"

namespace isingpa {

/// exact_match counts copies of the motif (I); superset_match counts sites
/// where every positive of the motif is positive (the increasing indicator).
enum class MatchMode { exact_match, superset_match };

[[nodiscard]] std::string_view to_string(MatchMode mode) noexcept;
[[nodiscard]] MatchMode parse_match_mode(std::string_view text);

struct CountObservable {
    LocalConfig motif;
    MatchMode mode = MatchMode::exact_match;
};

/// A motif resolved against one lattice: per-site tables of the translated
/// positive and negative ball vertices. Construction checks n > 2 rho r.
class MotifScanner {
public:
    MotifScanner(const TorusLattice& lat, const LocalConfig& motif, MatchMode mode);

    [[nodiscard]] bool indicator(std::span<const std::int8_t> spins, Site x) const;
    [[nodiscard]] std::int64_t count(std::span<const std::int8_t> spins) const;

    /// Same on enumeration states (bit s set = site s positive); n^d <= 64.
    [[nodiscard]] bool indicator(std::uint64_t state, Site x) const {
        const auto i = static_cast<std::size_t>(x);
        if ((state & pos_mask_[i]) != pos_mask_[i]) return false;
        return mode_ == MatchMode::superset_match || (state & neg_mask_[i]) == 0;
    }
    [[nodiscard]] std::int64_t count(std::uint64_t state) const {
        std::int64_t c = 0;
        for (std::size_t i = 0; i < pos_mask_.size(); ++i) c += indicator(state, static_cast<Site>(i));
        return c;
    }

    [[nodiscard]] MatchMode mode() const noexcept { return mode_; }

private:
    MatchMode mode_;
    std::size_t sites_;
    std::size_t npos_;
    std::size_t nneg_;
    std::vector<Site> pos_table_;
    std::vector<Site> neg_table_;
    std::vector<std::uint64_t> pos_mask_;
    std::vector<std::uint64_t> neg_mask_;
};

[[nodiscard]] int indicator(const SpinConfig& cfg, Site x, const LocalConfig& motif, MatchMode mode);
[[nodiscard]] std::int64_t count(const SpinConfig& cfg, const LocalConfig& motif, MatchMode mode);

/// Exact law of the count under the enumerated measure.
[[nodiscard]] CountDistribution count_distribution_exact(const ExactMeasure& measure, const LocalConfig& motif,
                                                         MatchMode mode);

}  // namespace isingpa
