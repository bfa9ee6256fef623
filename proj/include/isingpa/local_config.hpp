#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "isingpa/lattice.hpp"

namespace isingpa {

/// A local configuration (motif) on the reference ball B(0, r). Only the
/// positive vertices are stored; every other ball vertex is negative.
class LocalConfig {
public:
    /// Positives are ball-relative offsets; duplicates are merged. Throws
    /// InvalidArgument if an offset lies outside B(0, r).
    LocalConfig(const LatticeSignature& sig, int radius, const std::vector<Offset>& positives);

    /// The null configuration: all ball vertices negative.
    static LocalConfig null(const LatticeSignature& sig, int radius);
    /// Build from a membership mask over shape->offsets().
    static LocalConfig from_mask(std::shared_ptr<const BallShape> shape, std::vector<char> mask);

    [[nodiscard]] int radius() const noexcept { return shape_->radius(); }
    [[nodiscard]] const LatticeSignature& signature() const noexcept { return shape_->signature(); }
    [[nodiscard]] const BallShape& shape() const noexcept { return *shape_; }
    [[nodiscard]] const std::shared_ptr<const BallShape>& shape_ptr() const noexcept { return shape_; }

    /// Indices into shape().offsets() of positive vertices, increasing.
    [[nodiscard]] const std::vector<int>& positive_indices() const noexcept { return positives_; }
    [[nodiscard]] std::vector<Offset> positives() const;
    [[nodiscard]] bool is_positive(int shape_index) const { return mask_[static_cast<std::size_t>(shape_index)] != 0; }
    [[nodiscard]] const std::vector<char>& mask() const noexcept { return mask_; }

    friend bool operator==(const LocalConfig& a, const LocalConfig& b) {
        return a.signature() == b.signature() && a.radius() == b.radius() && a.mask_ == b.mask_;
    }

private:
    LocalConfig(std::shared_ptr<const BallShape> shape, std::vector<char> mask);

    std::shared_ptr<const BallShape> shape_;
    std::vector<char> mask_;
    std::vector<int> positives_;
};

/// k(eta) = |V_+(eta)|
[[nodiscard]] int k(const LocalConfig& cfg);

/// gamma(eta) = V * |V_+| - 2 * |edges inside V_+|, V the neighbor count.
[[nodiscard]] int perimeter(const LocalConfig& cfg);

/// Number of ball edges whose endpoints carry opposite spins. Equals the
/// perimeter for clean configurations.
[[nodiscard]] int opposite_pair_count(const LocalConfig& cfg);

/// All positives at graph distance <= r - 1 from the center.
[[nodiscard]] bool is_clean(const LocalConfig& cfg);

/// Same positives on B(0, r + 1); the new outer shell is negative.
[[nodiscard]] LocalConfig ring(const LocalConfig& cfg);

/// Enumeration cap: ISINGPA_FAMILY_CAP if set, otherwise 2^20 members.
[[nodiscard]] std::size_t default_family_cap();

/// D_r(eta): every motif whose positives contain those of cfg. cfg itself
/// comes first.
[[nodiscard]] std::vector<LocalConfig> enumerate_superset_family(const LocalConfig& cfg,
                                                                 std::size_t cap = default_family_cap());

/// Every motif on B(0, radius) with at least k_min + 1 positives, ordered by
/// k then lexicographically by positive index set.
[[nodiscard]] std::vector<LocalConfig> enumerate_exceeding(int radius, int k_min, const LatticeSignature& sig,
                                                           std::size_t cap = default_family_cap());

/// Throws LatticeMismatch unless cfg was built for lat's signature.
void require_compatible(const LocalConfig& cfg, const TorusLattice& lat);

// Motif files: "d [n_hint] rho p r" then one line of d integers per positive
// vertex. '#' starts a comment.

[[nodiscard]] LocalConfig read_motif(std::istream& in);
[[nodiscard]] LocalConfig load_motif_file(const std::filesystem::path& path);
/// Canonical text: header "d 0 rho p r" and sorted coordinate lines.
[[nodiscard]] std::string serialize(const LocalConfig& cfg);
void save_motif_file(const std::filesystem::path& path, const LocalConfig& cfg);
/// FNV-1a 64 of the canonical serialization.
[[nodiscard]] std::uint64_t motif_hash(const LocalConfig& cfg);
[[nodiscard]] std::string motif_hash_hex(const LocalConfig& cfg);

}  // namespace isingpa
