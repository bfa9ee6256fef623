#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "isingpa/lattice.hpp"

namespace isingpa {

/// One global configuration sigma in {-1, +1}^{V_n}, stored per site index.
class SpinConfig {
public:
    explicit SpinConfig(std::shared_ptr<const TorusLattice> lat, std::int8_t fill = -1);
    SpinConfig(std::shared_ptr<const TorusLattice> lat, std::vector<std::int8_t> spins);

    /// Bit s set means site s is +1. Requires site_count() <= 64.
    static SpinConfig from_bits(std::shared_ptr<const TorusLattice> lat, std::uint64_t bits);
    [[nodiscard]] std::uint64_t to_bits() const;

    [[nodiscard]] const TorusLattice& lattice() const noexcept { return *lat_; }
    [[nodiscard]] const std::shared_ptr<const TorusLattice>& lattice_ptr() const noexcept { return lat_; }
    [[nodiscard]] std::size_t size() const noexcept { return spins_.size(); }

    [[nodiscard]] std::span<const std::int8_t> spins() const noexcept { return spins_; }
    [[nodiscard]] std::span<std::int8_t> spins() noexcept { return spins_; }

    [[nodiscard]] std::int8_t operator[](Site s) const { return spins_[s]; }
    void set(Site s, std::int8_t value) { spins_[s] = value >= 0 ? std::int8_t{1} : std::int8_t{-1}; }
    void flip(Site s) { spins_[s] = static_cast<std::int8_t>(-spins_[s]); }

    /// sigma <= other in the coordinatewise partial order.
    [[nodiscard]] bool below(const SpinConfig& other) const;

    friend bool operator==(const SpinConfig& a, const SpinConfig& b) { return a.spins_ == b.spins_; }

private:
    std::shared_ptr<const TorusLattice> lat_;
    std::vector<std::int8_t> spins_;
};

/// Spins fixed on a subset of sites; 0 marks an unspecified site.
struct PartialSpins {
    std::vector<std::int8_t> values;

    explicit PartialSpins(std::size_t site_count) : values(site_count, 0) {}

    void set(Site s, std::int8_t v) { values[s] = v >= 0 ? std::int8_t{1} : std::int8_t{-1}; }
    [[nodiscard]] bool has(Site s) const { return values[s] != 0; }
    [[nodiscard]] std::int8_t get(Site s) const { return values[s]; }
};

// Snapshot: ASCII header line "d n rho p\n" followed by ceil(n^d / 8) bytes of
// packed sign bits in site (row-major lexicographic) order, most significant
// bit first, 1 = +1, trailing bits of the last byte zero.

void write_snapshot(std::ostream& out, const SpinConfig& cfg);
[[nodiscard]] SpinConfig read_snapshot(std::istream& in);

}  // namespace isingpa
