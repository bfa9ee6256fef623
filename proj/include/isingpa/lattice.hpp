#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isingpa {

/// L_p norm selector. p = infinity is a distinguished value, never a float.
class Norm {
public:
    constexpr Norm() = default;

    static constexpr Norm lp(int p) { return Norm(p); }
    static constexpr Norm infinity() { return Norm(kInfinity); }

    /// Accepts a positive integer or one of "inf", "infinity".
    static Norm parse(std::string_view text);

    [[nodiscard]] constexpr bool is_infinity() const noexcept { return p_ == kInfinity; }
    [[nodiscard]] constexpr int p() const noexcept { return p_; }
    [[nodiscard]] std::string to_string() const;

    /// True iff ||v||_p <= rho, evaluated in exact integer arithmetic.
    [[nodiscard]] bool within(std::span<const int> v, int rho) const;

    friend constexpr bool operator==(Norm, Norm) = default;

private:
    static constexpr int kInfinity = 0;
    constexpr explicit Norm(int p) : p_(p) {}
    int p_ = 1;
};

/// The part of the lattice geometry that does not depend on the side length.
/// Motifs are built against a signature and refuse any lattice with another one.
struct LatticeSignature {
    int d = 1;
    int rho = 1;
    Norm norm;

    friend bool operator==(const LatticeSignature&, const LatticeSignature&) = default;
};

std::string to_string(const LatticeSignature& sig);

using Offset = std::vector<int>;
using Site = std::uint32_t;

struct Vertex {
    std::vector<int> coords;

    friend auto operator<=>(const Vertex&, const Vertex&) = default;
    friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Neighbor offsets of the origin in Z^d, lexicographically sorted.
std::vector<Offset> neighbor_offsets(const LatticeSignature& sig);

/// The reference ball B(0, r) in Z^d. For n > 2*rho*r every torus ball of
/// radius r is a translate of this shape.
class BallShape {
public:
    /// Shapes are cached per (signature, radius) and shared.
    static std::shared_ptr<const BallShape> get(const LatticeSignature& sig, int radius);

    BallShape(const LatticeSignature& sig, int radius);

    [[nodiscard]] const LatticeSignature& signature() const noexcept { return sig_; }
    [[nodiscard]] int radius() const noexcept { return radius_; }
    [[nodiscard]] std::size_t size() const noexcept { return offsets_.size(); }
    [[nodiscard]] int coordination() const noexcept { return coordination_; }

    /// Members in lexicographic order.
    [[nodiscard]] const std::vector<Offset>& offsets() const noexcept { return offsets_; }
    /// Graph distance from the center, parallel to offsets().
    [[nodiscard]] const std::vector<int>& distances() const noexcept { return distances_; }
    /// Internal edges as (i, j) index pairs into offsets(), i < j.
    [[nodiscard]] const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

    [[nodiscard]] int index_of(std::span<const int> offset) const;
    [[nodiscard]] int center_index() const { return center_; }

private:
    LatticeSignature sig_;
    int radius_;
    int coordination_ = 0;
    int center_ = 0;
    std::vector<Offset> offsets_;
    std::vector<int> distances_;
    std::vector<std::pair<int, int>> edges_;
};

struct Ball {
    Vertex center;
    int radius = 0;
    std::vector<Vertex> members;   // B(x, r), lexicographic
    std::vector<Vertex> boundary;  // delta B, lexicographic

    [[nodiscard]] std::size_t size() const noexcept { return members.size(); }
    /// closure(B(x, r)) = B(x, r + 1)
    [[nodiscard]] std::vector<Vertex> closure() const;
};

/// Periodic lattice V_n = {0..n-1}^d. Sites are numbered row-major with the
/// first coordinate most significant, so site order is lexicographic order.
/// Immutable after construction.
class TorusLattice {
public:
    TorusLattice(int d, int n, int rho, Norm norm);
    TorusLattice(const LatticeSignature& sig, int n) : TorusLattice(sig.d, n, sig.rho, sig.norm) {}

    [[nodiscard]] int d() const noexcept { return sig_.d; }
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int rho() const noexcept { return sig_.rho; }
    [[nodiscard]] Norm norm() const noexcept { return sig_.norm; }
    [[nodiscard]] const LatticeSignature& signature() const noexcept { return sig_; }
    [[nodiscard]] std::size_t site_count() const noexcept { return site_count_; }
    /// Neighbor count of every vertex on this torus.
    [[nodiscard]] int coordination() const noexcept { return coordination_; }

    [[nodiscard]] Vertex vertex(Site s) const;
    /// Any integer coordinates; reduced mod n.
    [[nodiscard]] Site site(std::span<const int> coords) const;
    [[nodiscard]] Site site(const Vertex& v) const { return site(std::span<const int>(v.coords)); }
    [[nodiscard]] Site translate(Site x, std::span<const int> offset) const;

    [[nodiscard]] std::span<const Site> neighbor_sites(Site x) const {
        return {neighbor_table_.data() + static_cast<std::size_t>(x) * coordination_,
                static_cast<std::size_t>(coordination_)};
    }
    [[nodiscard]] std::vector<Vertex> neighbors(const Vertex& x) const;

    /// Undirected edges {x, y}, x < y, each listed once.
    [[nodiscard]] const std::vector<std::pair<Site, Site>>& edges() const noexcept { return edges_; }

    /// Breadth-first graph distances from x to every site.
    [[nodiscard]] std::vector<int> distances_from(Site x) const;
    [[nodiscard]] int graph_distance(Site x, Site y) const;

    /// Throws LatticeTooSmall when n <= 2 * rho * r.
    void require_ball_fits(int r) const;
    [[nodiscard]] Ball ball(const Vertex& x, int r) const;

    /// Site list of x + shape, in shape order (no size check).
    [[nodiscard]] std::vector<Site> place(Site x, const BallShape& shape) const;

private:
    LatticeSignature sig_;
    int n_;
    std::size_t site_count_;
    int coordination_ = 0;
    std::vector<Site> neighbor_table_;
    std::vector<std::pair<Site, Site>> edges_;
};

/// alpha(r): number of lattice edges with both endpoints in the ball.
std::size_t internal_edge_count(const TorusLattice& lat, const Ball& ball);

}  // namespace isingpa
