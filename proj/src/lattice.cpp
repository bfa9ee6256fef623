#include "isingpa/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <tuple>

#include "isingpa/error.hpp"

namespace isingpa {

Norm Norm::parse(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
    int p = 0;
    for (char ch : text) {
        if (ch < '0' || ch > '9') throw Error(ErrorKind::InvalidArgument, "bad norm selector '" + std::string(text) + "'");
        p = p * 10 + (ch - '0');
        if (p > 1000) throw Error(ErrorKind::InvalidArgument, "norm exponent too large");
    }
    if (text.empty() || p < 1) throw Error(ErrorKind::InvalidArgument, "norm exponent must be >= 1");
    return lp(p);
}

std::string Norm::to_string() const { return is_infinity() ? "inf" : std::to_string(p_); }

bool Norm::within(std::span<const int> v, int rho) const {
    if (is_infinity()) {
        return std::all_of(v.begin(), v.end(), [rho](int c) { return std::abs(c) <= rho; });
    }
    // sum |v_i|^p <= rho^p; every |v_i| <= rho here so the powers stay small
    // for the radii and exponents this library is meant for.
    auto ipow = [](long double base, int e) {
        long double r = 1;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    };
    long double sum = 0;
    for (int c : v) {
        if (std::abs(c) > rho) return false;
        sum += ipow(std::abs(c), p_);
    }
    return sum <= ipow(rho, p_);
}

std::string to_string(const LatticeSignature& sig) {
    return "d=" + std::to_string(sig.d) + " rho=" + std::to_string(sig.rho) + " p=" + sig.norm.to_string();
}

namespace {

void validate_signature(const LatticeSignature& sig) {
    if (sig.d < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
    if (sig.rho < 1) throw Error(ErrorKind::InvalidArgument, "rho must be >= 1");
}

// Odometer over the box [-rho, rho]^d, lexicographic.
template <typename F>
void for_each_box_offset(int d, int rho, F&& f) {
    Offset v(static_cast<std::size_t>(d), -rho);
    while (true) {
        f(v);
        int i = d - 1;
        while (i >= 0 && v[static_cast<std::size_t>(i)] == rho) {
            v[static_cast<std::size_t>(i)] = -rho;
            --i;
        }
        if (i < 0) return;
        ++v[static_cast<std::size_t>(i)];
    }
}

}  // namespace

std::vector<Offset> neighbor_offsets(const LatticeSignature& sig) {
    validate_signature(sig);
    std::vector<Offset> out;
    for_each_box_offset(sig.d, sig.rho, [&](const Offset& v) {
        if (std::all_of(v.begin(), v.end(), [](int c) { return c == 0; })) return;
        if (sig.norm.within(v, sig.rho)) out.push_back(v);
    });
    return out;
}

BallShape::BallShape(const LatticeSignature& sig, int radius) : sig_(sig), radius_(radius) {
    validate_signature(sig);
    if (radius < 0) throw Error(ErrorKind::InvalidArgument, "radius must be >= 0");
    const auto steps = neighbor_offsets(sig);
    coordination_ = static_cast<int>(steps.size());

    std::map<Offset, int> dist;
    std::deque<Offset> queue;
    Offset origin(static_cast<std::size_t>(sig.d), 0);
    dist[origin] = 0;
    queue.push_back(origin);
    while (!queue.empty()) {
        Offset cur = queue.front();
        queue.pop_front();
        const int dcur = dist[cur];
        if (dcur == radius) continue;
        for (const auto& s : steps) {
            Offset nxt = cur;
            for (std::size_t i = 0; i < nxt.size(); ++i) nxt[i] += s[i];
            if (dist.emplace(nxt, dcur + 1).second) queue.push_back(std::move(nxt));
        }
    }
    // std::map iterates lexicographically
    for (const auto& [off, dd] : dist) {
        offsets_.push_back(off);
        distances_.push_back(dd);
    }
    center_ = index_of(origin);

    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        for (std::size_t j = i + 1; j < offsets_.size(); ++j) {
            Offset diff(offsets_[i].size());
            for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = offsets_[j][c] - offsets_[i][c];
            if (sig.norm.within(diff, sig.rho)) edges_.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    }
}

std::shared_ptr<const BallShape> BallShape::get(const LatticeSignature& sig, int radius) {
    static std::mutex mutex;
    static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const BallShape>> cache;
    const auto key = std::make_tuple(sig.d, sig.rho, sig.norm.p(), radius);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto shape = std::make_shared<const BallShape>(sig, radius);
    std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(shape)).first->second;
}

int BallShape::index_of(std::span<const int> offset) const {
    const Offset key(offset.begin(), offset.end());
    auto it = std::lower_bound(offsets_.begin(), offsets_.end(), key);
    if (it == offsets_.end() || *it != key) return -1;
    return static_cast<int>(it - offsets_.begin());
}

std::vector<Vertex> Ball::closure() const {
    std::vector<Vertex> out = members;
    out.insert(out.end(), boundary.begin(), boundary.end());
    std::sort(out.begin(), out.end());
    return out;
}

TorusLattice::TorusLattice(int d, int n, int rho, Norm norm) : sig_{d, rho, norm}, n_(n) {
    validate_signature(sig_);
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "side length must be >= 1");
    std::size_t count = 1;
    for (int i = 0; i < d; ++i) {
        count *= static_cast<std::size_t>(n);
        if (count > (std::size_t{1} << 31)) throw Error(ErrorKind::InvalidArgument, "lattice too large");
    }
    site_count_ = count;

    // Neighbors of the origin: box offsets whose minimal-image difference is
    // within rho, deduplicated (small n can alias several offsets).
    std::vector<Site> origin_nbrs;
    for_each_box_offset(d, rho, [&](const Offset& v) {
        Offset image(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const int m = ((v[i] % n) + n) % n;
            image[i] = std::min(m, n - m);
        }
        if (!sig_.norm.within(image, rho)) return;
        const Site y = site(v);
        if (y != 0) origin_nbrs.push_back(y);
    });
    std::sort(origin_nbrs.begin(), origin_nbrs.end());
    origin_nbrs.erase(std::unique(origin_nbrs.begin(), origin_nbrs.end()), origin_nbrs.end());
    coordination_ = static_cast<int>(origin_nbrs.size());

    std::vector<Offset> origin_offsets;
    origin_offsets.reserve(origin_nbrs.size());
    for (Site y : origin_nbrs) origin_offsets.push_back(vertex(y).coords);

    neighbor_table_.resize(site_count_ * static_cast<std::size_t>(coordination_));
    for (Site x = 0; x < site_count_; ++x) {
        auto* row = neighbor_table_.data() + static_cast<std::size_t>(x) * coordination_;
        for (int k = 0; k < coordination_; ++k) row[k] = translate(x, origin_offsets[static_cast<std::size_t>(k)]);
        std::sort(row, row + coordination_);
        for (int k = 0; k < coordination_; ++k) {
            if (x < row[k]) edges_.emplace_back(x, row[k]);
        }
    }
}

Vertex TorusLattice::vertex(Site s) const {
    Vertex v;
    v.coords.resize(static_cast<std::size_t>(sig_.d));
    for (int i = sig_.d - 1; i >= 0; --i) {
        v.coords[static_cast<std::size_t>(i)] = static_cast<int>(s % static_cast<Site>(n_));
        s /= static_cast<Site>(n_);
    }
    return v;
}

Site TorusLattice::site(std::span<const int> coords) const {
    if (coords.size() != static_cast<std::size_t>(sig_.d)) {
        throw Error(ErrorKind::InvalidArgument, "vertex has wrong dimension");
    }
    Site s = 0;
    for (int c : coords) s = s * static_cast<Site>(n_) + static_cast<Site>(((c % n_) + n_) % n_);
    return s;
}

Site TorusLattice::translate(Site x, std::span<const int> offset) const {
    Site s = 0;
    Site stride = 1;
    for (int i = sig_.d - 1; i >= 0; --i) {
        const int c = static_cast<int>(x % static_cast<Site>(n_));
        x /= static_cast<Site>(n_);
        const int moved = (((c + offset[static_cast<std::size_t>(i)]) % n_) + n_) % n_;
        s += static_cast<Site>(moved) * stride;
        stride *= static_cast<Site>(n_);
    }
    return s;
}

std::vector<Vertex> TorusLattice::neighbors(const Vertex& x) const {
    std::vector<Vertex> out;
    for (Site y : neighbor_sites(site(x))) out.push_back(vertex(y));
    return out;
}

std::vector<int> TorusLattice::distances_from(Site x) const {
    std::vector<int> dist(site_count_, -1);
    std::vector<Site> frontier{x};
    dist[x] = 0;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const Site cur = frontier[head];
        for (Site y : neighbor_sites(cur)) {
            if (dist[y] < 0) {
                dist[y] = dist[cur] + 1;
                frontier.push_back(y);
            }
        }
    }
    return dist;
}

int TorusLattice::graph_distance(Site x, Site y) const { return distances_from(x)[y]; }

void TorusLattice::require_ball_fits(int r) const {
    if (n_ <= 2 * sig_.rho * r) {
        throw Error(ErrorKind::LatticeTooSmall, "n=" + std::to_string(n_) + " <= 2*rho*r=" + std::to_string(2 * sig_.rho * r));
    }
}

Ball TorusLattice::ball(const Vertex& x, int r) const {
    if (r < 0) throw Error(ErrorKind::InvalidArgument, "radius must be >= 0");
    require_ball_fits(r);
    const auto dist = distances_from(site(x));
    Ball b;
    b.center = vertex(site(x));
    b.radius = r;
    for (Site s = 0; s < site_count_; ++s) {
        if (dist[s] >= 0 && dist[s] <= r) b.members.push_back(vertex(s));
        if (dist[s] == r + 1) b.boundary.push_back(vertex(s));
    }
    return b;
}

std::vector<Site> TorusLattice::place(Site x, const BallShape& shape) const {
    std::vector<Site> out;
    out.reserve(shape.size());
    for (const auto& off : shape.offsets()) out.push_back(translate(x, off));
    return out;
}

std::size_t internal_edge_count(const TorusLattice& lat, const Ball& ball) {
    std::vector<char> inside(lat.site_count(), 0);
    for (const auto& v : ball.members) inside[lat.site(v)] = 1;
    std::size_t count = 0;
    for (const auto& [x, y] : lat.edges()) {
        if (inside[x] && inside[y]) ++count;
    }
    return count;
}

}  // namespace isingpa
