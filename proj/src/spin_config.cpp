#include "isingpa/spin_config.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "isingpa/error.hpp"

namespace isingpa {

SpinConfig::SpinConfig(std::shared_ptr<const TorusLattice> lat, std::int8_t fill)
    : lat_(std::move(lat)), spins_(lat_->site_count(), fill >= 0 ? std::int8_t{1} : std::int8_t{-1}) {}

SpinConfig::SpinConfig(std::shared_ptr<const TorusLattice> lat, std::vector<std::int8_t> spins)
    : lat_(std::move(lat)), spins_(std::move(spins)) {
    if (spins_.size() != lat_->site_count()) throw Error(ErrorKind::InvalidArgument, "spin vector length differs from n^d");
    for (auto s : spins_) {
        if (s != 1 && s != -1) throw Error(ErrorKind::InvalidArgument, "spins must be +1 or -1");
    }
}

SpinConfig SpinConfig::from_bits(std::shared_ptr<const TorusLattice> lat, std::uint64_t bits) {
    if (lat->site_count() > 64) throw Error(ErrorKind::InvalidArgument, "bit encoding needs at most 64 sites");
    SpinConfig cfg(std::move(lat));
    for (std::size_t s = 0; s < cfg.size(); ++s) cfg.spins_[s] = ((bits >> s) & 1U) ? 1 : -1;
    return cfg;
}

std::uint64_t SpinConfig::to_bits() const {
    if (spins_.size() > 64) throw Error(ErrorKind::InvalidArgument, "bit encoding needs at most 64 sites");
    std::uint64_t bits = 0;
    for (std::size_t s = 0; s < spins_.size(); ++s) {
        if (spins_[s] > 0) bits |= std::uint64_t{1} << s;
    }
    return bits;
}

bool SpinConfig::below(const SpinConfig& other) const {
    for (std::size_t s = 0; s < spins_.size(); ++s) {
        if (spins_[s] > other.spins_[s]) return false;
    }
    return true;
}

void write_snapshot(std::ostream& out, const SpinConfig& cfg) {
    const auto& lat = cfg.lattice();
    out << lat.d() << ' ' << lat.n() << ' ' << lat.rho() << ' ' << lat.norm().to_string() << '\n';
    unsigned char byte = 0;
    int used = 0;
    for (auto s : cfg.spins()) {
        byte = static_cast<unsigned char>((byte << 1) | (s > 0 ? 1 : 0));
        if (++used == 8) {
            out.put(static_cast<char>(byte));
            byte = 0;
            used = 0;
        }
    }
    if (used > 0) out.put(static_cast<char>(byte << (8 - used)));
}

SpinConfig read_snapshot(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorKind::ParseError, "snapshot header missing");
    std::istringstream hs(header);
    int d = 0, n = 0, rho = 0;
    std::string p;
    if (!(hs >> d >> n >> rho >> p)) throw Error(ErrorKind::ParseError, "snapshot header must be 'd n rho p'");
    auto lat = std::make_shared<const TorusLattice>(d, n, rho, Norm::parse(p));
    std::vector<std::int8_t> spins(lat->site_count(), -1);
    const std::size_t bytes = (spins.size() + 7) / 8;
    for (std::size_t b = 0; b < bytes; ++b) {
        const int ch = in.get();
        if (ch == std::char_traits<char>::eof()) throw Error(ErrorKind::ParseError, "snapshot truncated");
        for (int bit = 0; bit < 8; ++bit) {
            const std::size_t s = b * 8 + static_cast<std::size_t>(bit);
            if (s < spins.size()) spins[s] = ((ch >> (7 - bit)) & 1) ? 1 : -1;
        }
    }
    return SpinConfig(std::move(lat), std::move(spins));
}

}  // namespace isingpa
