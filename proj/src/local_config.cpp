#include "isingpa/local_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

#include "isingpa/error.hpp"

namespace isingpa {

LocalConfig::LocalConfig(std::shared_ptr<const BallShape> shape, std::vector<char> mask)
    : shape_(std::move(shape)), mask_(std::move(mask)) {
    if (mask_.size() != shape_->size()) throw Error(ErrorKind::InvalidArgument, "mask size differs from ball size");
    for (std::size_t i = 0; i < mask_.size(); ++i) {
        if (mask_[i]) positives_.push_back(static_cast<int>(i));
    }
}

LocalConfig::LocalConfig(const LatticeSignature& sig, int radius, const std::vector<Offset>& positives)
    : LocalConfig(BallShape::get(sig, radius), std::vector<char>(BallShape::get(sig, radius)->size(), 0)) {
    for (const auto& off : positives) {
        if (off.size() != static_cast<std::size_t>(sig.d)) {
            throw Error(ErrorKind::InvalidArgument, "positive vertex has wrong dimension");
        }
        const int idx = shape_->index_of(off);
        if (idx < 0) throw Error(ErrorKind::InvalidArgument, "positive vertex outside B(0," + std::to_string(radius) + ")");
        mask_[static_cast<std::size_t>(idx)] = 1;
    }
    positives_.clear();
    for (std::size_t i = 0; i < mask_.size(); ++i) {
        if (mask_[i]) positives_.push_back(static_cast<int>(i));
    }
}

LocalConfig LocalConfig::null(const LatticeSignature& sig, int radius) { return LocalConfig(sig, radius, {}); }

LocalConfig LocalConfig::from_mask(std::shared_ptr<const BallShape> shape, std::vector<char> mask) {
    return LocalConfig(std::move(shape), std::move(mask));
}

std::vector<Offset> LocalConfig::positives() const {
    std::vector<Offset> out;
    out.reserve(positives_.size());
    for (int i : positives_) out.push_back(shape_->offsets()[static_cast<std::size_t>(i)]);
    return out;
}

int k(const LocalConfig& cfg) { return static_cast<int>(cfg.positive_indices().size()); }

int perimeter(const LocalConfig& cfg) {
    int inner = 0;
    for (const auto& [i, j] : cfg.shape().edges()) {
        if (cfg.is_positive(i) && cfg.is_positive(j)) ++inner;
    }
    return cfg.shape().coordination() * k(cfg) - 2 * inner;
}

int opposite_pair_count(const LocalConfig& cfg) {
    int count = 0;
    for (const auto& [i, j] : cfg.shape().edges()) {
        if (cfg.is_positive(i) != cfg.is_positive(j)) ++count;
    }
    return count;
}

bool is_clean(const LocalConfig& cfg) {
    const auto& dist = cfg.shape().distances();
    return std::all_of(cfg.positive_indices().begin(), cfg.positive_indices().end(),
                       [&](int i) { return dist[static_cast<std::size_t>(i)] <= cfg.radius() - 1; });
}

LocalConfig ring(const LocalConfig& cfg) { return LocalConfig(cfg.signature(), cfg.radius() + 1, cfg.positives()); }

std::size_t default_family_cap() {
    if (const char* env = std::getenv("ISINGPA_FAMILY_CAP")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::size_t{1} << 20;
}

std::vector<LocalConfig> enumerate_superset_family(const LocalConfig& cfg, std::size_t cap) {
    std::vector<int> free;
    for (std::size_t i = 0; i < cfg.mask().size(); ++i) {
        if (!cfg.mask()[i]) free.push_back(static_cast<int>(i));
    }
    if (free.size() >= 63 || (std::size_t{1} << free.size()) > cap) {
        throw Error(ErrorKind::FamilyTooLarge, "2^" + std::to_string(free.size()) + " members exceeds cap " + std::to_string(cap));
    }
    const std::size_t total = std::size_t{1} << free.size();
    std::vector<LocalConfig> out;
    out.reserve(total);
    for (std::size_t bits = 0; bits < total; ++bits) {
        auto mask = cfg.mask();
        for (std::size_t j = 0; j < free.size(); ++j) {
            if ((bits >> j) & 1U) mask[static_cast<std::size_t>(free[j])] = 1;
        }
        out.push_back(LocalConfig::from_mask(cfg.shape_ptr(), std::move(mask)));
    }
    return out;
}

std::vector<LocalConfig> enumerate_exceeding(int radius, int k_min, const LatticeSignature& sig, std::size_t cap) {
    auto shape = BallShape::get(sig, radius);
    const int beta = static_cast<int>(shape->size());
    const int first = std::max(k_min + 1, 0);

    // Cap check on the exact family size before allocating anything.
    long double total = 0;
    for (int j = first; j <= beta; ++j) {
        long double c = 1;
        for (int i = 0; i < j; ++i) c = c * (beta - i) / (i + 1);
        total += c;
    }
    if (total > static_cast<long double>(cap)) {
        throw Error(ErrorKind::FamilyTooLarge, "family of " + std::to_string(static_cast<double>(total)) +
                                                   " members exceeds cap " + std::to_string(cap));
    }

    std::vector<LocalConfig> out;
    out.reserve(static_cast<std::size_t>(total));
    for (int j = first; j <= beta; ++j) {
        std::vector<int> comb(static_cast<std::size_t>(j));
        for (int i = 0; i < j; ++i) comb[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::vector<char> mask(static_cast<std::size_t>(beta), 0);
            for (int c : comb) mask[static_cast<std::size_t>(c)] = 1;
            out.push_back(LocalConfig::from_mask(shape, std::move(mask)));
            int i = j - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == beta - j + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (int t = i + 1; t < j; ++t) comb[static_cast<std::size_t>(t)] = comb[static_cast<std::size_t>(t - 1)] + 1;
        }
    }
    return out;
}

void require_compatible(const LocalConfig& cfg, const TorusLattice& lat) {
    if (!(cfg.signature() == lat.signature())) {
        throw Error(ErrorKind::LatticeMismatch,
                    "motif built for " + to_string(cfg.signature()) + ", lattice is " + to_string(lat.signature()));
    }
}

namespace {

std::string strip_comment(const std::string& line) {
    const auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    for (std::string t; ss >> t;) out.push_back(t);
    return out;
}

int parse_int(const std::string& tok, int line_no) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected integer, got '" + tok + "'");
    }
}

}  // namespace

LocalConfig read_motif(std::istream& in) {
    std::string line;
    int line_no = 0;
    bool have_header = false;
    LatticeSignature sig;
    int radius = 0;
    std::vector<Offset> positives;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = tokens_of(strip_comment(line));
        if (toks.empty()) continue;
        if (!have_header) {
            if (toks.size() != 4 && toks.size() != 5) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": header must be 'd [n_hint] rho p r'");
            }
            const std::size_t base = toks.size() == 5 ? 1 : 0;
            sig.d = parse_int(toks[0], line_no);
            if (base == 1 && parse_int(toks[1], line_no) < 0) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": n_hint must be >= 0");
            }
            sig.rho = parse_int(toks[base + 1], line_no);
            try {
                sig.norm = Norm::parse(toks[base + 2]);
            } catch (const Error& e) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
            }
            radius = parse_int(toks[base + 3], line_no);
            if (sig.d < 1 || sig.rho < 1 || radius < 0) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": d, rho must be >= 1 and r >= 0");
            }
            have_header = true;
            continue;
        }
        if (toks.size() != static_cast<std::size_t>(sig.d)) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(sig.d) + " coordinates");
        }
        Offset off;
        for (const auto& t : toks) {
            const int c = parse_int(t, line_no);
            if (std::abs(c) > sig.rho * radius) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": coordinate out of ball range");
            }
            off.push_back(c);
        }
        positives.push_back(std::move(off));
    }
    if (!have_header) throw Error(ErrorKind::ParseError, "missing header line");
    try {
        return LocalConfig(sig, radius, positives);
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

LocalConfig load_motif_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open motif file " + path.string());
    return read_motif(in);
}

std::string serialize(const LocalConfig& cfg) {
    std::ostringstream out;
    const auto& sig = cfg.signature();
    out << sig.d << " 0 " << sig.rho << ' ' << sig.norm.to_string() << ' ' << cfg.radius() << '\n';
    for (const auto& off : cfg.positives()) {
        for (std::size_t i = 0; i < off.size(); ++i) out << (i ? " " : "") << off[i];
        out << '\n';
    }
    return out.str();
}

void save_motif_file(const std::filesystem::path& path, const LocalConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write motif file " + path.string());
    out << serialize(cfg);
}

std::uint64_t motif_hash(const LocalConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string motif_hash_hex(const LocalConfig& cfg) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << motif_hash(cfg);
    return out.str();
}

}  // namespace isingpa
