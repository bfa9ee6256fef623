#include "isingpa/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "isingpa/error.hpp"
#include "isingpa/gibbs_exact.hpp"
#include "isingpa/poisson.hpp"

namespace isingpa {

std::string_view to_string(Engine e) noexcept {
    switch (e) {
        case Engine::exact: return "exact";
        case Engine::heat_bath: return "heat_bath";
        case Engine::metropolis: return "metropolis";
        case Engine::cftp: return "cftp";
    }
    return "exact";
}

std::string_view to_string(Target t) noexcept {
    switch (t) {
        case Target::expectation: return "expectation";
        case Target::tv: return "tv";
        case Target::moments: return "moments";
        case Target::stein_chen: return "stein_chen";
        case Target::ring_check: return "ring_check";
        case Target::threshold_sweep: return "threshold_sweep";
    }
    return "tv";
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

[[noreturn]] void parse_fail(int line, const std::string& key, const std::string& why) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", key '" + key + "': " + why);
}

long long to_integer(const std::string& tok, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used == tok.size()) return v;
    } catch (const std::exception&) {
    }
    parse_fail(line, key, "expected an integer, got '" + tok + "'");
}

std::uint64_t to_unsigned(const std::string& tok, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        if (!tok.empty() && tok[0] != '-') {
            const unsigned long long v = std::stoull(tok, &used);
            if (used == tok.size()) return v;
        }
    } catch (const std::exception&) {
    }
    parse_fail(line, key, "expected a nonnegative integer, got '" + tok + "'");
}

double to_real(const std::string& tok, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used == tok.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    parse_fail(line, key, "expected a finite real, got '" + tok + "'");
}

std::string single(const std::string& value, int line, const std::string& key) {
    const auto toks = split_ws(value);
    if (toks.size() != 1) parse_fail(line, key, "expected exactly one value");
    return toks[0];
}

Engine parse_engine(const std::string& s, int line, const std::string& key) {
    if (s == "exact") return Engine::exact;
    if (s == "heat_bath") return Engine::heat_bath;
    if (s == "metropolis") return Engine::metropolis;
    if (s == "cftp") return Engine::cftp;
    parse_fail(line, key, "unknown engine '" + s + "'");
}

Target parse_target(const std::string& s, int line, const std::string& key) {
    for (Target t : {Target::expectation, Target::tv, Target::moments, Target::stein_chen, Target::ring_check,
                     Target::threshold_sweep}) {
        if (s == to_string(t)) return t;
    }
    parse_fail(line, key, "unknown target '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"lattice.d", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.d = static_cast<int>(to_integer(single(v, l, k), l, k));
         }},
        {"lattice.rho", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.rho = static_cast<int>(to_integer(single(v, l, k), l, k));
         }},
        {"lattice.p", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             try {
                 c.norm = Norm::parse(single(v, l, k));
             } catch (const Error& e) {
                 parse_fail(l, k, e.what());
             }
         }},
        {"lattice.n_list", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.n_list.clear();
             for (const auto& t : split_ws(v)) c.n_list.push_back(static_cast<int>(to_integer(t, l, k)));
         }},
        {"motifs.files", [](RunConfig& c, const std::string& v, int, const std::string&) {
             c.motif_files.clear();
             for (const auto& t : split_ws(v)) c.motif_files.emplace_back(t);
         }},
        {"schedule.c", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.c = to_real(single(v, l, k), l, k);
         }},
        {"schedule.a", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.explicit_a = to_real(single(v, l, k), l, k);
         }},
        {"model.b_list", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.b_list.clear();
             for (const auto& t : split_ws(v)) c.b_list.push_back(to_real(t, l, k));
         }},
        {"engine.kind", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.engine = parse_engine(single(v, l, k), l, k);
         }},
        {"engine.samples", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.samples = static_cast<std::size_t>(to_unsigned(single(v, l, k), l, k));
         }},
        {"engine.burn_in_sweeps", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.sampler.burn_in_sweeps = static_cast<int>(to_integer(single(v, l, k), l, k));
         }},
        {"engine.thinning_sweeps", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.sampler.thinning_sweeps = static_cast<int>(to_integer(single(v, l, k), l, k));
         }},
        {"engine.chains", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.sampler.chains = static_cast<int>(to_integer(single(v, l, k), l, k));
         }},
        {"engine.max_cftp_sweeps", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.sampler.max_cftp_sweeps = to_unsigned(single(v, l, k), l, k);
         }},
        {"analysis.targets", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.targets.clear();
             for (const auto& t : split_ws(v)) c.targets.push_back(parse_target(t, l, k));
         }},
        {"analysis.mode", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             try {
                 c.mode = parse_match_mode(single(v, l, k));
             } catch (const Error& e) {
                 parse_fail(l, k, e.what());
             }
         }},
        {"analysis.epsilon", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.epsilon = to_real(single(v, l, k), l, k);
         }},
        {"output.dir", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.out_dir = single(v, l, k);
         }},
        {"output.prefix", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.prefix = single(v, l, k);
         }},
        {"run.seed", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.seed = to_unsigned(single(v, l, k), l, k);
         }},
        {"run.run_id", [](RunConfig& c, const std::string& v, int l, const std::string& k) {
             c.run_id = single(v, l, k);
         }},
    };
    return table;
}

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorKind::ValidationError, why); }

void check_invariants(const RunConfig& c) {
    if (c.d < 1) invalid("lattice.d must be >= 1");
    if (c.rho < 1) invalid("lattice.rho must be >= 1");
    if (c.n_list.empty()) invalid("lattice.n_list must not be empty");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
        if (c.n_list[i] < 1) invalid("lattice.n_list entries must be >= 1");
        if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) invalid("lattice.n_list must be strictly increasing");
    }
    if (c.motif_files.empty()) invalid("motifs.files must name at least one motif file");
    if (!(c.c > 0.0)) invalid("schedule.c must be > 0");
    if (c.b_list.empty()) invalid("model.b_list must not be empty");
    if (c.targets.empty()) invalid("analysis.targets must not be empty");
    if (c.engine != Engine::exact && c.samples < 1) invalid("engine.samples must be >= 1");
    if (c.sampler.burn_in_sweeps < 0 || c.sampler.thinning_sweeps < 0) invalid("burn-in and thinning must be >= 0");
    if (c.sampler.chains < 1) invalid("engine.chains must be >= 1");
    if (c.prefix.empty()) invalid("output.prefix must not be empty");
}

// Loads what it can; returns per-motif load errors (empty string = loaded).
std::vector<std::string> check_motif_geometry(const RunConfig& c, bool strict) {
    std::vector<std::string> errors;
    for (const auto& path : c.motif_files) {
        try {
            const auto motif = load_motif_file(path);
            if (!(motif.signature() == c.signature())) {
                throw Error(ErrorKind::LatticeMismatch, path.string() + " built for " + to_string(motif.signature()));
            }
            for (int n : c.n_list) {
                if (n <= 2 * c.rho * (motif.radius() + 1)) {
                    invalid("n=" + std::to_string(n) + " violates the ball-overlap rule n > 2*rho*(r+1) = " +
                            std::to_string(2 * c.rho * (motif.radius() + 1)) + " for motif " + path.string());
                }
            }
            errors.emplace_back();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ValidationError) throw;
            if (strict) invalid("motif " + path.string() + ": " + e.what());
            errors.emplace_back(e.what());
        }
    }
    return errors;
}

}  // namespace

std::string RunConfig::echo() const {
    std::ostringstream o;
    auto join_i = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
        return s;
    };
    o << "[lattice]\n"
      << "d = " << d << "\nrho = " << rho << "\np = " << norm.to_string() << "\nn_list = " << join_i(n_list) << "\n";
    o << "[motifs]\nfiles =";
    for (const auto& f : motif_files) o << ' ' << f.filename().string();
    o << "\n[schedule]\nc = " << fmt_double(c) << "\n";
    if (explicit_a) o << "a = " << fmt_double(*explicit_a) << "\n";
    o << "[model]\nb_list =";
    for (double b : b_list) o << ' ' << fmt_double(b);
    o << "\n[engine]\nkind = " << to_string(engine) << "\nsamples = " << samples
      << "\nburn_in_sweeps = " << sampler.burn_in_sweeps << "\nthinning_sweeps = " << sampler.thinning_sweeps
      << "\nchains = " << sampler.chains << "\nmax_cftp_sweeps = " << sampler.max_cftp_sweeps << "\n";
    o << "[analysis]\ntargets =";
    for (Target t : targets) o << ' ' << to_string(t);
    o << "\nmode = " << to_string(mode) << "\nepsilon = " << fmt_double(epsilon) << "\n";
    o << "[output]\nprefix = " << prefix << "\n";
    o << "[run]\nseed = " << seed << "\nrun_id = " << run_id << "\n";
    return o.str();
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    RunConfig cfg;
    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(line_no, line, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(line_no, line, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        auto it = setters().find(full);
        if (it == setters().end()) parse_fail(line_no, full, "unknown key");
        if (!seen.insert(full).second) parse_fail(line_no, full, "duplicate key");
        it->second(cfg, value, line_no, full);
    }
    for (auto& f : cfg.motif_files) {
        if (f.is_relative() && !base_dir.empty()) f = base_dir / f;
    }
    check_invariants(cfg);
    check_motif_geometry(cfg, /*strict=*/false);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

void validate_config(const RunConfig& cfg) {
    check_invariants(cfg);
    check_motif_geometry(cfg, /*strict=*/true);
}

namespace {

struct LawKey {
    double a;
    int which;  // 0 = motif, 1 = ringed motif
    MatchMode mode;
    friend bool operator<(const LawKey& x, const LawKey& y) {
        return std::tie(x.a, x.which, x.mode) < std::tie(y.a, y.which, y.mode);
    }
};

// Count laws for one (n, motif, b) group; measures or sample batches are
// built once per field value.
class LawCache {
public:
    LawCache(const RunConfig& cfg, std::shared_ptr<const TorusLattice> lat, const LocalConfig& motif, double b,
             std::uint64_t stream)
        : cfg_(cfg), lat_(std::move(lat)), motif_(motif), b_(b), stream_(stream) {}

    const CountDistribution& law(double a, int which, MatchMode mode) {
        const LawKey key{a, which, mode};
        if (auto it = laws_.find(key); it != laws_.end()) return it->second;
        const LocalConfig m = which == 0 ? motif_ : ring(motif_);
        if (cfg_.engine == Engine::exact) {
            auto mit = measures_.find(a);
            if (mit == measures_.end()) mit = measures_.emplace(a, ExactMeasure::build(lat_, {a, b_})).first;
            return laws_.emplace(key, count_distribution_exact(mit->second, m, mode)).first->second;
        }
        auto sit = samples_.find(a);
        if (sit == samples_.end()) {
            SamplerSpec spec = cfg_.sampler;
            spec.kind = cfg_.engine == Engine::heat_bath    ? SamplerKind::heat_bath
                        : cfg_.engine == Engine::metropolis ? SamplerKind::metropolis
                                                            : SamplerKind::cftp;
            spec.seed = derive_seed(stream_, std::hash<double>{}(a));
            sit = samples_.emplace(a, sample_batch(lat_, ModelParams{a, b_}, spec, cfg_.samples)).first;
        }
        const MotifScanner scanner(*lat_, m, mode);
        std::vector<std::int64_t> counts;
        counts.reserve(sit->second.size());
        for (const auto& s : sit->second) counts.push_back(scanner.count(s.spins()));
        return laws_.emplace(key, CountDistribution::from_samples(counts)).first->second;
    }

private:
    const RunConfig& cfg_;
    std::shared_ptr<const TorusLattice> lat_;
    LocalConfig motif_;
    double b_;
    std::uint64_t stream_;
    std::map<double, ExactMeasure> measures_;
    std::map<double, std::vector<SpinConfig>> samples_;
    std::map<LawKey, CountDistribution> laws_;
};

void fill_moments(ResultRow& row, const CountDistribution& law) {
    row.mean = law.mean();
    row.var = law.variance();
    row.m2 = law.factorial_moment(2);
    row.m3 = law.factorial_moment(3);
    row.sample_size = law.sample_size();
}

void compute_cell(ResultRow& row, Target target, const RunConfig& cfg, LawCache& cache, const LocalConfig& motif,
                  int n) {
    const int kk = k(motif);
    const int gamma = perimeter(motif);
    auto scheduled_field = [&]() -> double {
        if (cfg.explicit_a) return *cfg.explicit_a;
        return FieldSchedule(cfg.c, kk, cfg.d).field(n);
    };
    if (kk >= 1) row.lambda_target = std::pow(cfg.c, kk) * std::exp(-2.0 * row.b * gamma);
    row.mode = std::string(to_string(cfg.mode));

    switch (target) {
        case Target::expectation: {
            row.a = scheduled_field();
            const auto& law = cache.law(*row.a, 0, cfg.mode);
            row.mean = law.mean();
            row.var = law.variance();
            row.sample_size = law.sample_size();
            break;
        }
        case Target::moments: {
            row.a = scheduled_field();
            fill_moments(row, cache.law(*row.a, 0, cfg.mode));
            break;
        }
        case Target::tv: {
            row.a = scheduled_field();
            const auto& law = cache.law(*row.a, 0, cfg.mode);
            fill_moments(row, law);
            if (!row.lambda_target) throw Error(ErrorKind::InvalidSchedule, "Poisson target needs k(eta) >= 1");
            const auto tv = tv_distance(law, PoissonTarget(*row.lambda_target));
            row.tv = tv.value;
            row.tv_error_budget = tv.error_budget;
            break;
        }
        case Target::stein_chen: {
            if (row.b < 0.0) throw Error(ErrorKind::FerromagneticOnly, "Stein-Chen bound needs b >= 0");
            row.a = scheduled_field();
            row.mode = std::string(to_string(MatchMode::superset_match));
            const auto& law = cache.law(*row.a, 0, MatchMode::superset_match);
            fill_moments(row, law);
            const auto tv = tv_distance(law, PoissonTarget(law.mean()));
            row.tv = tv.value;
            row.tv_error_budget = tv.error_budget;
            row.stein_chen_bound = stein_chen_bound(law, static_cast<std::size_t>(std::pow(n, cfg.d)));
            break;
        }
        case Target::ring_check: {
            row.a = scheduled_field();
            row.mode = std::string(to_string(MatchMode::exact_match));
            const auto& plain = cache.law(*row.a, 0, MatchMode::exact_match);
            const auto& ringed = cache.law(*row.a, 1, MatchMode::exact_match);
            const auto tv = tv_distance(ringed, plain);
            row.tv = tv.value;
            row.tv_error_budget = tv.error_budget;
            row.mean = std::abs(ringed.mean() - plain.mean());
            row.sample_size = plain.sample_size();
            break;
        }
        case Target::threshold_sweep: {
            if (kk < 1) throw Error(ErrorKind::InvalidSchedule, "threshold sweep needs k(eta) >= 1");
            row.a = 0.5 * (std::log(cfg.c) - (static_cast<double>(cfg.d) / kk + cfg.epsilon) * std::log(static_cast<double>(n)));
            fill_moments(row, cache.law(*row.a, 0, cfg.mode));
            break;
        }
    }
}

}  // namespace

RunOutcome run_grid(const RunConfig& cfg, unsigned jobs) {
    check_invariants(cfg);
    check_motif_geometry(cfg, /*strict=*/false);

    std::vector<std::optional<LocalConfig>> motifs;
    std::vector<std::string> motif_errors;
    for (const auto& path : cfg.motif_files) {
        try {
            auto m = load_motif_file(path);
            if (!(m.signature() == cfg.signature())) {
                throw Error(ErrorKind::LatticeMismatch, path.string() + " built for " + to_string(m.signature()));
            }
            motifs.emplace_back(std::move(m));
            motif_errors.emplace_back();
        } catch (const Error& e) {
            motifs.emplace_back(std::nullopt);
            motif_errors.emplace_back(e.what());
        }
    }

    const std::size_t N = cfg.n_list.size(), M = motifs.size(), B = cfg.b_list.size(), T = cfg.targets.size();
    RunOutcome out;
    out.rows.resize(N * M * B * T);

    auto run_group = [&](std::size_t group) {
        const std::size_t bi = group % B;
        const std::size_t mi = (group / B) % M;
        const std::size_t ni = group / (B * M);
        const int n = cfg.n_list[ni];
        const double b = cfg.b_list[bi];
        std::shared_ptr<const TorusLattice> lat;
        std::string group_error = motif_errors[mi];
        if (group_error.empty()) {
            try {
                lat = std::make_shared<const TorusLattice>(cfg.d, n, cfg.rho, cfg.norm);
                if (cfg.engine == Engine::exact && lat->site_count() > exact_site_cap()) {
                    throw Error(ErrorKind::TooLargeForExact, "n^d=" + std::to_string(lat->site_count()) +
                                                                 " exceeds exact cap " + std::to_string(exact_site_cap()));
                }
            } catch (const Error& e) {
                group_error = e.what();
            }
        }
        std::optional<LawCache> cache;
        if (group_error.empty()) cache.emplace(cfg, lat, *motifs[mi], b, derive_seed(cfg.seed, group));

        for (std::size_t ti = 0; ti < T; ++ti) {
            auto& row = out.rows[group * T + ti];
            const auto start = std::chrono::steady_clock::now();
            row.run_id = cfg.run_id;
            row.d = cfg.d;
            row.n = n;
            row.rho = cfg.rho;
            row.p = cfg.norm.to_string();
            row.c = cfg.c;
            row.b = b;
            row.seed = cfg.seed;
            row.target = std::string(to_string(cfg.targets[ti]));
            row.mode = std::string(to_string(cfg.mode));
            if (motifs[mi]) {
                row.motif_hash = motif_hash_hex(*motifs[mi]);
                row.k = k(*motifs[mi]);
                row.gamma = perimeter(*motifs[mi]);
            }
            if (!group_error.empty()) {
                row.status = "error";
                row.error = group_error;
            } else {
                try {
                    compute_cell(row, cfg.targets[ti], cfg, *cache, *motifs[mi], n);
                } catch (const Error& e) {
                    row.status = "error";
                    row.error = e.what();
                } catch (const std::exception& e) {
                    row.status = "error";
                    row.error = e.what();
                }
            }
            row.wall_time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        }
    };

    const std::size_t groups = N * M * B;
    const unsigned workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(groups)));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t g = next++; g < groups; g = next++) run_group(g);
        });
    }
    for (auto& t : pool) t.join();

    for (const auto& r : out.rows) out.any_error = out.any_error || r.status != "ok";
    return out;
}

namespace {

const char* const kColumns[] = {"run_id", "d", "n", "rho", "p", "motif_hash", "k", "gamma", "c", "b", "a",
                                "mode", "lambda_target", "mean", "var", "M2", "M3", "tv_exact_or_empirical",
                                "tv_error_budget", "stein_chen_bound", "sample_size", "seed", "target", "status",
                                "error", "wall_time_ms"};

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }
std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

nlohmann::json jopt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }
nlohmann::json jopt(const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string to_csv(const RunConfig& cfg, const std::vector<ResultRow>& rows) {
    std::ostringstream o;
    o << "# schema_version=" << kResultSchemaVersion << '\n';
    std::istringstream echo(cfg.echo());
    for (std::string line; std::getline(echo, line);) o << "# " << line << '\n';
    for (std::size_t i = 0; i < std::size(kColumns); ++i) o << (i ? "," : "") << kColumns[i];
    o << '\n';
    for (const auto& r : rows) {
        o << csv_escape(r.run_id) << ',' << r.d << ',' << r.n << ',' << r.rho << ',' << r.p << ',' << r.motif_hash << ','
          << opt(r.k) << ',' << opt(r.gamma) << ',' << fmt_double(r.c) << ',' << fmt_double(r.b) << ',' << opt(r.a)
          << ',' << r.mode << ',' << opt(r.lambda_target) << ',' << opt(r.mean) << ',' << opt(r.var) << ','
          << opt(r.m2) << ',' << opt(r.m3) << ',' << opt(r.tv) << ',' << opt(r.tv_error_budget) << ','
          << opt(r.stein_chen_bound) << ',' << r.sample_size << ',' << r.seed << ',' << r.target << ',' << r.status
          << ',' << csv_escape(r.error) << ',' << fmt_double(r.wall_time_ms) << '\n';
    }
    return o.str();
}

std::string to_json(const RunConfig& cfg, const std::vector<ResultRow>& rows) {
    nlohmann::json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["config"] = cfg.echo();
    doc["columns"] = std::vector<std::string>(std::begin(kColumns), std::end(kColumns));
    auto& arr = doc["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["run_id"] = r.run_id;
        j["d"] = r.d;
        j["n"] = r.n;
        j["rho"] = r.rho;
        j["p"] = r.p;
        j["motif_hash"] = r.motif_hash;
        j["k"] = jopt(r.k);
        j["gamma"] = jopt(r.gamma);
        j["c"] = r.c;
        j["b"] = r.b;
        j["a"] = jopt(r.a);
        j["mode"] = r.mode;
        j["lambda_target"] = jopt(r.lambda_target);
        j["mean"] = jopt(r.mean);
        j["var"] = jopt(r.var);
        j["M2"] = jopt(r.m2);
        j["M3"] = jopt(r.m3);
        j["tv_exact_or_empirical"] = jopt(r.tv);
        j["tv_error_budget"] = jopt(r.tv_error_budget);
        j["stein_chen_bound"] = jopt(r.stein_chen_bound);
        j["sample_size"] = r.sample_size;
        j["seed"] = r.seed;
        j["target"] = r.target;
        j["status"] = r.status;
        j["error"] = r.error;
        j["wall_time_ms"] = r.wall_time_ms;
        arr.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

RunOutcome run(const RunConfig& cfg, unsigned jobs, std::optional<std::filesystem::path> out_dir) {
    RunOutcome out = run_grid(cfg, jobs);
    const auto dir = out_dir.value_or(cfg.out_dir);
    std::filesystem::create_directories(dir);
    out.csv_path = dir / (cfg.prefix + ".csv");
    out.json_path = dir / (cfg.prefix + ".json");
    std::ofstream csv(out.csv_path);
    std::ofstream json(out.json_path);
    if (!csv || !json) throw Error(ErrorKind::IoError, "cannot write results into " + dir.string());
    csv << to_csv(cfg, out.rows);
    json << to_json(cfg, out.rows);
    return out;
}

}  // namespace isingpa
