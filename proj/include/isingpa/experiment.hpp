#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isingpa/lattice.hpp"
#include "isingpa/motif_count.hpp"
#include "isingpa/sampler.hpp"

namespace isingpa {

inline constexpr int kResultSchemaVersion = 1;

enum class Engine { exact, heat_bath, metropolis, cftp };
enum class Target { expectation, tv, moments, stein_chen, ring_check, threshold_sweep };

[[nodiscard]] std::string_view to_string(Engine e) noexcept;
[[nodiscard]] std::string_view to_string(Target t) noexcept;

/// A validated experiment grid. Every field has a default; parse_config
/// materializes them and echo() prints the resolved configuration.
struct RunConfig {
    // [lattice]
    int d = 1;
    int rho = 1;
    Norm norm = Norm::lp(1);
    std::vector<int> n_list;
    // [motifs]
    std::vector<std::filesystem::path> motif_files;
    // [schedule]
    double c = 1.0;
    std::optional<double> explicit_a;
    // [model]
    std::vector<double> b_list{0.0};
    // [engine]
    Engine engine = Engine::exact;
    std::size_t samples = 10000;
    SamplerSpec sampler;
    // [analysis]
    std::vector<Target> targets{Target::tv};
    MatchMode mode = MatchMode::exact_match;
    double epsilon = 0.5;
    // [output]
    std::filesystem::path out_dir = "results";
    std::string prefix = "results";
    // [run]
    std::uint64_t seed = 0;
    std::string run_id = "run";

    [[nodiscard]] LatticeSignature signature() const { return {d, rho, norm}; }
    [[nodiscard]] std::string echo() const;
};

/// Parses the sectioned key = value format. Relative motif paths resolve
/// against base_dir. Throws ParseError (with line and key) on syntax errors
/// and unknown keys, ValidationError on violated invariants.
[[nodiscard]] RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Loads every motif and checks n > 2 rho (r + 1) for each of them. Throws
/// ValidationError; motif files that fail to load are reported the same way.
void validate_config(const RunConfig& cfg);

struct ResultRow {
    std::string run_id;
    int d = 0;
    int n = 0;
    int rho = 0;
    std::string p;
    std::string motif_hash;
    std::optional<int> k;
    std::optional<int> gamma;
    double c = 0.0;
    double b = 0.0;
    std::optional<double> a;
    std::string mode;
    std::optional<double> lambda_target;
    std::optional<double> mean;
    std::optional<double> var;
    std::optional<double> m2;
    std::optional<double> m3;
    std::optional<double> tv;
    std::optional<double> tv_error_budget;
    std::optional<double> stein_chen_bound;
    std::size_t sample_size = 0;
    std::uint64_t seed = 0;
    std::string target;
    std::string status = "ok";
    std::string error;
    double wall_time_ms = 0.0;
};

struct RunOutcome {
    std::vector<ResultRow> rows;
    bool any_error = false;
    std::filesystem::path csv_path;
    std::filesystem::path json_path;
};

/// Runs every (n, motif, b, target) cell. Rows come back in canonical grid
/// order whatever the completion order; failures become error rows.
[[nodiscard]] RunOutcome run_grid(const RunConfig& cfg, unsigned jobs = 1);

/// run_grid plus writing <out>/<prefix>.csv and .json.
RunOutcome run(const RunConfig& cfg, unsigned jobs = 1, std::optional<std::filesystem::path> out_dir = std::nullopt);

[[nodiscard]] std::string to_csv(const RunConfig& cfg, const std::vector<ResultRow>& rows);
[[nodiscard]] std::string to_json(const RunConfig& cfg, const std::vector<ResultRow>& rows);

}  // namespace isingpa
