#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isingpa/error.hpp"
#include "isingpa/experiment.hpp"
#include "isingpa/local_config.hpp"

namespace {

int cmd_run(const std::string& config_path, unsigned jobs, const std::string& out) {
    const auto cfg = isingpa::load_config(config_path);
    std::optional<std::filesystem::path> out_dir;
    if (!out.empty()) out_dir = out;
    const auto outcome = isingpa::run(cfg, jobs, out_dir);
    std::size_t errors = 0;
    for (const auto& row : outcome.rows) {
        if (row.status != "ok") {
            ++errors;
            std::cerr << "cell n=" << row.n << " b=" << row.b << " target=" << row.target << ": " << row.error << '\n';
        }
    }
    std::cout << outcome.rows.size() << " rows (" << errors << " errors) written to " << outcome.csv_path.string()
              << " and " << outcome.json_path.string() << '\n';
    return outcome.any_error ? 1 : 0;
}

int cmd_validate(const std::string& config_path) {
    const auto cfg = isingpa::load_config(config_path);
    isingpa::validate_config(cfg);
    std::cout << cfg.echo();
    return 0;
}

int cmd_motif_info(const std::string& path) {
    const auto motif = isingpa::load_motif_file(path);
    std::printf("d=%d r=%d k=%d gamma=%d clean=%s\n", motif.signature().d, motif.radius(), isingpa::k(motif),
                isingpa::perimeter(motif), isingpa::is_clean(motif) ? "true" : "false");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson approximation experiments for Ising motif counts"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned jobs = 1;
    std::string out;
    auto* run = app.add_subcommand("run", "Run every cell of an experiment grid");
    run->add_option("config", config_path, "Configuration file")->required();
    run->add_option("--jobs", jobs, "Concurrent grid cells")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Output directory (overrides [output] dir)");

    auto* validate = app.add_subcommand("validate", "Parse and validate a configuration");
    validate->add_option("config", config_path, "Configuration file")->required();

    std::string motif_path;
    auto* info = app.add_subcommand("motif-info", "Print d, r, k, gamma and the clean flag of a motif");
    info->add_option("file", motif_path, "Motif file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, jobs, out);
        if (*validate) return cmd_validate(config_path);
        if (*info) return cmd_motif_info(motif_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
