// patsim: run missions, comparisons and one-key sweeps of the PAT simulator.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patsim/config_io.hpp"
#include "patsim/output.hpp"

namespace fs = std::filesystem;
using namespace patsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    bool quiet = false;
};

struct CompareOptions {
    std::vector<std::string> variants;
    std::vector<double> rhos;
    int runs = 1;
    int threads = 0;
};

struct SweepOptions {
    std::string param;
    std::vector<std::string> values;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Scenario file (flat key = value); defaults when omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Base seed, overrides the config");
    cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--set", o.overrides, "Override a config key, KEY=VALUE (repeatable)");
    cmd->add_flag("--quiet", o.quiet, "No progress output");
}

void add_compare(CLI::App* cmd, CompareOptions& o) {
    cmd->add_option("--variants", o.variants, "Comma-separated: baseline,baseline_aoa,baseline_ccr,proposed")
        ->delimiter(',');
    cmd->add_option("--rhos", o.rhos, "Comma-separated CCR channel correlation coefficients in [0, 1]")
        ->delimiter(',');
    cmd->add_option("--runs", o.runs, "Paired-seed runs per cell")->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (default PATSIM_THREADS or all cores)");
}

ScenarioConfig build_config(const CommonOptions& o) {
    ScenarioConfig cfg = o.config_path.empty() ? ScenarioConfig{} : load_config(o.config_path);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set", "expected KEY=VALUE, got '" + kv + "'");
        }
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    validate(cfg);
    return cfg;
}

std::vector<AlgorithmVariant> parse_variants(const std::vector<std::string>& tokens, const ScenarioConfig& cfg) {
    if (tokens.empty()) {
        return {cfg.variant};
    }
    std::vector<AlgorithmVariant> out;
    for (const auto& t : tokens) {
        const auto v = variant_from_token(t);
        if (!v) {
            throw ConfigError("variants", "unknown variant '" + t + "'");
        }
        out.push_back(*v);
    }
    return out;
}

void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string());
    }
}

void write_config_echo(const fs::path& dir, const ScenarioConfig& cfg) {
    write_file_atomic(dir / "config_echo.txt", echo_config(cfg));
}

std::string mrad(double rad) { return format_float(rad * 1e3) + " mrad"; }

int cmd_run(const CommonOptions& o) {
    const ScenarioConfig cfg = build_config(o);
    const fs::path dir = o.out_dir;
    prepare_out_dir(dir);
    const auto result = run_mission(cfg);
    write_file_atomic(dir / "trace.csv", trace_csv(result.trace));
    write_file_atomic(dir / "summary.json", run_summary_json(cfg, result.metrics).dump(2) + "\n");
    write_config_echo(dir, cfg);
    if (!o.quiet) {
        const auto& m = result.metrics;
        std::cout << to_token(cfg.variant) << " seed " << cfg.seed << ": " << m.slots << " slots, "
                  << m.link_outage_count << " link outages, " << m.fine_tracking_outage_count
                  << " fine-tracking outages, connected " << format_float(m.connected_fraction) << ", p95 error "
                  << mrad(m.error_quantile(0.95)) << "\n";
    }
    return kExitOk;
}

void print_cells(const ComparisonSummary& s) {
    for (const auto& c : s.cells) {
        std::cout << to_token(c.variant) << " rho " << format_float(c.rho) << ": outages "
                  << format_float(c.outages_mean) << " +- " << format_float(c.outages_std) << ", acq "
                  << format_float(c.acq_time_mean_s) << " s, p95 " << mrad(c.err_p95) << "\n";
    }
}

int cmd_compare(const CommonOptions& o, const CompareOptions& c) {
    const ScenarioConfig cfg = build_config(o);
    const auto variants = parse_variants(c.variants, cfg);
    const std::vector<double> rhos = c.rhos.empty() ? std::vector<double>{cfg.rho} : c.rhos;
    const fs::path dir = o.out_dir;
    prepare_out_dir(dir);
    const auto summary = run_comparison(cfg, variants, rhos, c.runs, c.threads);
    write_file_atomic(dir / "summary.json", comparison_json(summary).dump(2) + "\n");
    write_config_echo(dir, cfg);
    if (!o.quiet) {
        print_cells(summary);
    }
    return kExitOk;
}

int cmd_sweep(const CommonOptions& o, const CompareOptions& c, const SweepOptions& s) {
    const ScenarioConfig base = build_config(o);
    const auto variants = parse_variants(c.variants, base);
    const std::vector<double> rhos = c.rhos.empty() ? std::vector<double>{base.rho} : c.rhos;
    if (s.values.empty()) {
        throw ConfigError("values", "at least one value is required");
    }
    std::vector<ScenarioConfig> points;
    for (const auto& v : s.values) {
        ScenarioConfig cfg = base;
        set_config_value(cfg, s.param, v);
        validate(cfg);
        points.push_back(cfg);
    }
    const fs::path dir = o.out_dir;
    prepare_out_dir(dir);

    nlohmann::ordered_json j;
    j["config"] = config_json(base);
    j["param"] = s.param;
    nlohmann::ordered_json out_points = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto summary = run_comparison(points[i], variants, rhos, c.runs, c.threads);
        if (!o.quiet) {
            std::cout << s.param << " = " << s.values[i] << "\n";
            print_cells(summary);
        }
        auto pj = comparison_json(summary);
        nlohmann::ordered_json point;
        point["value"] = s.values[i];
        point["seeds"] = std::move(pj["seeds"]);
        point["cells"] = std::move(pj["cells"]);
        out_points.push_back(std::move(point));
    }
    j["seeds"] = out_points.front()["seeds"];
    j["points"] = std::move(out_points);
    write_file_atomic(dir / "summary.json", j.dump(2) + "\n");
    write_config_echo(dir, base);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator for pointing, acquisition and tracking on a ground-air optical link.\n"
                 "Angles in files are radians; 1 mrad = 1e-3 rad."};
    app.require_subcommand(1);

    CommonOptions common;
    CompareOptions compare;
    SweepOptions sweep;

    auto* run = app.add_subcommand("run", "Simulate one mission; writes trace.csv, summary.json, config_echo.txt");
    add_common(run, common);

    auto* cmp = app.add_subcommand("compare", "Paired-seed comparison over variants and rhos; writes summary.json");
    add_common(cmp, common);
    add_compare(cmp, compare);

    auto* swp = app.add_subcommand("sweep", "Vary one config key; writes summary.json");
    add_common(swp, common);
    add_compare(swp, compare);
    swp->add_option("--param", sweep.param, "Config key to vary")->required();
    swp->add_option("--values", sweep.values, "Comma-separated values")->delimiter(',')->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(common);
        }
        if (cmp->parsed()) {
            return cmd_compare(common, compare);
        }
        return cmd_sweep(common, compare, sweep);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
