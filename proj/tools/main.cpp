#include "elcoinv/config.hpp"
#include "elcoinv/errors.hpp"
#include "elcoinv/experiment.hpp"
#include "elcoinv/synth.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

namespace {

using namespace elcoinv;

void print_examples() {
    for (const std::string& name : example_names()) {
        const ExperimentSpec s = example_spec(name);
        std::printf("%-14s %-9s omega=%g  chi=%-10s g=%s\n", name.c_str(),
                    kind_name(s.geometry).c_str(), s.material.omega, s.chi_name.c_str(),
                    s.g_name.c_str());
    }
}

/// Resolves --config / --example plus the shared overrides into a RunConfig.
RunConfig resolve_config(const std::string& config_path, const std::string& example,
                         double noise, long long seed, const std::vector<std::string>& sets) {
    if (config_path.empty() == example.empty())
        throw ConfigError("exactly one of --config and --example must be given");
    RunConfig cfg =
        config_path.empty() ? config_for_example(example) : load_config(config_path);
    if (noise >= 0.0) apply_override(cfg, "noise.delta=" + std::to_string(noise));
    if (seed >= 0) apply_override(cfg, "noise.seed=" + std::to_string(seed));
    for (const std::string& s : sets) apply_override(cfg, s);
    return cfg;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        if (!item.empty()) {
            char* end = nullptr;
            const double v = std::strtod(item.c_str(), &end);
            if (end != item.c_str() + item.size())
                throw ConfigError("'" + item + "' is not a number");
            out.push_back(v);
        }
        pos = comma + 1;
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (double v : parse_double_list(text)) {
        if (v < 0 || v != std::floor(v))
            throw ConfigError("seed list entries must be nonnegative integers");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

int report_outcome(const RunReport& rep, const std::string& outdir) {
    if (rep.status == RunStatus::ok) {
        std::printf("%s: converged in %d rounds, boundary error %.3e, impedance error %.3e\n",
                    rep.config.spec.name.c_str(), rep.iterations, rep.boundary_error,
                    rep.impedance_error);
        std::printf("artifacts written to %s\n", outdir.c_str());
    } else {
        std::fprintf(stderr, "error: %s\n", rep.failure.c_str());
        std::fprintf(stderr, "partial artifacts written to %s\n", outdir.c_str());
    }
    return static_cast<int>(rep.status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastic Cauchy-data completion and impedance inversion toolkit"};
    app.require_subcommand(0, 1);
    bool list_examples = false;
    app.add_flag("--list-examples", list_examples, "print the built-in experiment presets");

    std::string run_config, run_example, run_out;
    double run_noise = -1.0;
    long long run_seed = -1;
    std::vector<std::string> run_sets;
    bool run_list = false;
    CLI::App* run = app.add_subcommand("run", "run one experiment and write its artifacts");
    run->add_option("--config", run_config, "config file to run");
    run->add_option("--example", run_example, "built-in preset name (see --list-examples)");
    run->add_option("--out", run_out, "artifact directory (default runs/<name>)");
    run->add_option("--noise", run_noise, "override the relative noise level");
    run->add_option("--seed", run_seed, "override the noise seed");
    run->add_option("--set", run_sets, "override one section.key=value (repeatable)");
    run->add_flag("--list-examples", run_list, "print the built-in experiment presets");

    std::string sw_config, sw_example, sw_out, sw_noise, sw_seeds = "1";
    std::vector<std::string> sw_sets;
    CLI::App* sw = app.add_subcommand("sweep", "run a noise/seed grid and aggregate the results");
    sw->add_option("--config", sw_config, "base config file");
    sw->add_option("--example", sw_example, "built-in preset name (see --list-examples)");
    sw->add_option("--out", sw_out, "sweep directory (default runs/<name>_sweep)");
    sw->add_option("--noise", sw_noise, "comma-separated noise levels, e.g. 0,0.01,0.05")
        ->required();
    sw->add_option("--seeds", sw_seeds, "comma-separated seeds (default: 1)");
    sw->add_option("--set", sw_sets, "override one section.key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(elcoinv::RunStatus::config);
    }

    try {
        if (list_examples || run_list) {
            print_examples();
            return 0;
        }
        if (run->parsed()) {
            const RunConfig cfg =
                resolve_config(run_config, run_example, run_noise, run_seed, run_sets);
            const std::string out = run_out.empty() ? "runs/" + cfg.spec.name : run_out;
            return report_outcome(run_experiment(cfg, out), out);
        }
        if (sw->parsed()) {
            const RunConfig cfg = resolve_config(sw_config, sw_example, -1.0, -1, sw_sets);
            const std::string out = sw_out.empty() ? "runs/" + cfg.spec.name + "_sweep" : sw_out;
            const auto reports =
                sweep(cfg, parse_double_list(sw_noise), parse_seed_list(sw_seeds), out);
            int failed = 0;
            for (const RunReport& r : reports) failed += r.status != RunStatus::ok;
            std::printf("sweep: %zu runs, %d failed; table written to %s/sweep.csv\n",
                        reports.size(), failed, out.c_str());
            return 0;
        }
        std::fprintf(stderr, "error: no command given (try --help)\n");
        return static_cast<int>(RunStatus::config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(RunStatus::config);
    } catch (const GeometryError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(RunStatus::geometry);
    } catch (const MorozovError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(RunStatus::morozov);
    } catch (const IterationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(RunStatus::iteration);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return static_cast<int>(RunStatus::internal);
    }
}
