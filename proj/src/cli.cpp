#include "csisim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "csisim/errors.hpp"
#include "csisim/pipeline.hpp"
#include "csisim/presets.hpp"

namespace csisim {
namespace {

namespace fs = std::filesystem;

constexpr const char* kOutputRootEnv = "CSISIM_OUTPUT_ROOT";

// Precedence: --output flag, then config.output_dir, then the environment
// variable, then ./out. Datasets land in <root>/<scenario name>.
fs::path resolve_output_root(const std::string& flag, const std::string& config_dir) {
    if (!flag.empty()) return flag;
    if (!config_dir.empty()) return config_dir;
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
    return "out";
}

// A scenario argument is either a preset name or a path to a config file.
ScenarioConfig resolve_config(const std::string& arg) {
    if (is_preset(arg)) return preset_config(arg);
    return load_config(arg);
}

void apply_overrides(ScenarioConfig& config, bool noiseless,
                     const std::optional<std::uint64_t>& seed) {
    if (noiseless) config = make_noiseless(std::move(config));
    if (seed) {
        config.rng_seed = *seed;
        config.noise.rng_seed = *seed;
    }
}

void print_summary(const RunSummary& s) {
    std::printf("scenario:            %s (seed %llu)\n", s.scenario.c_str(),
                static_cast<unsigned long long>(s.rng_seed));
    std::printf("peak azimuth:        %.3f deg (polar %.3f deg, confidence %.4f)\n",
                s.peak_azimuth_deg, s.peak_polar_deg, s.confidence);
    std::printf("ground truth:        %.3f deg -> error %.3f deg\n", s.ground_truth_azimuth_deg,
                s.azimuth_error_deg);
    std::printf("pairs used:          %zu (discarded %zu unmatched, %zu skew)\n", s.n_samples,
                s.discarded_unmatched, s.discarded_skew);
    std::printf("aperture:            %.4f m traveled, spacing mean %.4f m / max %.4f m\n",
                s.total_displacement_m, s.mean_spacing_m, s.max_spacing_m);
    if (s.top_peaks.size() > 1) {
        std::printf("top peaks:          ");
        for (const Peak& p : s.top_peaks) {
            std::printf(" az %.1f deg (mag %.3g)", p.azimuth_deg, p.magnitude);
        }
        std::printf("\n");
    }
    for (const std::string& w : s.warnings) {
        std::printf("warning:             %s\n", w.c_str());
    }
    std::printf("runtime:             %.3f s\n", s.runtime_s);
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Reciprocity-based CSI simulator and bearing estimator"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --output appear after the subcommand name

    std::string output_flag;
    app.add_option("--output,-o", output_flag, "Output root directory");

    // sim
    std::string sim_config;
    bool sim_noiseless = false;
    std::optional<std::uint64_t> sim_seed;
    CLI::App* sim = app.add_subcommand("sim", "Simulate a scenario and write a dataset");
    sim->add_option("config", sim_config, "Preset name or config JSON path")->required();
    sim->add_flag("--noiseless", sim_noiseless, "Disable AWGN, timing jitter, and loss");
    sim->add_option("--seed", sim_seed, "Override the config RNG seed");

    // estimate
    std::string est_manifest;
    std::optional<double> est_grid_step;
    std::optional<double> est_polar_fixed;
    std::string est_out;
    CLI::App* est = app.add_subcommand("estimate", "Estimate bearing from a dataset");
    est->add_option("manifest", est_manifest, "Path to dataset manifest.json")->required();
    est->add_option("--grid-step", est_grid_step, "Grid step in degrees (azimuth and polar)");
    est->add_option("--polar-fixed", est_polar_fixed, "Evaluate a single polar angle (degrees)");
    est->add_option("--out-dir", est_out, "Write profile/summary here instead of the dataset dir");

    // run
    std::string run_config;
    bool run_noiseless = false;
    int run_reps = 1;
    std::optional<std::uint64_t> run_seed;
    CLI::App* run = app.add_subcommand("run", "Simulate + estimate, repeated with seed offsets");
    run->add_option("config", run_config, "Preset name or config JSON path")->required();
    run->add_option("--reps", run_reps, "Number of repetitions")->check(CLI::PositiveNumber);
    run->add_option("--seed", run_seed, "Base seed (rep r uses seed + r)");
    run->add_flag("--noiseless", run_noiseless, "Disable AWGN, timing jitter, and loss");

    // compare
    std::string cmp_a;
    std::string cmp_b;
    CLI::App* cmp = app.add_subcommand("compare", "Compare two profiles or datasets");
    cmp->add_option("a", cmp_a, "manifest.json or profile.csv")->required();
    cmp->add_option("b", cmp_b, "manifest.json or profile.csv")->required();

    // presets
    CLI::App* pre = app.add_subcommand("presets", "List built-in scenario presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message
        return kExitValidation;
    }

    if (pre->parsed()) {
        for (const auto& name : preset_names()) std::printf("%s\n", name.c_str());
        return kExitOk;
    }

    if (sim->parsed()) {
        ScenarioConfig config = resolve_config(sim_config);
        apply_overrides(config, sim_noiseless, sim_seed);
        const fs::path dir = resolve_output_root(output_flag, config.output_dir) / config.name;
        ExperimentRecord record = simulate_scenario(config);
        const fs::path manifest = write_dataset(record, dir);
        std::printf("wrote %s (%zu fwd packets, %zu bwd packets)\n", manifest.string().c_str(),
                    record.packets_fwd.size(), record.packets_bwd.size());
        return kExitOk;
    }

    if (est->parsed()) {
        std::optional<GridSpec> grid;
        if (est_grid_step || est_polar_fixed) {
            GridSpec g;
            g.azimuth_step_deg = est_grid_step.value_or(1.0);
            g.polar_step_deg = g.azimuth_step_deg;
            g.polar_fixed_deg = est_polar_fixed;
            grid = g;
        }
        std::optional<fs::path> out;
        if (!est_out.empty()) out = est_out;
        EstimateResult result = estimate_dataset(est_manifest, grid, out);
        print_summary(result.summary);
        return kExitOk;
    }

    if (run->parsed()) {
        ScenarioConfig config = resolve_config(run_config);
        apply_overrides(config, run_noiseless, run_seed);
        const fs::path root = resolve_output_root(output_flag, config.output_dir) / config.name;
        RunAggregate agg = run_scenario(config, run_reps, run_seed, root);
        std::printf("%s", format_run_table(agg).c_str());
        std::printf("aggregate written to %s\n", (root / "aggregate.csv").string().c_str());
        return kExitOk;
    }

    if (cmp->parsed()) {
        const AoaProfile a = load_profile_for_compare(cmp_a);
        const AoaProfile b = load_profile_for_compare(cmp_b);
        std::printf("%s", format_compare(compare_profiles(a, b)).c_str());
        return kExitOk;
    }

    return kExitValidation;  // unreachable: require_subcommand(1)
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const InternalError& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
}

}  // namespace csisim
