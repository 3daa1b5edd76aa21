#include "csisim/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>

#include "csisim/cli.hpp"
#include "csisim/errors.hpp"
#include "csisim/presets.hpp"
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

using namespace csisim;
namespace fs = std::filesystem;

namespace {

fs::path test_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "csisim_pipeline_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ScenarioConfig quick_circular(double duration_s = 0.3) {
    ScenarioConfig c = make_noiseless(preset_config("paper-circular"));
    c.name = "quick";
    c.node_i.duration_s = duration_s;
    c.node_j.duration_s = duration_s;
    return c;
}

int cli(std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"csisim"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("preset catalog matches the reference scenarios") {
    const auto names = preset_names();
    REQUIRE(names.size() == 7);
    for (const auto& n : names) CHECK(is_preset(n));
    CHECK_FALSE(is_preset("paper-spiral"));

    const ScenarioConfig c = preset_config("paper-circular");
    CHECK(c.carrier.center_frequency_hz == 5.54e9);
    CHECK(c.carrier.subcarrier_count == 30);
    CHECK(c.node_i.kind == TrajectoryKind::circular);
    CHECK(c.node_i.radius_m == 0.3);
    CHECK(c.node_i.duration_s == 10.0);
    CHECK(c.node_i.sample_rate_hz == 100.0);
    CHECK(c.node_j.kind == TrajectoryKind::stationary);
    CHECK(c.node_j.start.pos.x == 3.858);
    CHECK(c.node_j.start.pos.y == 0.929);
    CHECK(c.cfo.delta_f_hz == 10.0);
    CHECK(c.cfo.c1 == 10000.0);
    CHECK(c.cfo.c2 == 200.0);
    CHECK(c.noise.snr_db == 3.0);
    CHECK(c.noise.sto_mean_s == 300e-6);
    CHECK(c.noise.epsilon_t_s == 100e-9);
    CHECK(c.rng_seed == 1);
    CHECK(c.loss_rate == 0.0);

    const ScenarioConfig l = preset_config("paper-linear");
    CHECK(l.node_i.kind == TrajectoryKind::linear);
    CHECK(l.node_i.length_m == doctest::Approx(2.0 * std::numbers::pi * 0.3).epsilon(1e-15));

    CHECK(preset_config("paper-stationary-10s").node_i.duration_s == 10.0);
    CHECK(preset_config("paper-stationary-30s").node_i.duration_s == 30.0);
    CHECK(preset_config("paper-stationary-60s").node_i.duration_s == 60.0);
    CHECK(preset_config("paper-stationary-120s").node_i.duration_s == 120.0);
    CHECK(preset_config("paper-stationary-300s").node_i.duration_s == 300.0);
    CHECK(preset_config("paper-stationary-300s").node_i.kind == TrajectoryKind::stationary);

    CHECK_THROWS_WITH_AS(preset_config("nope"), doctest::Contains("paper-circular"),
                         ValidationError);

    // Every preset passes its own validation.
    for (const auto& n : names) CHECK_NOTHROW(preset_config(n).validate());
}

TEST_CASE("make_noiseless strips impairments but keeps oscillator drift") {
    const ScenarioConfig c = make_noiseless(preset_config("paper-circular"));
    CHECK_FALSE(c.noise.awgn);
    CHECK(c.noise.sto_mean_s == 0.0);
    CHECK(c.noise.epsilon_t_s == 0.0);
    CHECK(c.loss_rate == 0.0);
    CHECK(c.cfo.delta_f_hz == 10.0);  // drift cancellation stays under test
    CHECK(c.cfo.c1 == 10000.0);
}

TEST_CASE("simulating the circular preset yields the documented stream sizes") {
    const ExperimentRecord record = simulate_scenario(preset_config("paper-circular"));
    CHECK(record.odometry_i.size() == 1001);
    CHECK(record.odometry_j.size() == 1001);
    CHECK(record.packets_fwd.size() == 1001);
    CHECK(record.packets_bwd.size() == 1001);
    CHECK(record.packets_fwd.front().csi.size() == 30);
    CHECK(record.config.noise.rng_seed == record.config.rng_seed);
}

TEST_CASE("stationary presets keep the distance constant") {
    const ExperimentRecord record = simulate_scenario(preset_config("paper-stationary-10s"));
    const Vec3 d0 = record.odometry_i.front().pos - record.odometry_j.front().pos;
    for (std::size_t k = 0; k < record.odometry_i.size(); ++k) {
        CHECK(record.odometry_i[k].pos == record.odometry_i.front().pos);
    }
    CHECK(d0.norm() > 0.0);
}

TEST_CASE("same seed gives byte-identical datasets, different seed does not") {
    const fs::path dir = test_dir("determinism");
    ScenarioConfig c = preset_config("paper-stationary-10s");

    write_dataset(simulate_scenario(c), dir / "a");
    write_dataset(simulate_scenario(c), dir / "b");
    for (const char* f :
         {"manifest.json", "odometry_i.csv", "odometry_j.csv", "packets_fwd.jsonl",
          "packets_bwd.jsonl"}) {
        CHECK(read_text_file(dir / "a" / f) == read_text_file(dir / "b" / f));
    }

    c.rng_seed = 2;
    c.noise.rng_seed = 2;
    write_dataset(simulate_scenario(c), dir / "c");
    CHECK(read_text_file(dir / "a" / "packets_fwd.jsonl") !=
          read_text_file(dir / "c" / "packets_fwd.jsonl"));
}

TEST_CASE("noiseless circular estimate lands within one grid step") {
    ScenarioConfig c = make_noiseless(preset_config("paper-circular"));
    c.node_i.duration_s = 2.0;
    c.node_j.duration_s = 2.0;
    const ExperimentRecord record = simulate_scenario(c);
    const EstimateResult res = estimate_record(record, AngleGrid::with_fixed_polar(90.0, 1.0));

    CHECK(res.summary.n_samples == 201);
    CHECK(res.summary.azimuth_error_deg <= 1.0);
    CHECK(res.summary.confidence > 0.0);
    CHECK(res.summary.confidence <= 1.0);
    CHECK(res.summary.warnings.empty());
    CHECK(res.summary.ground_truth_azimuth_deg >= -180.0);
    CHECK(res.summary.ground_truth_azimuth_deg < 180.0);
    const double err = std::abs(std::remainder(
        res.summary.peak_azimuth_deg - res.summary.ground_truth_azimuth_deg, 360.0));
    CHECK(res.summary.azimuth_error_deg == doctest::Approx(err).epsilon(1e-12));
    CHECK(res.summary.rng_seed == c.rng_seed);
}

TEST_CASE("zero-displacement datasets warn and stay uniform") {
    ScenarioConfig c = make_noiseless(preset_config("paper-stationary-10s"));
    c.node_i.duration_s = 0.5;
    c.node_j.duration_s = 0.5;
    const ExperimentRecord record = simulate_scenario(c);
    const EstimateResult res = estimate_record(record, AngleGrid::with_fixed_polar(90.0, 5.0));

    bool warned = false;
    for (const auto& w : res.summary.warnings) {
        if (w.find("zero displacement") != std::string::npos) warned = true;
    }
    CHECK(warned);
    for (double v : res.profile.values) CHECK(v == res.profile.values[0]);
}

TEST_CASE("packet loss shows up as unmatched discards") {
    ScenarioConfig c = quick_circular(1.0);
    c.loss_rate = 0.3;
    const ExperimentRecord record = simulate_scenario(c);
    CHECK(record.packets_bwd.size() < record.packets_fwd.size());

    const EstimateResult res = estimate_record(record, AngleGrid::with_fixed_polar(90.0, 5.0));
    CHECK(res.summary.discarded_unmatched ==
          record.packets_fwd.size() - record.packets_bwd.size());
    CHECK(res.summary.n_samples == record.packets_bwd.size());
}

TEST_CASE("estimate_dataset writes profile and summary artifacts") {
    const fs::path dir = test_dir("estimate");
    const ExperimentRecord record = simulate_scenario(quick_circular());
    const fs::path manifest = write_dataset(record, dir / "ds");

    const EstimateResult res = estimate_dataset(manifest);
    CHECK(fs::exists(dir / "ds" / "profile.csv"));
    CHECK(fs::exists(dir / "ds" / "profile.pgm"));
    CHECK(fs::exists(dir / "ds" / "summary.json"));

    const auto j = nlohmann::json::parse(read_text_file(dir / "ds" / "summary.json"));
    CHECK(j.contains("peak_azimuth_deg"));
    CHECK(j.contains("peak_polar_deg"));
    CHECK(j.contains("confidence"));
    CHECK(j.contains("n_samples"));
    CHECK(j.contains("total_displacement_m"));
    CHECK(j["n_samples"].get<std::size_t>() == res.summary.n_samples);
    CHECK(j["peak_azimuth_deg"].get<double>() == res.summary.peak_azimuth_deg);

    // The manifest now records its derived artifacts.
    const ExperimentRecord back = read_dataset(manifest);
    CHECK(back.outputs.at("profile_csv") == "profile.csv");
    CHECK(back.outputs.at("summary_json") == "summary.json");

    // The stored profile is the computed profile.
    const AoaProfile stored = read_profile_csv(dir / "ds" / "profile.csv");
    CHECK(stored.values == res.profile.values);
}

TEST_CASE("estimate_dataset honors grid overrides and out dirs") {
    const fs::path dir = test_dir("estimate_override");
    const fs::path manifest = write_dataset(simulate_scenario(quick_circular()), dir / "ds");

    GridSpec spec;
    spec.azimuth_step_deg = 5.0;
    spec.polar_step_deg = 5.0;
    spec.polar_fixed_deg = 90.0;
    const EstimateResult res = estimate_dataset(manifest, spec, dir / "alt");

    CHECK(res.profile.grid.polar_fixed());
    CHECK(res.profile.grid.n_az == 72);
    CHECK(fs::exists(dir / "alt" / "profile.csv"));
    CHECK(fs::exists(dir / "alt" / "summary.json"));
    // Artifacts written elsewhere do not claim slots in the dataset manifest.
    CHECK(read_dataset(manifest).outputs.empty());
}

TEST_CASE("run_scenario aggregates repetitions deterministically") {
    const fs::path dir = test_dir("run");
    const ScenarioConfig c = quick_circular();

    const RunAggregate agg = run_scenario(c, 3, 100, dir / "r1");
    REQUIRE(agg.reps.size() == 3);
    CHECK(agg.reps[0].rng_seed == 100);
    CHECK(agg.reps[1].rng_seed == 101);
    CHECK(agg.reps[2].rng_seed == 102);
    CHECK(fs::exists(dir / "r1" / "rep_000" / "manifest.json"));
    CHECK(fs::exists(dir / "r1" / "rep_002" / "summary.json"));
    CHECK(fs::exists(dir / "r1" / "aggregate.csv"));

    const RunAggregate again = run_scenario(c, 3, 100, dir / "r2");
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(again.reps[k].peak_azimuth_deg == agg.reps[k].peak_azimuth_deg);
        CHECK(again.reps[k].confidence == agg.reps[k].confidence);
        CHECK(again.reps[k].azimuth_error_deg == agg.reps[k].azimuth_error_deg);
    }
    CHECK(again.mean_error_deg == agg.mean_error_deg);

    const RunAggregate one = run_scenario(c, 1, 5, dir / "r3");
    CHECK(one.std_error_deg == 0.0);

    CHECK_THROWS_AS(run_scenario(c, 0, 1, dir / "r4"), ValidationError);

    const std::string table = format_run_table(agg);
    CHECK(table.find("mean azimuth error") != std::string::npos);
}

TEST_CASE("compare reports zero divergence against itself") {
    const ExperimentRecord record = simulate_scenario(quick_circular());
    const EstimateResult res = estimate_record(record, AngleGrid::with_fixed_polar(90.0, 5.0));

    const CompareResult r = compare_profiles(res.profile, res.profile);
    CHECK(r.max_rel_diff == 0.0);
    CHECK(r.mean_rel_diff == 0.0);
    CHECK(r.peak_az_shift_steps == 0);
    CHECK(r.peak_pol_shift_steps == 0);
}

TEST_CASE("compare rejects grid mismatches and reports real shifts") {
    ScenarioConfig circ = quick_circular(1.0);
    ScenarioConfig lin = make_noiseless(preset_config("paper-linear"));
    lin.name = "quick-linear";
    lin.node_i.duration_s = 1.0;
    lin.node_j.duration_s = 1.0;

    const AngleGrid grid = AngleGrid::with_fixed_polar(90.0, 5.0);
    const AoaProfile a = estimate_record(simulate_scenario(circ), grid).profile;
    const AoaProfile b = estimate_record(simulate_scenario(lin), grid).profile;

    const CompareResult r = compare_profiles(a, b);
    CHECK(r.max_rel_diff > 0.0);

    const AoaProfile c =
        estimate_record(simulate_scenario(circ), AngleGrid::with_fixed_polar(90.0, 10.0)).profile;
    CHECK_THROWS_AS(compare_profiles(a, c), ValidationError);
}

TEST_CASE("profiles load for comparison from manifests and csv files") {
    const fs::path dir = test_dir("compare_load");
    const fs::path manifest = write_dataset(simulate_scenario(quick_circular()), dir / "ds");

    // Manifest without outputs: recomputed on the configured grid.
    const AoaProfile fresh = load_profile_for_compare(manifest);
    CHECK(fresh.grid == make_grid(GridSpec{}));

    // After an estimate the stored profile is used.
    estimate_dataset(manifest, GridSpec{}, std::nullopt);
    const AoaProfile stored = load_profile_for_compare(manifest);
    CHECK(stored.values == fresh.values);

    const AoaProfile direct = load_profile_for_compare(dir / "ds" / "profile.csv");
    CHECK(direct.values == fresh.values);
}

TEST_CASE("cli covers the documented exit codes") {
    const fs::path dir = test_dir("cli");
    const std::string out = (dir / "out").string();

    CHECK(cli({"presets"}) == 0);
    CHECK(cli({"--help"}) == 0);
    CHECK(cli({}) == 1);                     // missing subcommand
    CHECK(cli({"sim"}) == 1);                // missing argument
    CHECK(cli({"frobnicate"}) == 1);         // unknown subcommand
    CHECK(cli({"sim", "missing.json"}) == 2);  // unreadable config file

    const fs::path bad = dir / "bad.json";
    write_text_file(bad, "{\"name\": 3}");
    CHECK(cli({"sim", bad.string().c_str()}) == 1);

    // sim a tiny config end to end.
    const fs::path cfg = dir / "quick.json";
    save_config(quick_circular(), cfg);
    CHECK(cli({"sim", cfg.string().c_str(), "--output", out.c_str()}) == 0);
    const fs::path manifest = dir / "out" / "quick" / "manifest.json";
    CHECK(fs::exists(manifest));

    CHECK(cli({"estimate", manifest.string().c_str(), "--grid-step", "5"}) == 0);
    CHECK(fs::exists(dir / "out" / "quick" / "summary.json"));

    CHECK(cli({"estimate", manifest.string().c_str(), "--grid-step", "5", "--polar-fixed",
               "90"}) == 0);

    CHECK(cli({"run", cfg.string().c_str(), "--reps", "2", "--seed", "9", "--output",
               out.c_str()}) == 0);
    CHECK(fs::exists(dir / "out" / "quick" / "rep_001" / "manifest.json"));
    CHECK(fs::exists(dir / "out" / "quick" / "aggregate.csv"));

    CHECK(cli({"run", cfg.string().c_str(), "--reps", "0"}) == 1);  // flag validation

    const std::string profile_a = (dir / "out" / "quick" / "profile.csv").string();
    CHECK(cli({"compare", manifest.string().c_str(), profile_a.c_str()}) == 0);
    CHECK(cli({"compare", profile_a.c_str(), profile_a.c_str()}) == 0);
    CHECK(cli({"compare", profile_a.c_str(), "missing.csv"}) == 2);
}

TEST_CASE("cli seed and noiseless flags reach the stored config") {
    const fs::path dir = test_dir("cli_flags");
    const fs::path cfg = dir / "quick.json";
    ScenarioConfig base = quick_circular();
    base.noise.awgn = true;
    base.noise.sto_mean_s = 300e-6;
    base.noise.epsilon_t_s = 100e-9;
    save_config(base, cfg);

    const std::string out = (dir / "out").string();
    CHECK(cli({"sim", cfg.string().c_str(), "--noiseless", "--seed", "77", "--output",
               out.c_str()}) == 0);

    const ExperimentRecord rec = read_dataset(dir / "out" / "quick" / "manifest.json");
    CHECK(rec.config.rng_seed == 77);
    CHECK_FALSE(rec.config.noise.awgn);
    CHECK(rec.config.noise.sto_mean_s == 0.0);
    CHECK(rec.config.noise.epsilon_t_s == 0.0);
}

TEST_CASE("cli falls back to the output root environment variable") {
    const fs::path dir = test_dir("cli_env");
    const fs::path cfg = dir / "quick.json";
    save_config(quick_circular(), cfg);

    const std::string root = (dir / "envroot").string();
    setenv("CSISIM_OUTPUT_ROOT", root.c_str(), 1);
    const int rc = cli({"sim", cfg.string().c_str()});
    unsetenv("CSISIM_OUTPUT_ROOT");

    CHECK(rc == 0);
    CHECK(fs::exists(dir / "envroot" / "quick" / "manifest.json"));
}
