#include "csisim/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "csisim/errors.hpp"
#include "csisim/trajectory.hpp"
#include "json.hpp"

namespace csisim {
namespace {

using J = nlohmann::ordered_json;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double wrap_deg_180(double deg) {
    const double w = std::remainder(deg, 360.0);
    return w >= 180.0 ? w - 360.0 : w;
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
    J j;
    j["scenario"] = s.scenario;
    j["rng_seed"] = s.rng_seed;
    j["peak_azimuth_deg"] = s.peak_azimuth_deg;
    j["peak_polar_deg"] = s.peak_polar_deg;
    j["confidence"] = s.confidence;
    j["n_samples"] = s.n_samples;
    j["total_displacement_m"] = s.total_displacement_m;
    j["ground_truth_azimuth_deg"] = s.ground_truth_azimuth_deg;
    j["azimuth_error_deg"] = s.azimuth_error_deg;
    j["discarded_unmatched"] = s.discarded_unmatched;
    j["discarded_skew"] = s.discarded_skew;
    j["mean_spacing_m"] = s.mean_spacing_m;
    j["max_spacing_m"] = s.max_spacing_m;
    j["runtime_s"] = s.runtime_s;
    J peaks = J::array();
    for (const Peak& p : s.top_peaks) {
        peaks.push_back(J{{"azimuth_deg", p.azimuth_deg},
                          {"polar_deg", p.polar_deg},
                          {"magnitude", p.magnitude}});
    }
    j["top_peaks"] = std::move(peaks);
    j["warnings"] = s.warnings;
    return j.dump(2) + "\n";
}

ExperimentRecord simulate_scenario(const ScenarioConfig& config) {
    config.validate();
    NoiseConfig noise = config.noise;
    noise.rng_seed = config.rng_seed;

    ExperimentRecord record;
    record.config = config;
    // Canonical form: a stored config carries one seed, at the top level.
    record.config.noise.rng_seed = config.rng_seed;
    record.odometry_i = generate_trajectory(config.node_i);
    record.odometry_j = generate_trajectory(config.node_j);
    PacketStreams streams = run_exchange(record.odometry_i, record.odometry_j, config.carrier,
                                         config.cfo, noise, config.loss_rate, config.ids);
    record.packets_fwd = std::move(streams.fwd);
    record.packets_bwd = std::move(streams.bwd);
    return record;
}

EstimateResult estimate_record(const ExperimentRecord& record, const AngleGrid& grid) {
    const ScenarioConfig& config = record.config;
    PairingResult paired = pair_packets(record.packets_fwd, record.packets_bwd,
                                        config.noise.epsilon_t_s, record.odometry_i);

    const auto t0 = std::chrono::steady_clock::now();
    AoaProfile profile = bartlett_profile(paired.pairs, record.odometry_i, grid,
                                          config.carrier.wavelength_m(), config.estimator);
    const auto t1 = std::chrono::steady_clock::now();

    // Ground truth lives in the frame the profile is computed in: the
    // centroid of the poses that actually entered the aperture, with the
    // heading of the first paired pose.
    std::vector<Pose> used;
    used.reserve(paired.pairs.size());
    for (const CsiPair& p : paired.pairs) used.push_back(p.rx_pose);
    Pose ref;
    ref.pos = centroid(used);
    ref.yaw = used.front().yaw;
    Pose tx;
    tx.pos = centroid(record.odometry_j);
    const double gt_deg = ground_truth_bearing(ref, tx) * kRadToDeg;

    RunSummary s;
    s.scenario = config.name;
    s.rng_seed = config.rng_seed;
    s.peak_azimuth_deg = profile.peak.azimuth_deg;
    s.peak_polar_deg = profile.peak.polar_deg;
    s.confidence = profile.confidence;
    s.n_samples = profile.n_samples;
    s.total_displacement_m = profile.total_displacement_m;
    s.ground_truth_azimuth_deg = gt_deg;
    s.azimuth_error_deg = std::abs(wrap_deg_180(s.peak_azimuth_deg - gt_deg));
    s.discarded_unmatched = paired.stats.discarded_unmatched;
    s.discarded_skew = paired.stats.discarded_skew;
    const SpacingStats spacing = sample_spacing(record.odometry_i);
    s.mean_spacing_m = spacing.mean_m;
    s.max_spacing_m = spacing.max_m;
    s.runtime_s = std::chrono::duration<double>(t1 - t0).count();
    s.top_peaks = extract_peaks(profile, 3, 5.0);
    s.warnings = profile.warnings;
    return {std::move(profile), std::move(s)};
}

EstimateResult estimate_dataset(const std::filesystem::path& manifest_path,
                                const std::optional<GridSpec>& grid_override,
                                const std::optional<std::filesystem::path>& out_dir) {
    namespace fs = std::filesystem;
    ExperimentRecord record = read_dataset(manifest_path);
    const GridSpec grid_spec = grid_override.value_or(record.config.grid);
    EstimateResult result = estimate_record(record, make_grid(grid_spec));

    const fs::path dataset_dir = manifest_path.parent_path();
    const fs::path target = out_dir.value_or(dataset_dir);
    std::error_code ec;
    fs::create_directories(target, ec);
    if (ec) throw IoError("cannot create directory " + target.string());

    write_profile_csv(result.profile, target / "profile.csv");
    write_profile_pgm(result.profile, target / "profile.pgm");
    write_text_file(target / "summary.json", summary_to_json(result.summary));

    if (fs::equivalent(target, dataset_dir, ec) && !ec) {
        update_manifest_outputs(manifest_path, {{"profile_csv", "profile.csv"},
                                                {"profile_pgm", "profile.pgm"},
                                                {"summary_json", "summary.json"}});
    }
    return result;
}

RunAggregate run_scenario(const ScenarioConfig& config, int reps,
                          std::optional<std::uint64_t> base_seed,
                          const std::filesystem::path& out_root) {
    if (reps < 1) throw ValidationError("reps must be at least 1");
    const std::uint64_t seed0 = base_seed.value_or(config.rng_seed);

    RunAggregate agg;
    for (int r = 0; r < reps; ++r) {
        ScenarioConfig cfg = config;
        cfg.rng_seed = seed0 + static_cast<std::uint64_t>(r);
        cfg.noise.rng_seed = cfg.rng_seed;

        char rep_name[16];
        std::snprintf(rep_name, sizeof(rep_name), "rep_%03d", r);
        const std::filesystem::path rep_dir = out_root / rep_name;

        ExperimentRecord record = simulate_scenario(cfg);
        const std::filesystem::path manifest = write_dataset(record, rep_dir);
        EstimateResult res = estimate_dataset(manifest);
        agg.reps.push_back(std::move(res.summary));
    }

    double sum = 0.0;
    double sum_conf = 0.0;
    double sum_rt = 0.0;
    for (const RunSummary& s : agg.reps) {
        sum += s.azimuth_error_deg;
        sum_conf += s.confidence;
        sum_rt += s.runtime_s;
    }
    const double n = static_cast<double>(agg.reps.size());
    agg.mean_error_deg = sum / n;
    agg.mean_confidence = sum_conf / n;
    agg.mean_runtime_s = sum_rt / n;
    if (agg.reps.size() > 1) {
        double ss = 0.0;
        for (const RunSummary& s : agg.reps) {
            const double d = s.azimuth_error_deg - agg.mean_error_deg;
            ss += d * d;
        }
        agg.std_error_deg = std::sqrt(ss / (n - 1.0));
    }

    std::string csv =
        "rep,rng_seed,ground_truth_azimuth_deg,peak_azimuth_deg,azimuth_error_deg,"
        "confidence,n_samples,discarded,runtime_s\n";
    for (std::size_t r = 0; r < agg.reps.size(); ++r) {
        const RunSummary& s = agg.reps[r];
        csv += std::to_string(r);
        csv += ',';
        csv += std::to_string(s.rng_seed);
        csv += ',';
        csv += format_double(s.ground_truth_azimuth_deg);
        csv += ',';
        csv += format_double(s.peak_azimuth_deg);
        csv += ',';
        csv += format_double(s.azimuth_error_deg);
        csv += ',';
        csv += format_double(s.confidence);
        csv += ',';
        csv += std::to_string(s.n_samples);
        csv += ',';
        csv += std::to_string(s.discarded_unmatched + s.discarded_skew);
        csv += ',';
        csv += format_double(s.runtime_s);
        csv += '\n';
    }
    write_text_file(out_root / "aggregate.csv", csv);
    return agg;
}

std::string format_run_table(const RunAggregate& agg) {
    std::string out;
    out += "rep  seed        gt_az    est_az   err_deg  conf    pairs  disc  runtime_s\n";
    for (std::size_t r = 0; r < agg.reps.size(); ++r) {
        const RunSummary& s = agg.reps[r];
        char line[160];
        std::snprintf(line, sizeof(line),
                      "%-4zu %-11llu %8.3f %8.3f %8.3f  %6.4f %6zu %5zu  %9.3f\n", r,
                      static_cast<unsigned long long>(s.rng_seed), s.ground_truth_azimuth_deg,
                      s.peak_azimuth_deg, s.azimuth_error_deg, s.confidence, s.n_samples,
                      s.discarded_unmatched + s.discarded_skew, s.runtime_s);
        out += line;
    }
    out += "mean azimuth error: " + fmt("%.3f", agg.mean_error_deg) + " deg";
    if (agg.reps.size() > 1) {
        out += "  (std " + fmt("%.3f", agg.std_error_deg) + ")";
    }
    out += "\nmean confidence:    " + fmt("%.4f", agg.mean_confidence);
    out += "\nmean runtime:       " + fmt("%.3f", agg.mean_runtime_s) + " s\n";
    return out;
}

CompareResult compare_profiles(const AoaProfile& a, const AoaProfile& b) {
    if (!(a.grid == b.grid)) {
        throw ValidationError("compare: profiles use different grids");
    }
    if (a.values.size() != b.values.size()) {
        throw InternalError("compare: grid matches but value counts differ");
    }
    CompareResult r;
    double sum = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double va = a.values[k];
        const double vb = b.values[k];
        const double scale = std::max(std::abs(va), std::abs(vb));
        const double rel = scale > 0.0 ? std::abs(va - vb) / scale : 0.0;
        sum += rel;
        r.max_rel_diff = std::max(r.max_rel_diff, rel);
    }
    r.mean_rel_diff = a.values.empty() ? 0.0 : sum / static_cast<double>(a.values.size());
    int da = a.peak.az_idx - b.peak.az_idx;
    da = ((da % a.grid.n_az) + a.grid.n_az) % a.grid.n_az;
    if (da >= a.grid.n_az - da) da -= a.grid.n_az;  // shortest way around
    r.peak_az_shift_steps = da;
    r.peak_pol_shift_steps = a.peak.pol_idx - b.peak.pol_idx;
    r.peak_az_shift_deg = static_cast<double>(da) * a.grid.az_step_deg;
    r.peak_pol_shift_deg = static_cast<double>(r.peak_pol_shift_steps) * a.grid.pol_step_deg;
    return r;
}

std::string format_compare(const CompareResult& r) {
    std::string out;
    out += "max relative difference:  " + fmt("%.9g", r.max_rel_diff) + "\n";
    out += "mean relative difference: " + fmt("%.9g", r.mean_rel_diff) + "\n";
    out += "peak shift (azimuth):     " + std::to_string(r.peak_az_shift_steps) + " steps (" +
           fmt("%.6g", r.peak_az_shift_deg) + " deg)\n";
    out += "peak shift (polar):       " + std::to_string(r.peak_pol_shift_steps) + " steps (" +
           fmt("%.6g", r.peak_pol_shift_deg) + " deg)\n";
    return out;
}

AoaProfile load_profile_for_compare(const std::filesystem::path& path) {
    if (path.extension() == ".json") {
        ExperimentRecord record = read_dataset(path);
        const auto it = record.outputs.find("profile_csv");
        if (it != record.outputs.end()) {
            const std::filesystem::path p = path.parent_path() / it->second;
            if (std::filesystem::exists(p)) return read_profile_csv(p);
        }
        return estimate_record(record, make_grid(record.config.grid)).profile;
    }
    return read_profile_csv(path);
}

}  // namespace csisim
