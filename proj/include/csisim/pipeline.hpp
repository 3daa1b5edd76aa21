#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csisim/datastore.hpp"
#include "csisim/estimator.hpp"

namespace csisim {

// Scalar results of one simulate+estimate round trip. Ground truth is the
// bearing of the peer's centroid seen from the mobile node's trajectory
// centroid (heading taken at the start pose), matching what an aperture
// formed by that motion actually measures.
struct RunSummary {
    std::string scenario;
    std::uint64_t rng_seed = 0;
    double peak_azimuth_deg = 0.0;
    double peak_polar_deg = 0.0;
    double confidence = 0.0;
    std::size_t n_samples = 0;
    double total_displacement_m = 0.0;
    double ground_truth_azimuth_deg = 0.0;
    double azimuth_error_deg = 0.0;  // |wrapped difference|, in [0, 180]
    std::size_t discarded_unmatched = 0;
    std::size_t discarded_skew = 0;
    double mean_spacing_m = 0.0;
    double max_spacing_m = 0.0;
    double runtime_s = 0.0;
    std::vector<Peak> top_peaks;  // up to 3, 5 deg separation; shows mirror pairs
    std::vector<std::string> warnings;
};

std::string summary_to_json(const RunSummary& summary);

struct EstimateResult {
    AoaProfile profile;
    RunSummary summary;
};

// Runs the packet exchange for a validated config. Pure: no filesystem
// access; pair write_dataset around it as needed.
ExperimentRecord simulate_scenario(const ScenarioConfig& config);

EstimateResult estimate_record(const ExperimentRecord& record, const AngleGrid& grid);

// Loads a dataset, estimates on its configured grid (or an override), and
// writes profile.csv, profile.pgm, and summary.json beside the manifest (or
// into out_dir). The manifest's outputs block is updated when the artifacts
// land in the dataset directory.
EstimateResult estimate_dataset(const std::filesystem::path& manifest_path,
                                const std::optional<GridSpec>& grid_override = std::nullopt,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct RunAggregate {
    std::vector<RunSummary> reps;
    double mean_error_deg = 0.0;
    double std_error_deg = 0.0;  // sample standard deviation, 0 for one rep
    double mean_confidence = 0.0;
    double mean_runtime_s = 0.0;
};

// Repeats simulate+estimate with seeds base_seed, base_seed+1, ... and
// writes rep_### dataset directories plus aggregate.csv under out_root.
RunAggregate run_scenario(const ScenarioConfig& config, int reps,
                          std::optional<std::uint64_t> base_seed,
                          const std::filesystem::path& out_root);

std::string format_run_table(const RunAggregate& aggregate);

struct CompareResult {
    double max_rel_diff = 0.0;
    double mean_rel_diff = 0.0;
    int peak_az_shift_steps = 0;  // wrapped shortest way around the azimuth circle
    int peak_pol_shift_steps = 0;
    double peak_az_shift_deg = 0.0;
    double peak_pol_shift_deg = 0.0;
};

// Entrywise relative difference (0/0 counts as 0) plus peak displacement.
// Grids must match exactly.
CompareResult compare_profiles(const AoaProfile& a, const AoaProfile& b);

std::string format_compare(const CompareResult& result);

// Accepts either a dataset manifest.json or a profile.csv. Manifests resolve
// to their recorded profile output when present, otherwise the profile is
// recomputed in memory on the configured grid.
AoaProfile load_profile_for_compare(const std::filesystem::path& path);

}  // namespace csisim
