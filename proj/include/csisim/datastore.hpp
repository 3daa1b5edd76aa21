#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "csisim/channel.hpp"
#include "csisim/estimator.hpp"
#include "csisim/exchange.hpp"
#include "csisim/trajectory.hpp"

namespace csisim {

// Grid parameters as they appear in config files; expanded to an AngleGrid
// via make_grid. polar_fixed_deg selects the single-row planar fast path.
struct GridSpec {
    double azimuth_step_deg = 1.0;
    double polar_step_deg = 1.0;
    std::optional<double> polar_fixed_deg;

    bool operator==(const GridSpec&) const = default;
};

AngleGrid make_grid(const GridSpec& spec);

// Everything needed to reproduce one scenario end to end. rng_seed at this
// level is authoritative; it is copied into the noise config when the
// simulation runs, so a config file fully pins the output.
struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t rng_seed = 1;
    std::string output_dir;
    CarrierConfig carrier;
    CfoModel cfo;
    NoiseConfig noise;
    double loss_rate = 0.0;
    TrajectorySpec node_i;  // mobile node whose motion forms the aperture
    TrajectorySpec node_j;  // peer node (transmitter side of the pair)
    GridSpec grid;
    BartlettOptions estimator;
    ExchangeIds ids;

    void validate() const;
    bool operator==(const ScenarioConfig&) const = default;
};

std::string config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

// One simulated (or externally captured) dataset: config snapshot plus the
// odometry and packet streams. `outputs` maps derived-artifact roles
// (profile_csv, summary_json, ...) to relative paths once an estimate ran.
struct ExperimentRecord {
    ScenarioConfig config;
    std::vector<Pose> odometry_i;
    std::vector<Pose> odometry_j;
    std::vector<CsiPacket> packets_fwd;
    std::vector<CsiPacket> packets_bwd;
    std::map<std::string, std::string> outputs;

    bool operator==(const ExperimentRecord&) const = default;
};

// Writes odometry CSVs, packet JSONL files, and manifest.json (schema
// version, config snapshot, file list with crc32 checksums) into dir.
// Returns the manifest path. Reading the manifest back yields an equal
// record; floats survive bit-exactly via shortest round-trip formatting.
std::filesystem::path write_dataset(const ExperimentRecord& record,
                                    const std::filesystem::path& dir);

ExperimentRecord read_dataset(const std::filesystem::path& manifest_path);

// Registers derived artifacts in an existing manifest.
void update_manifest_outputs(const std::filesystem::path& manifest_path,
                             const std::map<std::string, std::string>& outputs);

void write_odometry_csv(const std::vector<Pose>& poses, const std::filesystem::path& path);
std::vector<Pose> read_odometry_csv(const std::filesystem::path& path);

void write_packets_jsonl(const std::vector<CsiPacket>& packets, const std::filesystem::path& path);
std::vector<CsiPacket> read_packets_jsonl(const std::filesystem::path& path);

// Profile matrix as CSV: azimuth rows, polar columns, first row and column
// carry the grid angles in degrees.
void write_profile_csv(const AoaProfile& profile, const std::filesystem::path& path);
AoaProfile read_profile_csv(const std::filesystem::path& path);

// 8-bit grayscale heatmap, min-max normalized, one row per azimuth sample.
void write_profile_pgm(const AoaProfile& profile, const std::filesystem::path& path);

std::uint32_t file_crc32(const std::filesystem::path& path);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

inline constexpr const char* kManifestSchemaVersion = "1.0";

}  // namespace csisim
