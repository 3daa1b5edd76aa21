#include "csisim/datastore.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "csisim/errors.hpp"
#include "json.hpp"

namespace csisim {
namespace {

using J = nlohmann::ordered_json;

std::string join_field(const std::string& parent, const char* key) {
    return parent.empty() ? std::string(key) : parent + "." + key;
}

const J& require(const J& j, const char* key, const std::string& parent) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ValidationError("config: missing field '" + join_field(parent, key) + "'");
    }
    return *it;
}

double as_number(const J& j, const std::string& path) {
    if (!j.is_number()) {
        throw ValidationError("config: field '" + path + "' must be a number");
    }
    return j.get<double>();
}

std::uint64_t as_unsigned(const J& j, const std::string& path) {
    if (!j.is_number_unsigned()) {
        throw ValidationError("config: field '" + path + "' must be a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

bool as_bool(const J& j, const std::string& path) {
    if (!j.is_boolean()) {
        throw ValidationError("config: field '" + path + "' must be a boolean");
    }
    return j.get<bool>();
}

std::string as_string(const J& j, const std::string& path) {
    if (!j.is_string()) {
        throw ValidationError("config: field '" + path + "' must be a string");
    }
    return j.get<std::string>();
}

double number_field(const J& j, const char* key, const std::string& parent, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    return as_number(*it, join_field(parent, key));
}

const char* kind_name(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::stationary: return "stationary";
        case TrajectoryKind::circular: return "circular";
        case TrajectoryKind::linear: return "linear";
        case TrajectoryKind::waypoints: return "waypoints";
    }
    throw InternalError("unknown trajectory kind");
}

TrajectoryKind kind_from_name(const std::string& name, const std::string& path) {
    if (name == "stationary") return TrajectoryKind::stationary;
    if (name == "circular") return TrajectoryKind::circular;
    if (name == "linear") return TrajectoryKind::linear;
    if (name == "waypoints") return TrajectoryKind::waypoints;
    throw ValidationError("config: field '" + path +
                          "' must be one of stationary, circular, linear, waypoints");
}

J pose_to_json(const Pose& p) {
    return J{{"x", p.pos.x}, {"y", p.pos.y}, {"z", p.pos.z}, {"yaw", p.yaw}};
}

Pose pose_from_json(const J& j, const std::string& path) {
    if (!j.is_object()) {
        throw ValidationError("config: field '" + path + "' must be an object");
    }
    Pose p;
    p.t_ns = 0;
    p.pos.x = number_field(j, "x", path, 0.0);
    p.pos.y = number_field(j, "y", path, 0.0);
    p.pos.z = number_field(j, "z", path, 0.0);
    p.yaw = number_field(j, "yaw", path, 0.0);
    return p;
}

J traj_to_json(const TrajectorySpec& t) {
    J j;
    j["kind"] = kind_name(t.kind);
    j["start"] = pose_to_json(t.start);
    j["duration_s"] = t.duration_s;
    j["sample_rate_hz"] = t.sample_rate_hz;
    if (t.kind == TrajectoryKind::circular) j["radius_m"] = t.radius_m;
    if (t.kind == TrajectoryKind::linear) j["length_m"] = t.length_m;
    if (t.kind == TrajectoryKind::waypoints) {
        J w = J::array();
        for (const auto& p : t.waypoints) w.push_back(J::array({p.x, p.y, p.z}));
        j["waypoints"] = std::move(w);
    }
    return j;
}

TrajectorySpec traj_from_json(const J& j, const std::string& path) {
    if (!j.is_object()) {
        throw ValidationError("config: field '" + path + "' must be an object");
    }
    TrajectorySpec t;
    t.kind = kind_from_name(as_string(require(j, "kind", path), join_field(path, "kind")),
                            join_field(path, "kind"));
    if (auto it = j.find("start"); it != j.end()) {
        t.start = pose_from_json(*it, join_field(path, "start"));
    }
    t.duration_s = as_number(require(j, "duration_s", path), join_field(path, "duration_s"));
    t.sample_rate_hz =
        as_number(require(j, "sample_rate_hz", path), join_field(path, "sample_rate_hz"));
    t.radius_m = number_field(j, "radius_m", path, 0.0);
    t.length_m = number_field(j, "length_m", path, 0.0);
    if (auto it = j.find("waypoints"); it != j.end()) {
        const std::string wpath = join_field(path, "waypoints");
        if (!it->is_array()) {
            throw ValidationError("config: field '" + wpath + "' must be an array");
        }
        for (std::size_t k = 0; k < it->size(); ++k) {
            const J& e = (*it)[k];
            const std::string epath = wpath + "[" + std::to_string(k) + "]";
            if (!e.is_array() || e.size() != 3) {
                throw ValidationError("config: field '" + epath + "' must be [x, y, z]");
            }
            t.waypoints.push_back({as_number(e[0], epath), as_number(e[1], epath),
                                   as_number(e[2], epath)});
        }
    }
    return t;
}

J config_to_json_doc(const ScenarioConfig& c) {
    J j;
    j["name"] = c.name;
    j["rng_seed"] = c.rng_seed;
    if (!c.output_dir.empty()) j["output_dir"] = c.output_dir;
    j["loss_rate"] = c.loss_rate;
    j["carrier"] = J{{"center_frequency_hz", c.carrier.center_frequency_hz},
                     {"subcarrier_count", c.carrier.subcarrier_count},
                     {"subcarrier_spacing_hz", c.carrier.subcarrier_spacing_hz},
                     {"channel_bandwidth_hz", c.carrier.channel_bandwidth_hz},
                     {"center_subcarrier_index", c.carrier.center_subcarrier_index}};
    j["cfo"] = J{{"delta_f_hz", c.cfo.delta_f_hz}, {"c1", c.cfo.c1}, {"c2", c.cfo.c2}};
    j["noise"] = J{{"snr_db", c.noise.snr_db},
                   {"awgn", c.noise.awgn},
                   {"sto_mean_s", c.noise.sto_mean_s},
                   {"epsilon_t_s", c.noise.epsilon_t_s},
                   {"phase_bias_i_cycles", c.noise.phase_bias_i_cycles},
                   {"phase_bias_j_cycles", c.noise.phase_bias_j_cycles}};
    j["node_i"] = traj_to_json(c.node_i);
    j["node_j"] = traj_to_json(c.node_j);
    j["grid"] = J{{"azimuth_step_deg", c.grid.azimuth_step_deg},
                  {"polar_step_deg", c.grid.polar_step_deg},
                  {"polar_fixed_deg",
                   c.grid.polar_fixed_deg ? J(*c.grid.polar_fixed_deg) : J(nullptr)}};
    j["estimator"] = J{{"squared_steering", c.estimator.squared_steering},
                       {"interp_lo", c.estimator.interp_lo},
                       {"interp_hi", c.estimator.interp_hi},
                       {"interp_target", c.estimator.interp_target}};
    j["ids"] = J{{"src_i", c.ids.src_i}, {"src_j", c.ids.src_j}};
    return j;
}

ScenarioConfig config_from_json_doc(const J& j) {
    if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
    ScenarioConfig c;
    if (auto it = j.find("name"); it != j.end()) c.name = as_string(*it, "name");
    if (auto it = j.find("rng_seed"); it != j.end()) c.rng_seed = as_unsigned(*it, "rng_seed");
    if (auto it = j.find("output_dir"); it != j.end()) {
        c.output_dir = as_string(*it, "output_dir");
    }
    if (auto it = j.find("loss_rate"); it != j.end()) c.loss_rate = as_number(*it, "loss_rate");
    if (auto it = j.find("carrier"); it != j.end()) {
        const J& s = *it;
        c.carrier.center_frequency_hz =
            number_field(s, "center_frequency_hz", "carrier", c.carrier.center_frequency_hz);
        if (auto f = s.find("subcarrier_count"); f != s.end()) {
            c.carrier.subcarrier_count =
                static_cast<int>(as_unsigned(*f, "carrier.subcarrier_count"));
        }
        c.carrier.subcarrier_spacing_hz =
            number_field(s, "subcarrier_spacing_hz", "carrier", c.carrier.subcarrier_spacing_hz);
        c.carrier.channel_bandwidth_hz =
            number_field(s, "channel_bandwidth_hz", "carrier", c.carrier.channel_bandwidth_hz);
        c.carrier.center_subcarrier_index = number_field(s, "center_subcarrier_index", "carrier",
                                                         c.carrier.center_subcarrier_index);
    }
    if (auto it = j.find("cfo"); it != j.end()) {
        c.cfo.delta_f_hz = number_field(*it, "delta_f_hz", "cfo", c.cfo.delta_f_hz);
        c.cfo.c1 = number_field(*it, "c1", "cfo", c.cfo.c1);
        c.cfo.c2 = number_field(*it, "c2", "cfo", c.cfo.c2);
    }
    if (auto it = j.find("noise"); it != j.end()) {
        const J& s = *it;
        c.noise.snr_db = number_field(s, "snr_db", "noise", c.noise.snr_db);
        if (auto f = s.find("awgn"); f != s.end()) c.noise.awgn = as_bool(*f, "noise.awgn");
        c.noise.sto_mean_s = number_field(s, "sto_mean_s", "noise", c.noise.sto_mean_s);
        c.noise.epsilon_t_s = number_field(s, "epsilon_t_s", "noise", c.noise.epsilon_t_s);
        c.noise.phase_bias_i_cycles =
            number_field(s, "phase_bias_i_cycles", "noise", c.noise.phase_bias_i_cycles);
        c.noise.phase_bias_j_cycles =
            number_field(s, "phase_bias_j_cycles", "noise", c.noise.phase_bias_j_cycles);
    }
    c.node_i = traj_from_json(require(j, "node_i", ""), "node_i");
    c.node_j = traj_from_json(require(j, "node_j", ""), "node_j");
    if (auto it = j.find("grid"); it != j.end()) {
        const J& s = *it;
        c.grid.azimuth_step_deg =
            number_field(s, "azimuth_step_deg", "grid", c.grid.azimuth_step_deg);
        c.grid.polar_step_deg = number_field(s, "polar_step_deg", "grid", c.grid.polar_step_deg);
        if (auto f = s.find("polar_fixed_deg"); f != s.end() && !f->is_null()) {
            c.grid.polar_fixed_deg = as_number(*f, "grid.polar_fixed_deg");
        }
    }
    if (auto it = j.find("estimator"); it != j.end()) {
        const J& s = *it;
        if (auto f = s.find("squared_steering"); f != s.end()) {
            c.estimator.squared_steering = as_bool(*f, "estimator.squared_steering");
        }
        if (auto f = s.find("interp_lo"); f != s.end()) {
            c.estimator.interp_lo = static_cast<int>(as_unsigned(*f, "estimator.interp_lo"));
        }
        if (auto f = s.find("interp_hi"); f != s.end()) {
            c.estimator.interp_hi = static_cast<int>(as_unsigned(*f, "estimator.interp_hi"));
        }
        c.estimator.interp_target =
            number_field(s, "interp_target", "estimator", c.estimator.interp_target);
    }
    if (auto it = j.find("ids"); it != j.end()) {
        if (auto f = it->find("src_i"); f != it->end()) c.ids.src_i = as_string(*f, "ids.src_i");
        if (auto f = it->find("src_j"); f != it->end()) c.ids.src_j = as_string(*f, "ids.src_j");
    }
    c.noise.rng_seed = c.rng_seed;
    c.validate();
    return c;
}

J parse_json_text(const std::string& text, const std::string& what) {
    J j = J::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError(what + ": malformed JSON");
    return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ValidationError(where + ": expected unsigned integer, got '" + s + "'");
    }
    return v;
}

double parse_finite(const std::string& s, const std::string& where) {
    double v;
    try {
        v = parse_double(s);
    } catch (const ValidationError&) {
        throw ValidationError(where + ": expected number, got '" + s + "'");
    }
    if (!std::isfinite(v)) throw ValidationError(where + ": value must be finite");
    return v;
}

std::string crc32_hex(std::uint32_t crc) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", crc);
    return buf;
}

const char* dir_name(PacketDir dir) { return dir == PacketDir::fwd ? "fwd" : "bwd"; }

// Peak scan shared with the estimator: lowest linear index wins ties.
void recompute_peak(AoaProfile& profile) {
    double best = -1.0;
    double total = 0.0;
    std::size_t best_idx = 0;
    for (std::size_t idx = 0; idx < profile.values.size(); ++idx) {
        total += profile.values[idx];
        if (profile.values[idx] > best) {
            best = profile.values[idx];
            best_idx = idx;
        }
    }
    const std::size_t ia = best_idx / static_cast<std::size_t>(profile.grid.n_pol);
    const std::size_t ip = best_idx % static_cast<std::size_t>(profile.grid.n_pol);
    profile.peak = Peak{static_cast<int>(ia), static_cast<int>(ip),
                        profile.grid.azimuth_deg(static_cast<int>(ia)),
                        profile.grid.polar_deg(static_cast<int>(ip)), best};
    profile.confidence = total > 0.0 ? best / total : 0.0;
}

}  // namespace

AngleGrid make_grid(const GridSpec& spec) {
    if (spec.polar_fixed_deg) {
        return AngleGrid::with_fixed_polar(*spec.polar_fixed_deg, spec.azimuth_step_deg);
    }
    return AngleGrid::full(spec.azimuth_step_deg, spec.polar_step_deg);
}

void ScenarioConfig::validate() const {
    if (name.empty()) throw ValidationError("config: name must not be empty");
    if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos) {
        throw ValidationError("config: name must not contain path separators");
    }
    carrier.validate();
    noise.validate();
    node_i.validate();
    node_j.validate();
    if (node_i.duration_s != node_j.duration_s || node_i.sample_rate_hz != node_j.sample_rate_hz) {
        throw ValidationError("config: node_i and node_j must share duration and sample rate");
    }
    if (!(loss_rate >= 0.0 && loss_rate < 1.0)) {
        throw ValidationError("config: loss_rate must lie in [0, 1)");
    }
    make_grid(grid);  // throws on a bad grid spec
    const int n = carrier.subcarrier_count;
    if (estimator.interp_lo < 0 || estimator.interp_hi <= estimator.interp_lo ||
        estimator.interp_hi >= n) {
        throw ValidationError("config: estimator interpolation window must satisfy 0 <= lo < hi < " +
                              std::to_string(n));
    }
    if (estimator.interp_target < estimator.interp_lo ||
        estimator.interp_target > estimator.interp_hi) {
        throw ValidationError("config: estimator.interp_target must lie inside the window");
    }
    if (ids.src_i.empty() || ids.src_j.empty() || ids.src_i == ids.src_j) {
        throw ValidationError("config: ids.src_i and ids.src_j must be distinct and non-empty");
    }
}

std::string config_to_json(const ScenarioConfig& config) {
    return config_to_json_doc(config).dump(2) + "\n";
}

ScenarioConfig config_from_json(const std::string& text) {
    return config_from_json_doc(parse_json_text(text, "config"));
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    try {
        return config_from_json(read_text_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
    write_text_file(path, config_to_json(config));
}

std::string format_double(double v) {
    std::array<char, 64> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw InternalError("double formatting failed");
    return std::string(buf.data(), p);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw ValidationError("malformed number '" + s + "'");
    }
    return v;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path.string());
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
                  static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

void write_odometry_csv(const std::vector<Pose>& poses, const std::filesystem::path& path) {
    std::string out = "t_ns,x,y,z,yaw\n";
    for (const Pose& p : poses) {
        out += std::to_string(p.t_ns);
        out += ',';
        out += format_double(p.pos.x);
        out += ',';
        out += format_double(p.pos.y);
        out += ',';
        out += format_double(p.pos.z);
        out += ',';
        out += format_double(p.yaw);
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<Pose> read_odometry_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    const std::string name = path.filename().string();
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "t_ns,x,y,z,yaw") {
        throw ValidationError(name + ": expected header 't_ns,x,y,z,yaw'");
    }
    std::vector<Pose> poses;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::string where = name + " line " + std::to_string(lineno);
        const auto fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw ValidationError(where + ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
        }
        Pose p;
        p.t_ns = parse_u64(fields[0], where);
        p.pos.x = parse_finite(fields[1], where);
        p.pos.y = parse_finite(fields[2], where);
        p.pos.z = parse_finite(fields[3], where);
        p.yaw = parse_finite(fields[4], where);
        if (!poses.empty() && p.t_ns <= poses.back().t_ns) {
            throw ValidationError(where + ": timestamps must be strictly increasing");
        }
        if (p.yaw < -std::numbers::pi || p.yaw >= std::numbers::pi) {
            throw ValidationError(where + ": yaw must lie in [-pi, pi)");
        }
        poses.push_back(p);
    }
    if (poses.empty()) throw ValidationError(name + ": no data rows");
    return poses;
}

void write_packets_jsonl(const std::vector<CsiPacket>& packets,
                         const std::filesystem::path& path) {
    std::string out;
    for (const CsiPacket& p : packets) {
        J csi = J::array();
        for (const auto& h : p.csi) csi.push_back(J::array({h.real(), h.imag()}));
        J row;
        row["t_ns"] = p.t_ns;
        row["frame"] = p.frame;
        row["src_id"] = p.src_id;
        row["dir"] = dir_name(p.dir);
        row["csi"] = std::move(csi);
        out += row.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<CsiPacket> read_packets_jsonl(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    const std::string name = path.filename().string();
    std::vector<CsiPacket> packets;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::string where = name + " line " + std::to_string(lineno);
        J row = J::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            throw ValidationError(where + ": malformed JSON object");
        }
        CsiPacket p;
        {
            const J& t = require(row, "t_ns", "");
            if (!t.is_number_unsigned()) {
                throw ValidationError(where + ": t_ns must be a non-negative integer");
            }
            p.t_ns = t.get<std::uint64_t>();
        }
        {
            const J& f = require(row, "frame", "");
            if (!f.is_number_unsigned() || f.get<std::uint64_t>() > 0xFFFFFFFFull) {
                throw ValidationError(where + ": frame must be an unsigned 32-bit integer");
            }
            p.frame = static_cast<std::uint32_t>(f.get<std::uint64_t>());
        }
        p.src_id = as_string(require(row, "src_id", ""), "src_id");
        {
            const std::string d = as_string(require(row, "dir", ""), "dir");
            if (d == "fwd") {
                p.dir = PacketDir::fwd;
            } else if (d == "bwd") {
                p.dir = PacketDir::bwd;
            } else {
                throw ValidationError(where + ": dir must be 'fwd' or 'bwd'");
            }
        }
        {
            const J& csi = require(row, "csi", "");
            if (!csi.is_array() || csi.empty()) {
                throw ValidationError(where + ": csi must be a non-empty array");
            }
            for (const J& e : csi) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                    throw ValidationError(where + ": csi entries must be [re, im] pairs");
                }
                p.csi.emplace_back(e[0].get<double>(), e[1].get<double>());
            }
        }
        if (!packets.empty()) {
            const CsiPacket& prev = packets.back();
            if (p.csi.size() != prev.csi.size()) {
                throw ValidationError(where + ": csi length " + std::to_string(p.csi.size()) +
                                      ", expected " + std::to_string(prev.csi.size()));
            }
            if (p.src_id != prev.src_id) {
                throw ValidationError(where + ": src_id changes mid-stream");
            }
            if (p.dir != prev.dir) {
                throw ValidationError(where + ": dir changes mid-stream");
            }
            if (p.frame <= prev.frame) {
                throw ValidationError(where + ": frame numbers must be strictly increasing");
            }
            if (p.t_ns <= prev.t_ns) {
                throw ValidationError(where + ": timestamps must be strictly increasing");
            }
        }
        packets.push_back(std::move(p));
    }
    return packets;
}

void write_profile_csv(const AoaProfile& profile, const std::filesystem::path& path) {
    const AngleGrid& g = profile.grid;
    std::string out = "az_deg\\pol_deg";
    for (int ip = 0; ip < g.n_pol; ++ip) {
        out += ',';
        out += format_double(g.polar_deg(ip));
    }
    out += '\n';
    for (int ia = 0; ia < g.n_az; ++ia) {
        out += format_double(g.azimuth_deg(ia));
        for (int ip = 0; ip < g.n_pol; ++ip) {
            out += ',';
            out += format_double(profile.at(ia, ip));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

AoaProfile read_profile_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    const std::string name = path.filename().string();
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(name + ": empty file");
    const auto header = split_csv_line(strip_cr(line));
    if (header.size() < 2 || header[0] != "az_deg\\pol_deg") {
        throw ValidationError(name + ": expected 'az_deg\\pol_deg' header row");
    }
    std::vector<double> pol_deg;
    for (std::size_t k = 1; k < header.size(); ++k) {
        pol_deg.push_back(parse_finite(header[k], name + " header"));
    }
    std::vector<double> az_deg;
    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const std::string where = name + " line " + std::to_string(lineno);
        const auto fields = split_csv_line(line);
        if (fields.size() != pol_deg.size() + 1) {
            throw ValidationError(where + ": expected " + std::to_string(pol_deg.size() + 1) +
                                  " fields, got " + std::to_string(fields.size()));
        }
        az_deg.push_back(parse_finite(fields[0], where));
        for (std::size_t k = 1; k < fields.size(); ++k) {
            values.push_back(parse_finite(fields[k], where));
        }
    }
    if (az_deg.size() < 2) throw ValidationError(name + ": expected at least 2 azimuth rows");

    AngleGrid grid;
    grid.az_start_deg = az_deg.front();
    grid.az_step_deg = az_deg[1] - az_deg[0];
    grid.n_az = static_cast<int>(az_deg.size());
    grid.pol_start_deg = pol_deg.front();
    grid.pol_step_deg = pol_deg.size() > 1 ? pol_deg[1] - pol_deg[0] : 1.0;
    grid.n_pol = static_cast<int>(pol_deg.size());
    for (std::size_t k = 0; k < az_deg.size(); ++k) {
        const double expect = grid.az_start_deg + static_cast<double>(k) * grid.az_step_deg;
        if (std::abs(az_deg[k] - expect) > 1e-9) {
            throw ValidationError(name + ": azimuth axis is not uniformly spaced");
        }
    }
    for (std::size_t k = 0; k < pol_deg.size(); ++k) {
        const double expect = grid.pol_start_deg + static_cast<double>(k) * grid.pol_step_deg;
        if (std::abs(pol_deg[k] - expect) > 1e-9) {
            throw ValidationError(name + ": polar axis is not uniformly spaced");
        }
    }
    grid.validate();

    AoaProfile profile;
    profile.grid = grid;
    profile.values = std::move(values);
    recompute_peak(profile);
    return profile;
}

void write_profile_pgm(const AoaProfile& profile, const std::filesystem::path& path) {
    const AngleGrid& g = profile.grid;
    double lo = profile.values.empty() ? 0.0 : profile.values[0];
    double hi = lo;
    for (double v : profile.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    std::string out = "P5\n" + std::to_string(g.n_pol) + " " + std::to_string(g.n_az) + "\n255\n";
    out.reserve(out.size() + profile.values.size());
    for (double v : profile.values) {
        const double norm = span > 0.0 ? (v - lo) / span : 0.0;
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::llround(norm * 255.0))));
    }
    write_text_file(path, out);
}

std::filesystem::path write_dataset(const ExperimentRecord& record,
                                    const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string());

    const std::array<std::pair<const char*, const char*>, 4> roles = {{
        {"odometry_i", "odometry_i.csv"},
        {"odometry_j", "odometry_j.csv"},
        {"packets_fwd", "packets_fwd.jsonl"},
        {"packets_bwd", "packets_bwd.jsonl"},
    }};
    write_odometry_csv(record.odometry_i, dir / roles[0].second);
    write_odometry_csv(record.odometry_j, dir / roles[1].second);
    write_packets_jsonl(record.packets_fwd, dir / roles[2].second);
    write_packets_jsonl(record.packets_bwd, dir / roles[3].second);

    J files;
    for (const auto& [role, file] : roles) {
        files[role] = J{{"path", file}, {"crc32", crc32_hex(file_crc32(dir / file))}};
    }
    J manifest;
    manifest["schema_version"] = kManifestSchemaVersion;
    manifest["config"] = config_to_json_doc(record.config);
    manifest["files"] = std::move(files);
    if (!record.outputs.empty()) {
        J outputs;
        for (const auto& [role, file] : record.outputs) outputs[role] = file;
        manifest["outputs"] = std::move(outputs);
    }
    const fs::path manifest_path = dir / "manifest.json";
    write_text_file(manifest_path, manifest.dump(2) + "\n");
    return manifest_path;
}

ExperimentRecord read_dataset(const std::filesystem::path& manifest_path) {
    namespace fs = std::filesystem;
    const J manifest = parse_json_text(read_text_file(manifest_path), "manifest");
    if (!manifest.is_object()) throw ValidationError("manifest: top level must be an object");

    const std::string version = as_string(require(manifest, "schema_version", ""),
                                          "schema_version");
    const auto dot = version.find('.');
    const std::string major = dot == std::string::npos ? version : version.substr(0, dot);
    if (major != "1") {
        throw ValidationError("manifest: unsupported schema version '" + version +
                              "' (this build reads 1.x)");
    }

    ExperimentRecord record;
    record.config = config_from_json_doc(require(manifest, "config", ""));

    const fs::path dir = manifest_path.parent_path();
    const J& files = require(manifest, "files", "");
    auto resolve = [&](const char* role) -> fs::path {
        const J& entry = require(files, role, "files");
        const fs::path p = dir / as_string(require(entry, "path", role), "files.path");
        const std::string want = as_string(require(entry, "crc32", role), "files.crc32");
        const std::string got = crc32_hex(file_crc32(p));
        if (want != got) {
            throw ValidationError(p.filename().string() + ": crc32 mismatch (manifest " + want +
                                  ", file " + got + ")");
        }
        return p;
    };
    record.odometry_i = read_odometry_csv(resolve("odometry_i"));
    record.odometry_j = read_odometry_csv(resolve("odometry_j"));
    record.packets_fwd = read_packets_jsonl(resolve("packets_fwd"));
    record.packets_bwd = read_packets_jsonl(resolve("packets_bwd"));

    const std::size_t want = static_cast<std::size_t>(record.config.carrier.subcarrier_count);
    auto check_stream = [&](const std::vector<CsiPacket>& packets, const char* role,
                            PacketDir dir_want, const std::string& src_want) {
        for (std::size_t k = 0; k < packets.size(); ++k) {
            const std::string where =
                std::string(role) + " line " + std::to_string(k + 1);
            if (packets[k].csi.size() != want) {
                throw ValidationError(where + ": csi length " +
                                      std::to_string(packets[k].csi.size()) + ", expected " +
                                      std::to_string(want));
            }
            if (packets[k].dir != dir_want) {
                throw ValidationError(where + ": wrong packet direction for this stream");
            }
            if (packets[k].src_id != src_want) {
                throw ValidationError(where + ": src_id '" + packets[k].src_id +
                                      "' does not match config ids");
            }
        }
    };
    check_stream(record.packets_fwd, "packets_fwd.jsonl", PacketDir::fwd, record.config.ids.src_i);
    check_stream(record.packets_bwd, "packets_bwd.jsonl", PacketDir::bwd, record.config.ids.src_j);

    if (auto it = manifest.find("outputs"); it != manifest.end()) {
        if (!it->is_object()) throw ValidationError("manifest: outputs must be an object");
        for (const auto& [role, value] : it->items()) {
            record.outputs[role] = as_string(value, "outputs." + role);
        }
    }
    return record;
}

void update_manifest_outputs(const std::filesystem::path& manifest_path,
                             const std::map<std::string, std::string>& outputs) {
    J manifest = parse_json_text(read_text_file(manifest_path), "manifest");
    J block = manifest.contains("outputs") ? manifest["outputs"] : J::object();
    for (const auto& [role, file] : outputs) block[role] = file;
    manifest["outputs"] = std::move(block);
    write_text_file(manifest_path, manifest.dump(2) + "\n");
}

}  // namespace csisim
