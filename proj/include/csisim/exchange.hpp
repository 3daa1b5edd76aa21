#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "csisim/channel.hpp"
#include "csisim/trajectory.hpp"

namespace csisim {

enum class PacketDir { fwd, bwd };

// One captured packet record. Frames increase strictly per (src_id,
// direction); csi holds one complex estimate per subcarrier.
struct CsiPacket {
    std::uint64_t t_ns = 0;
    std::uint32_t frame = 0;
    std::string src_id;
    PacketDir dir = PacketDir::fwd;
    std::vector<std::complex<double>> csi;

    bool operator==(const CsiPacket&) const = default;
};

// Matched forward/backward packets with the reciprocal product applied per
// subcarrier. rx_pose is the mobile node's odometry sample nearest the
// forward timestamp; the profile builder reads its displacement from there.
struct CsiPair {
    std::uint32_t frame = 0;
    std::uint64_t t_fwd_ns = 0;
    std::uint64_t t_bwd_ns = 0;
    std::vector<std::complex<double>> h_squared;
    Pose rx_pose;
};

struct PacketStreams {
    std::vector<CsiPacket> fwd;  // transmitted by node i
    std::vector<CsiPacket> bwd;  // replies from node j
};

struct ExchangeIds {
    std::string src_i = "aa:bb:cc:dd:ee:01";
    std::string src_j = "aa:bb:cc:dd:ee:02";

    bool operator==(const ExchangeIds&) const = default;
};

// Round-robin exchange: every nominal tick sends one forward packet and,
// unless the Bernoulli loss hits, one backward reply sharing the frame
// number. Node distance is taken from poses interpolated at the jittered
// forward timestamp; CFO is evaluated at each direction's own timestamp.
// Frame counters advance across drops. The RNG is seeded from
// noise.rng_seed, so a config fully determines the output.
PacketStreams run_exchange(const std::vector<Pose>& traj_i, const std::vector<Pose>& traj_j,
                           const CarrierConfig& carrier, const CfoModel& cfo,
                           const NoiseConfig& noise, double loss_rate,
                           const ExchangeIds& ids = {});

struct PairingStats {
    std::uint64_t pair_count = 0;
    std::uint64_t discarded_unmatched = 0;  // frame present in only one stream
    std::uint64_t discarded_skew = 0;       // matched but |t_fwd - t_bwd| > epsilon
    std::uint64_t discarded() const { return discarded_unmatched + discarded_skew; }
};

struct PairingResult {
    std::vector<CsiPair> pairs;
    PairingStats stats;
};

// Pairs packets by frame number (not by time), applies the reciprocal
// product per subcarrier, and attaches the nearest odometry pose. Frames
// that fail to match or exceed the skew budget are counted, never fatal.
PairingResult pair_packets(const std::vector<CsiPacket>& packets_fwd,
                           const std::vector<CsiPacket>& packets_bwd, double epsilon_t_s,
                           const std::vector<Pose>& rx_odometry);

// Least-squares linear fit of unwrapped phase and log-magnitude over
// subcarriers [lo, hi], evaluated at a (possibly fractional) target index.
// This recovers the channel at the exact carrier frequency from the
// off-center subcarrier comb.
std::complex<double> interpolate_center_subcarrier(const CsiPair& pair, int lo, int hi,
                                                   double target);

// Position linearly interpolated at t_ns (clamped to the stream ends); yaw
// follows the shortest arc.
Pose interpolate_pose(const std::vector<Pose>& traj, std::uint64_t t_ns);

// Sample with the smallest |t - t_ns|; earlier sample wins ties.
Pose nearest_pose(const std::vector<Pose>& traj, std::uint64_t t_ns);

}  // namespace csisim
