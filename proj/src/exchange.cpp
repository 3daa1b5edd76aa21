#include "csisim/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csisim/errors.hpp"

namespace csisim {

namespace {

// Bracketing index: largest i with traj[i].t_ns <= t_ns, clamped to [0, n-2].
std::size_t lower_segment(const std::vector<Pose>& traj, std::uint64_t t_ns) {
    auto it = std::upper_bound(traj.begin(), traj.end(), t_ns,
                               [](std::uint64_t t, const Pose& p) { return t < p.t_ns; });
    std::size_t idx = static_cast<std::size_t>(it - traj.begin());
    if (idx == 0) return 0;
    if (idx >= traj.size()) return traj.size() - 2;
    return idx - 1;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double at(double x) const { return intercept + slope * x; }
};

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

}  // namespace

Pose interpolate_pose(const std::vector<Pose>& traj, std::uint64_t t_ns) {
    if (traj.empty()) throw ValidationError("interpolate_pose: empty trajectory");
    if (traj.size() == 1 || t_ns <= traj.front().t_ns) {
        Pose p = traj.front();
        p.t_ns = t_ns;
        return p;
    }
    if (t_ns >= traj.back().t_ns) {
        Pose p = traj.back();
        p.t_ns = t_ns;
        return p;
    }
    const std::size_t i = lower_segment(traj, t_ns);
    const Pose& a = traj[i];
    const Pose& b = traj[i + 1];
    const double f = static_cast<double>(t_ns - a.t_ns) / static_cast<double>(b.t_ns - a.t_ns);
    Pose p;
    p.t_ns = t_ns;
    p.pos = a.pos + (b.pos - a.pos) * f;
    p.yaw = wrap_pi(a.yaw + std::remainder(b.yaw - a.yaw, 2.0 * 3.14159265358979323846) * f);
    return p;
}

Pose nearest_pose(const std::vector<Pose>& traj, std::uint64_t t_ns) {
    if (traj.empty()) throw ValidationError("nearest_pose: empty trajectory");
    if (t_ns <= traj.front().t_ns) return traj.front();
    if (t_ns >= traj.back().t_ns) return traj.back();
    const std::size_t i = lower_segment(traj, t_ns);
    const Pose& a = traj[i];
    const Pose& b = traj[i + 1];
    return (t_ns - a.t_ns <= b.t_ns - t_ns) ? a : b;
}

PacketStreams run_exchange(const std::vector<Pose>& traj_i, const std::vector<Pose>& traj_j,
                           const CarrierConfig& carrier, const CfoModel& cfo,
                           const NoiseConfig& noise, double loss_rate, const ExchangeIds& ids) {
    carrier.validate();
    noise.validate();
    if (traj_i.empty() || traj_i.size() != traj_j.size())
        throw ValidationError("run_exchange: trajectories must be non-empty and equally sized");
    for (std::size_t k = 0; k < traj_i.size(); ++k)
        if (traj_i[k].t_ns != traj_j[k].t_ns)
            throw ValidationError("run_exchange: trajectories must share the nominal timestamp grid");
    if (!(loss_rate >= 0.0) || !(loss_rate < 1.0))
        throw ValidationError("run_exchange: loss_rate must lie in [0, 1)");

    std::vector<std::uint64_t> nominal;
    nominal.reserve(traj_i.size());
    for (const Pose& p : traj_i) nominal.push_back(p.t_ns);

    Rng rng(noise.rng_seed);
    const auto stamps = jittered_timestamps(nominal, noise, rng);

    PacketStreams out;
    out.fwd.reserve(traj_i.size());
    out.bwd.reserve(traj_i.size());
    const int n_sub = carrier.subcarrier_count;

    for (std::size_t k = 0; k < stamps.size(); ++k) {
        const auto [t_fwd, t_bwd] = stamps[k];
        const Pose pi = interpolate_pose(traj_i, t_fwd);
        const Pose pj = interpolate_pose(traj_j, t_fwd);
        const double d = (pi.pos - pj.pos).norm();
        const double tf_s = static_cast<double>(t_fwd) * 1e-9;
        const double tb_s = static_cast<double>(t_bwd) * 1e-9;

        CsiPacket fwd;
        fwd.t_ns = t_fwd;
        fwd.frame = static_cast<std::uint32_t>(k);
        fwd.src_id = ids.src_i;
        fwd.dir = PacketDir::fwd;
        fwd.csi.resize(n_sub);
        CsiPacket bwd;
        bwd.t_ns = t_bwd;
        bwd.frame = static_cast<std::uint32_t>(k);
        bwd.src_id = ids.src_j;
        bwd.dir = PacketDir::bwd;
        bwd.csi.resize(n_sub);

        for (int s = 0; s < n_sub; ++s) {
            auto [f, b] =
                perturbed_csi_pair(d, tf_s, tb_s, carrier.subcarrier_wavelength_m(s), cfo, noise, rng);
            fwd.csi[s] = f;
            bwd.csi[s] = b;
        }

        out.fwd.push_back(std::move(fwd));
        // The reply is generated and then possibly lost, so the RNG stream
        // shape does not depend on the loss outcomes.
        const bool lost = rng.bernoulli(loss_rate);
        if (!lost) out.bwd.push_back(std::move(bwd));
    }
    return out;
}

PairingResult pair_packets(const std::vector<CsiPacket>& packets_fwd,
                           const std::vector<CsiPacket>& packets_bwd, double epsilon_t_s,
                           const std::vector<Pose>& rx_odometry) {
    if (!(epsilon_t_s >= 0.0)) throw ValidationError("pair_packets: epsilon_t must be non-negative");
    if (rx_odometry.empty()) throw ValidationError("pair_packets: empty odometry stream");
    auto check_sorted = [](const std::vector<CsiPacket>& v, const char* name) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i].frame <= v[i - 1].frame)
                throw ValidationError(std::string("pair_packets: ") + name +
                                      " stream is not strictly frame-sorted");
    };
    check_sorted(packets_fwd, "forward");
    check_sorted(packets_bwd, "backward");

    const std::uint64_t eps_ns = static_cast<std::uint64_t>(std::llround(epsilon_t_s * 1e9));
    PairingResult out;
    std::size_t a = 0, b = 0;
    while (a < packets_fwd.size() && b < packets_bwd.size()) {
        const CsiPacket& f = packets_fwd[a];
        const CsiPacket& r = packets_bwd[b];
        if (f.frame < r.frame) {
            ++out.stats.discarded_unmatched;
            ++a;
            continue;
        }
        if (r.frame < f.frame) {
            ++out.stats.discarded_unmatched;
            ++b;
            continue;
        }
        if (f.csi.size() != r.csi.size() || f.csi.empty())
            throw ValidationError("pair_packets: subcarrier count mismatch at frame " +
                                  std::to_string(f.frame));
        const std::uint64_t skew = f.t_ns <= r.t_ns ? r.t_ns - f.t_ns : f.t_ns - r.t_ns;
        if (skew > eps_ns) {
            ++out.stats.discarded_skew;
        } else {
            CsiPair pair;
            pair.frame = f.frame;
            pair.t_fwd_ns = f.t_ns;
            pair.t_bwd_ns = r.t_ns;
            pair.h_squared.resize(f.csi.size());
            for (std::size_t s = 0; s < f.csi.size(); ++s)
                pair.h_squared[s] = cancel_cfo(f.csi[s], r.csi[s]);
            pair.rx_pose = nearest_pose(rx_odometry, f.t_ns);
            out.pairs.push_back(std::move(pair));
            ++out.stats.pair_count;
        }
        ++a;
        ++b;
    }
    out.stats.discarded_unmatched += (packets_fwd.size() - a) + (packets_bwd.size() - b);
    return out;
}

std::complex<double> interpolate_center_subcarrier(const CsiPair& pair, int lo, int hi,
                                                   double target) {
    const int n = static_cast<int>(pair.h_squared.size());
    if (lo < 0 || hi >= n || lo >= hi)
        throw ValidationError("interpolate_center_subcarrier: window must satisfy 0 <= lo < hi < count");
    if (target < lo || target > hi)
        throw ValidationError("interpolate_center_subcarrier: target outside the window");

    std::vector<double> xs, phases, logmags;
    xs.reserve(hi - lo + 1);
    double prev_raw = 0.0, unwrapped = 0.0;
    for (int k = lo; k <= hi; ++k) {
        const std::complex<double> v = pair.h_squared[k];
        const double mag = std::abs(v);
        if (mag == 0.0)
            throw ValidationError("interpolate_center_subcarrier: zero-magnitude subcarrier " +
                                  std::to_string(k));
        const double raw = std::arg(v);
        if (k == lo) {
            unwrapped = raw;
        } else {
            unwrapped += std::remainder(raw - prev_raw, 2.0 * 3.14159265358979323846);
        }
        prev_raw = raw;
        xs.push_back(static_cast<double>(k));
        phases.push_back(unwrapped);
        logmags.push_back(std::log(mag));
    }
    const LinearFit phase_fit = least_squares(xs, phases);
    const LinearFit mag_fit = least_squares(xs, logmags);
    return std::polar(std::exp(mag_fit.at(target)), phase_fit.at(target));
}

}  // namespace csisim
