#include "csisim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csisim/errors.hpp"

namespace csisim {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t nominal_t_ns(std::size_t k, double rate_hz) {
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(k) * 1e9 / rate_hz));
}

std::size_t sample_count(double duration_s, double rate_hz) {
    // Small slack so 10.0 * 100.0 style products land on the intended count.
    return static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-9)) + 1;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double wrap_pi(double angle_rad) {
    double w = std::remainder(angle_rad, 2.0 * kPi);  // [-pi, pi]
    if (w >= kPi) w = -kPi;
    return w;
}

void TrajectorySpec::validate() const {
    if (!(duration_s > 0.0)) throw ValidationError("trajectory: duration must be positive");
    if (!(sample_rate_hz > 0.0)) throw ValidationError("trajectory: sample_rate must be positive");
    switch (kind) {
        case TrajectoryKind::circular:
            if (!(radius_m > 0.0)) throw ValidationError("trajectory: circular radius must be positive");
            break;
        case TrajectoryKind::linear:
            if (!(length_m > 0.0)) throw ValidationError("trajectory: linear length must be positive");
            break;
        case TrajectoryKind::waypoints:
            if (waypoints.empty()) throw ValidationError("trajectory: waypoints list is empty");
            break;
        case TrajectoryKind::stationary:
            break;
    }
}

std::vector<Pose> generate_trajectory(const TrajectorySpec& spec) {
    spec.validate();
    const std::size_t n = sample_count(spec.duration_s, spec.sample_rate_hz);
    std::vector<Pose> out;
    out.reserve(n);

    const double yaw0 = wrap_pi(spec.start.yaw);
    const Vec3 p0 = spec.start.pos;

    switch (spec.kind) {
        case TrajectoryKind::stationary: {
            for (std::size_t k = 0; k < n; ++k)
                out.push_back({nominal_t_ns(k, spec.sample_rate_hz), p0, yaw0});
            break;
        }
        case TrajectoryKind::circular: {
            // Center perpendicular-left of the initial heading; the start
            // point sits at angle yaw0 - pi/2 on the circle and the robot
            // sweeps counterclockwise, covering 2*pi in duration_s.
            const double r = spec.radius_m;
            const Vec3 c{p0.x - r * std::sin(yaw0), p0.y + r * std::cos(yaw0), p0.z};
            const double a0 = yaw0 - kPi / 2.0;
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t t_ns = nominal_t_ns(k, spec.sample_rate_hz);
                const double u = static_cast<double>(t_ns) * 1e-9 / spec.duration_s;
                const double a = a0 + 2.0 * kPi * u;
                Pose p;
                p.t_ns = t_ns;
                p.pos = {c.x + r * std::cos(a), c.y + r * std::sin(a), c.z};
                p.yaw = wrap_pi(yaw0 + 2.0 * kPi * u);
                out.push_back(p);
            }
            break;
        }
        case TrajectoryKind::linear: {
            const double v = spec.length_m / spec.duration_s;
            const Vec3 dir{std::cos(yaw0), std::sin(yaw0), 0.0};
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t t_ns = nominal_t_ns(k, spec.sample_rate_hz);
                const double s = v * static_cast<double>(t_ns) * 1e-9;
                out.push_back({t_ns, p0 + dir * s, yaw0});
            }
            break;
        }
        case TrajectoryKind::waypoints: {
            std::vector<Vec3> pts;
            pts.push_back(p0);
            pts.insert(pts.end(), spec.waypoints.begin(), spec.waypoints.end());
            std::vector<double> cum{0.0};
            for (std::size_t i = 1; i < pts.size(); ++i)
                cum.push_back(cum.back() + (pts[i] - pts[i - 1]).norm());
            const double total = cum.back();
            for (std::size_t k = 0; k < n; ++k) {
                const std::uint64_t t_ns = nominal_t_ns(k, spec.sample_rate_hz);
                const double s = total * (static_cast<double>(t_ns) * 1e-9 / spec.duration_s);
                // Segment containing arc length s; degenerate segments skipped.
                std::size_t seg = 1;
                while (seg + 1 < cum.size() && cum[seg] <= s) ++seg;
                const double seg_len = cum[seg] - cum[seg - 1];
                const double f = seg_len > 0.0 ? std::clamp((s - cum[seg - 1]) / seg_len, 0.0, 1.0) : 0.0;
                const Vec3 a = pts[seg - 1];
                const Vec3 b = pts[seg];
                Pose p;
                p.t_ns = t_ns;
                p.pos = a + (b - a) * f;
                const Vec3 d = b - a;
                p.yaw = (d.x == 0.0 && d.y == 0.0) ? yaw0 : wrap_pi(std::atan2(d.y, d.x));
                out.push_back(p);
            }
            break;
        }
    }
    return out;
}

SphericalDisplacement displacement_spherical(const Pose& p0, const Pose& p) {
    const Vec3 delta = p.pos - p0.pos;
    const double d = delta.norm();
    if (d == 0.0) return {0.0, 0.0, 0.0};
    SphericalDisplacement s;
    s.d = d;
    s.phi_disp = std::atan2(delta.y, delta.x);
    s.xi_disp = std::acos(std::clamp(delta.z / d, -1.0, 1.0));
    return s;
}

Vec3 spherical_to_cartesian(const SphericalDisplacement& s) {
    return {s.d * std::sin(s.xi_disp) * std::cos(s.phi_disp),
            s.d * std::sin(s.xi_disp) * std::sin(s.phi_disp),
            s.d * std::cos(s.xi_disp)};
}

double ground_truth_bearing(const Pose& rx_start, const Pose& tx) {
    const Vec3 delta = tx.pos - rx_start.pos;
    if (std::hypot(delta.x, delta.y) == 0.0)
        throw ValidationError("ground_truth_bearing: nodes are horizontally co-located");
    return wrap_pi(std::atan2(delta.y, delta.x) - rx_start.yaw);
}

double path_length(const std::vector<Pose>& traj) {
    double total = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) total += (traj[i].pos - traj[i - 1].pos).norm();
    return total;
}

Vec3 centroid(const std::vector<Pose>& traj) {
    if (traj.empty()) throw ValidationError("centroid: empty trajectory");
    Vec3 sum;
    for (const Pose& p : traj) sum = sum + p.pos;
    return sum * (1.0 / static_cast<double>(traj.size()));
}

SpacingStats sample_spacing(const std::vector<Pose>& traj) {
    SpacingStats st;
    if (traj.size() < 2) return st;
    double total = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double step = (traj[i].pos - traj[i - 1].pos).norm();
        total += step;
        st.max_m = std::max(st.max_m, step);
    }
    st.mean_m = total / static_cast<double>(traj.size() - 1);
    return st;
}

}  // namespace csisim
