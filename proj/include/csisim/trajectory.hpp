#pragma once

#include <cstdint>
#include <vector>

namespace csisim {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const;
    bool operator==(const Vec3&) const = default;
};

// Timestamped position+heading of one node, world frame.
// t_ns is nanoseconds since scenario start and strictly increases within a
// stream; yaw is radians in [-pi, pi).
struct Pose {
    std::uint64_t t_ns = 0;
    Vec3 pos;
    double yaw = 0.0;

    bool operator==(const Pose&) const = default;
};

// Displacement between two poses in spherical form: magnitude d, azimuth
// phi_disp = atan2(dy, dx), polar xi_disp = acos(dz/d) with 0 pointing along
// +z and pi/2 the horizontal plane. Zero displacement maps to (0, 0, 0) so
// downstream phase terms stay finite.
struct SphericalDisplacement {
    double d = 0.0;
    double phi_disp = 0.0;
    double xi_disp = 0.0;
};

enum class TrajectoryKind { stationary, circular, linear, waypoints };

struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::stationary;
    Pose start;                   // start.t_ns is ignored, streams begin at 0
    double radius_m = 0.0;        // circular only
    double length_m = 0.0;        // linear only
    std::vector<Vec3> waypoints;  // waypoints only, visited after start.pos
    double duration_s = 0.0;
    double sample_rate_hz = 0.0;

    void validate() const;  // throws ValidationError
    bool operator==(const TrajectorySpec&) const = default;
};

// Emits floor(duration * rate) + 1 poses at uniform nominal intervals.
//   stationary: repeats the start pose.
//   circular:   one full counterclockwise loop at constant speed; the circle
//               center sits perpendicular-left of the initial heading at
//               distance radius_m, so the robot turns onto the circle the way
//               a differential-drive base would.
//   linear:     straight along the initial heading, length_m total.
//   waypoints:  piecewise linear through start.pos then each waypoint at
//               constant speed; yaw follows the segment heading.
std::vector<Pose> generate_trajectory(const TrajectorySpec& spec);

SphericalDisplacement displacement_spherical(const Pose& p0, const Pose& p);

// Inverse of displacement_spherical, used by round-trip checks.
Vec3 spherical_to_cartesian(const SphericalDisplacement& s);

// Relative bearing of tx seen from the receiver's start frame: translate so
// rx_start.pos is the origin, rotate by -yaw, take atan2(y, x). Result is in
// [-pi, pi). Horizontally co-located nodes are rejected.
//
// Note for array-based estimates: a far-field bearing estimator built from a
// motion-synthesized aperture reports the direction from the aperture's
// centroid, so pipeline summaries evaluate this with a reference pose whose
// position is the trajectory centroid and whose yaw is the start yaw.
double ground_truth_bearing(const Pose& rx_start, const Pose& tx);

// Wraps an angle to [-pi, pi); +pi maps to -pi.
double wrap_pi(double angle_rad);

double path_length(const std::vector<Pose>& traj);

Vec3 centroid(const std::vector<Pose>& traj);

struct SpacingStats {
    double mean_m = 0.0;
    double max_m = 0.0;
};

// Consecutive-sample spacing; the estimator warns when max exceeds half the
// carrier wavelength (spatial aliasing threshold for the virtual array).
SpacingStats sample_spacing(const std::vector<Pose>& traj);

}  // namespace csisim
