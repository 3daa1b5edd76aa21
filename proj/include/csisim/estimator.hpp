#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "csisim/exchange.hpp"
#include "csisim/trajectory.hpp"

namespace csisim {

// Candidate-direction grid: azimuth covers [-180, 180) and polar covers
// [0, 180] (90 = horizontal plane), both in degrees. The factories enforce
// that the steps divide the ranges evenly. A grid restricted to one polar
// row (the planar fast path) is built via with_fixed_polar.
struct AngleGrid {
    double az_start_deg = -180.0;
    double az_step_deg = 1.0;
    int n_az = 360;
    double pol_start_deg = 0.0;
    double pol_step_deg = 1.0;
    int n_pol = 181;

    static AngleGrid full(double az_step_deg = 1.0, double pol_step_deg = 1.0);
    static AngleGrid with_fixed_polar(double polar_deg, double az_step_deg = 1.0);

    double azimuth_deg(int ia) const { return az_start_deg + ia * az_step_deg; }
    double polar_deg(int ip) const { return pol_start_deg + ip * pol_step_deg; }
    int cells() const { return n_az * n_pol; }
    bool polar_fixed() const { return n_pol == 1; }
    void validate() const;
    bool operator==(const AngleGrid&) const = default;
};

// Unit-magnitude weight a plane wave from candidate direction (polar,
// azimuth) accrues over a displacement given in spherical form:
// exp(-2 pi i (d / lambda) * cos(gamma)) with cos(gamma) the cosine of the
// angle between candidate direction and displacement direction.
std::complex<double> steering_phase(const SphericalDisplacement& disp, double polar_rad,
                                    double azimuth_rad, double lambda_m);

// Materialized steering weights for every (cell, sample) combination.
// Sample-major layout: values[t * grid.cells() + cell]. Intended for small
// grids and validation; the profile computation below generates weights on
// the fly instead of storing this matrix.
struct SteeringGrid {
    AngleGrid grid;
    double lambda_m = 0.0;
    bool squared = false;
    std::size_t n_samples = 0;
    std::vector<std::complex<double>> values;

    static SteeringGrid build(const AngleGrid& grid,
                              const std::vector<SphericalDisplacement>& disps, double lambda_m,
                              bool squared = false);
    std::complex<double> at(std::size_t sample, int cell) const {
        return values[sample * static_cast<std::size_t>(grid.cells()) + cell];
    }
};

struct Peak {
    int az_idx = 0;
    int pol_idx = 0;
    double azimuth_deg = 0.0;
    double polar_deg = 0.0;
    double magnitude = 0.0;
};

// Spatial spectrum over the grid. values is azimuth-major:
// index = az_idx * n_pol + pol_idx. confidence is peak mass over total mass.
struct AoaProfile {
    AngleGrid grid;
    std::vector<double> values;
    Peak peak;
    double confidence = 0.0;
    std::uint64_t n_samples = 0;
    double total_displacement_m = 0.0;
    std::vector<std::string> warnings;

    double at(int az_idx, int pol_idx) const {
        return values[static_cast<std::size_t>(az_idx) * grid.n_pol + pol_idx];
    }
};

struct BartlettOptions {
    // The reciprocal product accumulates the one-way phase twice, so the
    // matching steering weight is the squared one. The plain weight stays
    // available for comparison studies.
    bool squared_steering = true;
    int interp_lo = 12;
    int interp_hi = 19;
    double interp_target = 15.5;

    bool operator==(const BartlettOptions&) const = default;
};

// Projects the center-interpolated reciprocal products onto every candidate
// direction and returns the squared magnitude of each projection:
// F(direction) = |sum_t h2(t) * a^2(direction, t)|^2.
//
// Displacements are taken from each pair's rx_pose relative to the first
// pair's pose, rotated into that pose's heading frame, so the azimuth axis
// reads as relative bearing. Per-cell accumulation is compensated and runs
// in time order, making the result independent of any cell-level
// parallelism. Warns (never fails) on apertures below two wavelengths and
// on sample spacing beyond half a wavelength.
AoaProfile bartlett_profile(const std::vector<CsiPair>& pairs, const std::vector<Pose>& odometry,
                            const AngleGrid& grid, double lambda_m,
                            const BartlettOptions& opts = {});

// Local maxima of the profile (8-neighborhood, azimuth wraps), magnitude
// descending, at most `count` entries; the first one is always the profile
// peak. A positive min_separation_deg applies non-maximum suppression: a
// candidate within that box of an already accepted peak is dropped, which
// merges main-lobe ripple into one reported peak.
std::vector<Peak> extract_peaks(const AoaProfile& profile, int count,
                                double min_separation_deg = 0.0);

}  // namespace csisim
