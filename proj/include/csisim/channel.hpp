#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "csisim/rng.hpp"

namespace csisim {

inline constexpr double kSpeedOfLight = 299792458.0;

// Narrowband carrier plus the OFDM subcarrier layout. Subcarrier k maps to
// frequency center + (k - center_subcarrier_index) * spacing, so the
// fractional center index is the exact carrier frequency; the default layout
// (30 subcarriers, 625 kHz spacing, center index 15.5) spans about 18.1 MHz
// of a 20 MHz channel.
struct CarrierConfig {
    double center_frequency_hz = 5.54e9;
    int subcarrier_count = 30;
    double subcarrier_spacing_hz = 625e3;
    double channel_bandwidth_hz = 20e6;
    double center_subcarrier_index = 15.5;

    double wavelength_m() const { return kSpeedOfLight / center_frequency_hz; }
    double subcarrier_frequency_hz(int k) const {
        return center_frequency_hz + (static_cast<double>(k) - center_subcarrier_index) * subcarrier_spacing_hz;
    }
    double subcarrier_wavelength_m(int k) const { return kSpeedOfLight / subcarrier_frequency_hz(k); }

    void validate() const;  // throws ValidationError
    bool operator==(const CarrierConfig&) const = default;
};

// Carrier frequency offset between two unsynchronized radios, in cycles:
// delta_f * t + c1 * sin(c2 * t). It enters the channel exponent with
// opposite signs in the two link directions, which is what the reciprocal
// product exploits to cancel it.
struct CfoModel {
    double delta_f_hz = 10.0;
    double c1 = 10000.0;
    double c2 = 200.0;

    bool operator==(const CfoModel&) const = default;
};

double cfo_phase(double t_s, const CfoModel& model);  // cycles

struct NoiseConfig {
    double snr_db = 3.0;
    bool awgn = true;             // complex white noise on each direction
    double sto_mean_s = 300e-6;   // exponential sampling-time offset
    double epsilon_t_s = 100e-9;  // max forward/backward timestamp skew, uniform
    double phase_bias_i_cycles = 0.0;
    double phase_bias_j_cycles = 0.0;
    std::uint64_t rng_seed = 1;

    void validate() const;
    bool operator==(const NoiseConfig&) const = default;
};

struct CsiSample {
    std::complex<double> value;
    std::uint64_t t_ns = 0;
    double distance_m = 0.0;
};

// Free-space channel estimate at one antenna separation: magnitude 1/d,
// phase -2 pi d / lambda wrapped to (-pi, pi]. Rejects d <= 0.
std::complex<double> ideal_csi(double d_m, const CarrierConfig& carrier);
std::complex<double> ideal_csi(double d_m, double lambda_m);

// One forward/backward channel estimate pair at a single wavelength.
// Forward exponent: -2 pi (d/lambda + cfo(t_fwd) + bias_i).
// Backward exponent: -2 pi (d/lambda - cfo(t_bwd) + bias_j).
// Complex white noise is added to each direction independently, scaled to
// snr_db against the instantaneous signal power 1/d^2. Noise draw order is
// fixed (fwd re, fwd im, bwd re, bwd im) so streams are reproducible.
std::pair<std::complex<double>, std::complex<double>> perturbed_csi_pair(
    double d_m, double t_fwd_s, double t_bwd_s, double lambda_m, const CfoModel& cfo,
    const NoiseConfig& noise, Rng& rng);
std::pair<std::complex<double>, std::complex<double>> perturbed_csi_pair(
    double d_m, double t_fwd_s, double t_bwd_s, const CarrierConfig& carrier, const CfoModel& cfo,
    const NoiseConfig& noise, Rng& rng);

// Reciprocal product: the opposing CFO signs cancel, leaving the square of
// the one-way channel (plus any per-node bias). Rejects zero inputs.
std::complex<double> cancel_cfo(std::complex<double> fwd, std::complex<double> bwd);

// Maps each nominal timestamp to (t_fwd, t_bwd): forward picks up a
// non-negative exponential offset with mean sto_mean_s, backward trails the
// forward timestamp by a uniform skew in [0, epsilon_t_s]. Both output
// streams stay strictly increasing.
std::vector<std::pair<std::uint64_t, std::uint64_t>> jittered_timestamps(
    const std::vector<std::uint64_t>& nominal_ns, const NoiseConfig& noise, Rng& rng);

// Wraps a phase expressed in cycles to [-0.5, 0.5]; exact (IEEE remainder).
double wrap_cycles(double cycles);

}  // namespace csisim
