#include "csisim/channel.hpp"

#include <cmath>

#include "csisim/errors.hpp"

namespace csisim {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// Unit phasor e^{-2 pi i cycles}. Wrapping happens in cycles (exactly, via
// IEEE remainder) before the trig calls, so huge CFO terms do not bleed
// rounding error into the geometric phase.
std::complex<double> unit_phasor(double cycles) {
    const double a = -kTwoPi * cycles;
    return {std::cos(a), std::sin(a)};
}

}  // namespace

double wrap_cycles(double cycles) { return std::remainder(cycles, 1.0); }

void CarrierConfig::validate() const {
    if (!(center_frequency_hz > 0.0)) throw ValidationError("carrier: center_frequency must be positive");
    if (subcarrier_count < 1) throw ValidationError("carrier: subcarrier_count must be >= 1");
    if (!(subcarrier_spacing_hz > 0.0)) throw ValidationError("carrier: subcarrier_spacing must be positive");
    if (!(channel_bandwidth_hz > 0.0)) throw ValidationError("carrier: channel_bandwidth must be positive");
    if (!(center_subcarrier_index >= 0.0) || !(center_subcarrier_index <= subcarrier_count - 1))
        throw ValidationError("carrier: center_subcarrier_index outside the subcarrier range");
    if (!(subcarrier_frequency_hz(0) > 0.0))
        throw ValidationError("carrier: subcarrier layout reaches non-positive frequencies");
}

void NoiseConfig::validate() const {
    if (!std::isfinite(snr_db)) throw ValidationError("noise: snr_db must be finite");
    if (!(sto_mean_s >= 0.0)) throw ValidationError("noise: sto_mean must be non-negative");
    if (!(epsilon_t_s >= 0.0)) throw ValidationError("noise: epsilon_t must be non-negative");
}

double cfo_phase(double t_s, const CfoModel& model) {
    return model.delta_f_hz * t_s + model.c1 * std::sin(model.c2 * t_s);
}

std::complex<double> ideal_csi(double d_m, double lambda_m) {
    if (!(d_m > 0.0)) throw ValidationError("ideal_csi: distance must be positive");
    if (!(lambda_m > 0.0)) throw ValidationError("ideal_csi: wavelength must be positive");
    double r = wrap_cycles(d_m / lambda_m);
    if (r == 0.5) r = -0.5;  // phase lands in (-pi, pi]
    return unit_phasor(r) * (1.0 / d_m);
}

std::complex<double> ideal_csi(double d_m, const CarrierConfig& carrier) {
    return ideal_csi(d_m, carrier.wavelength_m());
}

std::pair<std::complex<double>, std::complex<double>> perturbed_csi_pair(
    double d_m, double t_fwd_s, double t_bwd_s, double lambda_m, const CfoModel& cfo,
    const NoiseConfig& noise, Rng& rng) {
    if (!(d_m > 0.0)) throw ValidationError("perturbed_csi_pair: distance must be positive");
    noise.validate();
    if (std::abs(t_fwd_s - t_bwd_s) > noise.epsilon_t_s + 1e-12)
        throw ValidationError("perturbed_csi_pair: timestamp skew exceeds epsilon_t");

    // Each contribution is wrapped separately; the sums of wrapped terms stay
    // O(1), so the final wrap is accurate to a few ulp even when the raw CFO
    // is thousands of cycles.
    const double geom = wrap_cycles(d_m / lambda_m);
    const double cfo_f = wrap_cycles(cfo_phase(t_fwd_s, cfo));
    const double cfo_b = wrap_cycles(cfo_phase(t_bwd_s, cfo));
    const double amp = 1.0 / d_m;

    std::complex<double> fwd = unit_phasor(wrap_cycles(geom + cfo_f + wrap_cycles(noise.phase_bias_i_cycles))) * amp;
    std::complex<double> bwd = unit_phasor(wrap_cycles(geom - cfo_b + wrap_cycles(noise.phase_bias_j_cycles))) * amp;

    if (noise.awgn) {
        const double signal_power = amp * amp;
        const double sigma = std::sqrt(signal_power / std::pow(10.0, noise.snr_db / 10.0) / 2.0);
        fwd += std::complex<double>(rng.normal(0.0, sigma), rng.normal(0.0, sigma));
        bwd += std::complex<double>(rng.normal(0.0, sigma), rng.normal(0.0, sigma));
    }
    return {fwd, bwd};
}

std::pair<std::complex<double>, std::complex<double>> perturbed_csi_pair(
    double d_m, double t_fwd_s, double t_bwd_s, const CarrierConfig& carrier, const CfoModel& cfo,
    const NoiseConfig& noise, Rng& rng) {
    return perturbed_csi_pair(d_m, t_fwd_s, t_bwd_s, carrier.wavelength_m(), cfo, noise, rng);
}

std::complex<double> cancel_cfo(std::complex<double> fwd, std::complex<double> bwd) {
    if (fwd == std::complex<double>(0.0, 0.0) || bwd == std::complex<double>(0.0, 0.0))
        throw ValidationError("cancel_cfo: zero channel estimate");
    return fwd * bwd;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> jittered_timestamps(
    const std::vector<std::uint64_t>& nominal_ns, const NoiseConfig& noise, Rng& rng) {
    noise.validate();
    for (std::size_t i = 1; i < nominal_ns.size(); ++i)
        if (nominal_ns[i] <= nominal_ns[i - 1])
            throw ValidationError("jittered_timestamps: nominal timestamps must strictly increase");

    const std::uint64_t eps_ns =
        static_cast<std::uint64_t>(std::llround(noise.epsilon_t_s * 1e9));
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    out.reserve(nominal_ns.size());
    for (std::size_t i = 0; i < nominal_ns.size(); ++i) {
        const double sto_s = rng.exponential(noise.sto_mean_s);
        const double skew_s = rng.uniform(0.0, noise.epsilon_t_s);
        std::uint64_t t_fwd = nominal_ns[i] + static_cast<std::uint64_t>(std::llround(sto_s * 1e9));
        if (!out.empty() && t_fwd <= out.back().first) t_fwd = out.back().first + 1;
        std::uint64_t t_bwd = t_fwd + static_cast<std::uint64_t>(std::llround(skew_s * 1e9));
        if (!out.empty() && t_bwd <= out.back().second) t_bwd = out.back().second + 1;
        if (t_bwd > t_fwd + eps_ns) t_bwd = t_fwd + eps_ns;  // always >= previous, see tests
        out.emplace_back(t_fwd, t_bwd);
    }
    return out;
}

}  // namespace csisim
