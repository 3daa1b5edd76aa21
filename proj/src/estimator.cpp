#include "csisim/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "csisim/errors.hpp"

namespace csisim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

bool near_integer_ratio(double range, double step) {
    const double q = range / step;
    return std::abs(q - std::round(q)) < 1e-9;
}

}  // namespace

AngleGrid AngleGrid::full(double az_step_deg, double pol_step_deg) {
    if (!(az_step_deg > 0.0) || !near_integer_ratio(360.0, az_step_deg))
        throw ValidationError("grid: azimuth step must divide 360 evenly");
    if (!(pol_step_deg > 0.0) || !near_integer_ratio(180.0, pol_step_deg))
        throw ValidationError("grid: polar step must divide 180 evenly");
    AngleGrid g;
    g.az_step_deg = az_step_deg;
    g.n_az = static_cast<int>(std::round(360.0 / az_step_deg));
    g.pol_step_deg = pol_step_deg;
    g.n_pol = static_cast<int>(std::round(180.0 / pol_step_deg)) + 1;
    g.validate();
    return g;
}

AngleGrid AngleGrid::with_fixed_polar(double polar_deg, double az_step_deg) {
    if (!(polar_deg >= 0.0) || !(polar_deg <= 180.0))
        throw ValidationError("grid: fixed polar angle must lie in [0, 180]");
    AngleGrid g = full(az_step_deg, 1.0);
    g.pol_start_deg = polar_deg;
    g.pol_step_deg = 1.0;
    g.n_pol = 1;
    return g;
}

void AngleGrid::validate() const {
    if (!(az_step_deg > 0.0) || !(pol_step_deg > 0.0))
        throw ValidationError("grid: steps must be positive");
    if (n_az < 2) throw ValidationError("grid: need at least 2 azimuth samples");
    if (n_pol < 1) throw ValidationError("grid: need at least 1 polar sample");
    if (std::abs(az_start_deg + 180.0) > 1e-9 || std::abs(n_az * az_step_deg - 360.0) > 1e-6)
        throw ValidationError("grid: azimuth samples must cover [-180, 180) evenly");
    if (n_pol > 1) {
        if (std::abs(pol_start_deg) > 1e-9 ||
            std::abs(pol_start_deg + (n_pol - 1) * pol_step_deg - 180.0) > 1e-6)
            throw ValidationError("grid: polar samples must cover [0, 180] evenly");
    } else {
        if (!(pol_start_deg >= 0.0) || !(pol_start_deg <= 180.0))
            throw ValidationError("grid: fixed polar angle must lie in [0, 180]");
    }
}

std::complex<double> steering_phase(const SphericalDisplacement& disp, double polar_rad,
                                    double azimuth_rad, double lambda_m) {
    if (!(lambda_m > 0.0)) throw ValidationError("steering_phase: wavelength must be positive");
    const double cos_gamma = std::sin(polar_rad) * std::sin(disp.xi_disp) *
                                 std::cos(azimuth_rad - disp.phi_disp) +
                             std::cos(disp.xi_disp) * std::cos(polar_rad);
    const double phase = -2.0 * kPi * (disp.d / lambda_m) * cos_gamma;
    return {std::cos(phase), std::sin(phase)};
}

SteeringGrid SteeringGrid::build(const AngleGrid& grid,
                                 const std::vector<SphericalDisplacement>& disps, double lambda_m,
                                 bool squared) {
    grid.validate();
    SteeringGrid sg;
    sg.grid = grid;
    sg.lambda_m = lambda_m;
    sg.squared = squared;
    sg.n_samples = disps.size();
    sg.values.resize(disps.size() * static_cast<std::size_t>(grid.cells()));
    std::size_t w = 0;
    for (const SphericalDisplacement& disp : disps) {
        for (int ia = 0; ia < grid.n_az; ++ia) {
            const double az = grid.azimuth_deg(ia) * kDegToRad;
            for (int ip = 0; ip < grid.n_pol; ++ip) {
                const double pol = grid.polar_deg(ip) * kDegToRad;
                std::complex<double> a = steering_phase(disp, pol, az, lambda_m);
                if (squared) a *= a;
                sg.values[w++] = a;
            }
        }
    }
    return sg;
}

AoaProfile bartlett_profile(const std::vector<CsiPair>& pairs, const std::vector<Pose>& odometry,
                            const AngleGrid& grid, double lambda_m, const BartlettOptions& opts) {
    grid.validate();
    if (!(lambda_m > 0.0)) throw ValidationError("bartlett_profile: wavelength must be positive");
    if (pairs.empty()) throw ValidationError("bartlett_profile: no pairs to project");
    if (odometry.empty()) throw ValidationError("bartlett_profile: empty odometry stream");

    // Timebase sanity: the pairs must belong to this odometry stream. Jitter
    // can push packet timestamps slightly past the last odometry sample, so
    // allow a generous but bounded overhang.
    const std::uint64_t slack_ns = 1'000'000'000ull;
    const std::uint64_t lo = odometry.front().t_ns > slack_ns ? odometry.front().t_ns - slack_ns : 0;
    const std::uint64_t hi = odometry.back().t_ns + slack_ns;
    for (const CsiPair& p : pairs)
        if (p.t_fwd_ns < lo || p.t_fwd_ns > hi)
            throw ValidationError("bartlett_profile: pair timestamps do not match the odometry timebase");

    AoaProfile out;
    out.grid = grid;
    out.n_samples = pairs.size();

    const std::size_t n = pairs.size();
    std::vector<double> hr(n), hi_(n), dx(n), dy(n), dz(n);

    for (std::size_t t = 0; t < n; ++t) {
        const CsiPair& p = pairs[t];
        std::complex<double> h;
        if (p.h_squared.size() == 1) {
            h = p.h_squared[0];
        } else {
            h = interpolate_center_subcarrier(p, opts.interp_lo, opts.interp_hi, opts.interp_target);
        }
        hr[t] = h.real();
        hi_[t] = h.imag();
    }

    // Displacements relative to the first paired pose, rotated into its
    // heading frame so the azimuth axis is relative bearing.
    const Pose& ref = pairs.front().rx_pose;
    const double cy = std::cos(ref.yaw);
    const double sy = std::sin(ref.yaw);
    double max_step = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const Vec3 w = pairs[t].rx_pose.pos - ref.pos;
        dx[t] = cy * w.x + sy * w.y;
        dy[t] = -sy * w.x + cy * w.y;
        dz[t] = w.z;
        if (t > 0) {
            const double step = (pairs[t].rx_pose.pos - pairs[t - 1].rx_pose.pos).norm();
            out.total_displacement_m += step;
            max_step = std::max(max_step, step);
        }
    }

    if (n < 2)
        out.warnings.push_back("single sample: the profile has no directivity");
    if (out.total_displacement_m == 0.0 && n >= 2)
        out.warnings.push_back("zero displacement: the profile has no directivity");
    else if (out.total_displacement_m < 2.0 * lambda_m)
        out.warnings.push_back("aperture below two wavelengths; expect a broad, unreliable peak");
    if (max_step > lambda_m / 2.0)
        out.warnings.push_back("sample spacing exceeds half a wavelength; spatial aliasing likely");

    const double k_wave = (opts.squared_steering ? 2.0 : 1.0) * 2.0 * kPi / lambda_m;
    const int n_az = grid.n_az;
    const int n_pol = grid.n_pol;
    std::vector<double> cos_az(n_az), sin_az(n_az), sin_pol(n_pol), cos_pol(n_pol);
    for (int ia = 0; ia < n_az; ++ia) {
        const double az = grid.azimuth_deg(ia) * kDegToRad;
        cos_az[ia] = std::cos(az);
        sin_az[ia] = std::sin(az);
    }
    for (int ip = 0; ip < n_pol; ++ip) {
        const double pol = grid.polar_deg(ip) * kDegToRad;
        sin_pol[ip] = std::sin(pol);
        cos_pol[ip] = std::cos(pol);
    }

    out.values.assign(static_cast<std::size_t>(grid.cells()), 0.0);

#pragma omp parallel for schedule(static)
    for (int cell = 0; cell < grid.cells(); ++cell) {
        const int ia = cell / n_pol;
        const int ip = cell % n_pol;
        const double ux = sin_pol[ip] * cos_az[ia];
        const double uy = sin_pol[ip] * sin_az[ia];
        const double uz = cos_pol[ip];
        // Compensated sum in time order; partition-independent by design.
        double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double phase = -k_wave * (ux * dx[t] + uy * dy[t] + uz * dz[t]);
            const double c = std::cos(phase);
            const double s = std::sin(phase);
            const double term_r = hr[t] * c - hi_[t] * s;
            const double term_i = hr[t] * s + hi_[t] * c;
            double y = term_r - cr;
            double tt = sr + y;
            cr = (tt - sr) - y;
            sr = tt;
            y = term_i - ci;
            tt = si + y;
            ci = (tt - si) - y;
            si = tt;
        }
        out.values[cell] = sr * sr + si * si;
    }

    // Peak with lowest-linear-index tie-break, then peak mass over total mass.
    std::size_t best = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        total += out.values[i];
        if (out.values[i] > out.values[best]) best = i;
    }
    out.peak.az_idx = static_cast<int>(best) / n_pol;
    out.peak.pol_idx = static_cast<int>(best) % n_pol;
    out.peak.azimuth_deg = grid.azimuth_deg(out.peak.az_idx);
    out.peak.polar_deg = grid.polar_deg(out.peak.pol_idx);
    out.peak.magnitude = out.values[best];
    out.confidence = total > 0.0 ? out.peak.magnitude / total : 0.0;
    return out;
}

std::vector<Peak> extract_peaks(const AoaProfile& profile, int count, double min_separation_deg) {
    if (count < 1) throw ValidationError("extract_peaks: count must be >= 1");
    const AngleGrid& g = profile.grid;
    const int n_az = g.n_az;
    const int n_pol = g.n_pol;

    auto value = [&](int ia, int ip) { return profile.values[static_cast<std::size_t>(ia) * n_pol + ip]; };

    std::vector<Peak> candidates;
    for (int ia = 0; ia < n_az; ++ia) {
        for (int ip = 0; ip < n_pol; ++ip) {
            const double v = value(ia, ip);
            const long idx = static_cast<long>(ia) * n_pol + ip;
            bool is_peak = true;
            for (int da = -1; da <= 1 && is_peak; ++da) {
                for (int dp = -1; dp <= 1 && is_peak; ++dp) {
                    if (da == 0 && dp == 0) continue;
                    const int na = (ia + da + n_az) % n_az;  // azimuth wraps
                    const int np = ip + dp;
                    if (np < 0 || np >= n_pol) continue;
                    if (na == ia && np == ip) continue;  // degenerate wrap on tiny grids
                    const double nv = value(na, np);
                    const long nidx = static_cast<long>(na) * n_pol + np;
                    // Plateaus: only the lowest-index cell of an equal-valued
                    // neighborhood counts as the peak.
                    if (nv > v || (nv == v && nidx < idx)) is_peak = false;
                }
            }
            if (is_peak)
                candidates.push_back(
                    {ia, ip, g.azimuth_deg(ia), g.polar_deg(ip), v});
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(), [&](const Peak& a, const Peak& b) {
        if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
        return static_cast<long>(a.az_idx) * n_pol + a.pol_idx <
               static_cast<long>(b.az_idx) * n_pol + b.pol_idx;
    });

    std::vector<Peak> out;
    for (const Peak& cand : candidates) {
        if (static_cast<int>(out.size()) >= count) break;
        if (min_separation_deg > 0.0) {
            bool suppressed = false;
            for (const Peak& kept : out) {
                double daz = std::abs(cand.azimuth_deg - kept.azimuth_deg);
                daz = std::min(daz, 360.0 - daz);
                const double dpol = std::abs(cand.polar_deg - kept.polar_deg);
                if (daz <= min_separation_deg && dpol <= min_separation_deg) {
                    suppressed = true;
                    break;
                }
            }
            if (suppressed) continue;
        }
        out.push_back(cand);
    }
    return out;
}

}  // namespace csisim
