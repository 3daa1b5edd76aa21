#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace csisim {

// Deterministic random source. The distributions are hand-rolled on top of
// mt19937_64 because the standard library's distribution objects are not
// required to produce identical streams across implementations, and the
// simulator promises bit-identical output for a given seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached so consecutive calls consume a predictable number of raw draws.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Exponential with the given mean; mean <= 0 always yields 0 so disabled
    // jitter still consumes one draw and keeps stream shapes config-stable.
    double exponential(double mean) {
        double u = uniform01();
        if (mean <= 0.0) return 0.0;
        return -mean * std::log1p(-u);
    }

    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace csisim
