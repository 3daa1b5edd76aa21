#pragma once

#include <string>
#include <vector>

#include "csisim/datastore.hpp"

namespace csisim {

// Canned scenarios mirroring the reference hardware runs: 5.54 GHz carrier,
// 100 Hz CSI rate, a 0.3 m circular aperture (or its straight-line / parked
// equivalents), and the stock impairment settings (3 dB SNR, 300 us mean
// send offset, 100 ns pairing skew, 10 Hz + sinusoidal oscillator drift).
std::vector<std::string> preset_names();

bool is_preset(const std::string& name);

ScenarioConfig preset_config(const std::string& name);

// Copy with AWGN, timing jitter, and packet loss switched off. Oscillator
// drift stays on: cancellation, not absence, is the thing under test.
ScenarioConfig make_noiseless(ScenarioConfig config);

}  // namespace csisim
