#pragma once

namespace csisim {

// Full command-line entry point; returns the process exit code.
// 0 success, 1 validation error, 2 I/O error, 3 internal invariant violation.
int run_cli(int argc, const char* const* argv);

}  // namespace csisim
