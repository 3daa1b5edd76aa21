#pragma once

#include <stdexcept>
#include <string>

namespace csisim {

// Error taxonomy mapped to process exit codes. Validation errors mean the
// caller supplied bad input; IO errors mean the filesystem or file contents
// failed us; internal errors mean a broken invariant inside this library.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitInternal = 3;

}  // namespace csisim
