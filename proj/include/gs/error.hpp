#pragma once

#include <stdexcept>
#include <string>

namespace gs {

// Domain error: invalid arguments, violated preconditions, infeasible inputs.
// The CLI maps these to exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File/serialization error; message names the failing field or section.
struct FormatError : Error {
    using Error::Error;
};

} // namespace gs
