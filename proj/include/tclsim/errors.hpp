#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tclsim {

/// Invalid model parameters, fleet spec, step policy or signal construction.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed signal text. `line` is 1-based; 0 when no line applies.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t line_number)
        : std::runtime_error(line_number > 0 ? what + " (line " + std::to_string(line_number) + ")"
                                             : what),
          line(line_number) {}
    std::size_t line;
};

/// The mean-temperature displacement z reached the pivot value, i.e. the
/// distribution is fully contracted. Constraint clipping keeps normal
/// operation away from this state.
struct PivotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tclsim
