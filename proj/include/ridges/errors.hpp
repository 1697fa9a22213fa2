#pragma once

#include <stdexcept>
#include <string>

namespace ridges {

/// Bad user input (non-finite coordinates, mismatched sizes, ...).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed text input; carries the 1-based line number where parsing failed.
struct ParseError : std::runtime_error {
    int line;
    ParseError(const std::string& msg, int line_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

/// Orientation requested exactly at a singular point, where it is undefined.
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A particle position became non-finite during integration.
struct DivergenceError : std::runtime_error {
    double time;
    int particle;
    DivergenceError(double t, int j)
        : std::runtime_error("non-finite position for particle " + std::to_string(j) +
                             " at t=" + std::to_string(t)),
          time(t), particle(j) {}
};

/// Filesystem failure (missing file, refused overwrite, write error).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ridges
