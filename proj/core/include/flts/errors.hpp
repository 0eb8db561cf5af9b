#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flts {

// Invalid configuration or malformed input. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values appeared during time stepping. CLI exit code 3.
// Carries the step index at which non-finiteness was first detected.
class BlowupError : public std::runtime_error {
public:
    BlowupError(std::int64_t step, double time)
        : std::runtime_error("numerical blow-up at step " + std::to_string(step) +
                             " (t = " + std::to_string(time) + ")"),
          step_(step),
          time_(time) {}

    std::int64_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    std::int64_t step_;
    double time_;
};

// File read/write failure. CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A state failed a structural sanity check (e.g. a recovered real field with a
// large imaginary residue).
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace flts
