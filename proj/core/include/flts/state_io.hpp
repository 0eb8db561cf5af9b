#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "flts/gb.hpp"

namespace flts {

// Header recorded with every state file. `extra` holds free-form key/value
// pairs (e.g. the tau and T of the run that produced a state).
struct StateMeta {
    std::uint64_t seed = 0;
    double s = 0.0;
    int M = 0;
    std::string psi_mode = "zero";
    std::string generator;
    std::map<std::string, std::string> extra;
};

enum class StateFormat { binary, text };

// .txt and .dat paths are written as the plain-text column format
// (x_j, z(x_j), z_t(x_j)); everything else as the binary coefficient dump.
StateFormat format_for_path(const std::string& path);

void save_state(const std::string& path, const GBState& state, const StateMeta& meta,
                StateFormat format);
inline void save_state(const std::string& path, const GBState& state, const StateMeta& meta) {
    save_state(path, state, meta, format_for_path(path));
}

// Sniffs the format from the file content. Throws IoError on malformed input.
GBState load_state(const std::string& path, StateMeta* meta = nullptr);

}  // namespace flts
