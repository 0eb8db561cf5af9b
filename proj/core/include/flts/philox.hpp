#pragma once

#include <array>
#include <cstdint>

namespace flts {

// Philox4x32-10 counter-based generator (Salmon et al., the Random123
// constants). Streams are split by key; the counter advances one 128-bit
// block per four output words. Each block yields two uniform doubles in
// [0, 1) built from 53 bits: words (0,1) then (2,3), high word first.
//
// The draw order is part of the generator contract and is recorded in data
// file headers as `kGeneratorVersion`.
class Philox4x32 {
public:
    static constexpr const char* kVersion = "philox4x32-10/v1";

    explicit Philox4x32(std::uint64_t seed) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * counter[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return counter;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept {
        if (pending_ == 0) {
            buffer_ = block(counter_, key_);
            for (int i = 0; i < 4; ++i) {
                if (++counter_[i] != 0) break;
            }
            pending_ = 2;
        }
        const int base = (pending_ == 2) ? 0 : 2;
        --pending_;
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(buffer_[base]) << 32) | buffer_[base + 1];
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 4> buffer_{};
    int pending_ = 0;
};

}  // namespace flts
