#pragma once

#include <cstdint>

#include "flts/gb.hpp"
#include "flts/philox.hpp"
#include "flts/spectral.hpp"

namespace flts {

// Version string recorded in data file headers: identifies engine and draw
// order of the rough-data pipeline.
inline constexpr const char* kGeneratorVersion = Philox4x32::kVersion;

struct RoughDataSpec {
    enum class PsiMode { zero, rough };

    double s = 0.5;      // regularity exponent for phi_0 (> 0)
    int M = 1 << 12;     // grid size
    std::uint64_t seed = 0;
    PsiMode psi_mode = PsiMode::zero;

    void validate() const;  // throws ConfigError
};

// |d_{x,M}|^{-s}: coeff(k) *= |k|^{-s} for k != 0, coeff(0) = 0.
Field fractional_smoothing(const Field& f, double s);

// H^s-normalized rough data: draws M uniforms Z and one uniform c, forms
// Z1 = |d_x|^{-s} Z and phi_0 = (Z1 + c max|Z1|) / ||Z1 + c max|Z1|||_{H^s}.
// psi_0 is the zero field, or the same pipeline with exponent s - 2
// normalized in H^{s-2}. Bit-deterministic for a fixed seed.
GBState generate(const RoughDataSpec& spec);

}  // namespace flts
