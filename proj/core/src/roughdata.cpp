#include "flts/roughdata.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "flts/errors.hpp"

namespace flts {

void RoughDataSpec::validate() const {
    if (!(s > 0.0)) throw ConfigError("rough data: s must be > 0");
    if (M < 4 || M % 2 != 0) throw ConfigError("rough data: M must be even and >= 4");
}

Field fractional_smoothing(const Field& f, double s) {
    const auto& g = f.grid();
    const auto& c = f.coeffs();
    std::vector<Complex> out(c.size());
    for (int i = 1; i < g.size(); ++i) {
        const double k = std::abs(g.wavenumber(i));
        out[i] = std::pow(k, -s) * c[i];
    }
    out[0] = Complex{};
    return Field::from_coeffs(f.grid_ptr(), std::move(out), f.real_valued());
}

namespace {

// Smooth the noise field, shift it by a random fraction of its sup norm,
// then normalize in H^{norm_exponent}.
Field shaped_field(const Field& noise, double smoothing, double norm_exponent, double c) {
    Field z1 = fractional_smoothing(noise, smoothing);
    const double shift = c * sup_norm(z1);

    std::vector<Complex> coeffs = z1.coeffs();
    coeffs[0] += shift;
    Field shifted = Field::from_coeffs(z1.grid_ptr(), std::move(coeffs), true);

    const double norm = sobolev_norm(shifted, norm_exponent);
    if (!(norm > 0.0)) {
        throw ConfigError("rough data: degenerate noise field (zero H^s norm)");
    }
    std::vector<Complex> scaled = shifted.coeffs();
    for (Complex& v : scaled) v /= norm;
    return Field::from_coeffs(z1.grid_ptr(), std::move(scaled), true);
}

}  // namespace

GBState generate(const RoughDataSpec& spec) {
    spec.validate();
    GridPtr grid = make_grid(spec.M);
    Philox4x32 rng(spec.seed);

    auto draw_noise = [&] {
        std::vector<double> z(spec.M);
        for (double& v : z) v = rng.next_double();
        return Field::from_real_values(grid, z);
    };

    Field noise = draw_noise();
    const double c_phi = rng.next_double();
    Field phi = shaped_field(noise, spec.s, spec.s, c_phi);

    Field psi;
    if (spec.psi_mode == RoughDataSpec::PsiMode::zero) {
        psi = Field::zero(grid);
    } else {
        Field noise_psi = draw_noise();
        const double c_psi = rng.next_double();
        psi = shaped_field(noise_psi, spec.s - 2.0, spec.s - 2.0, c_psi);
    }
    return GBState{std::move(phi), std::move(psi)};
}

}  // namespace flts
