#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "flts/errors.hpp"
#include "flts/philox.hpp"
#include "flts/roughdata.hpp"
#include "test_util.hpp"

using namespace flts;
using namespace flts::testing;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;

    CHECK(Philox4x32::block(A4{0, 0, 0, 0}, A2{0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::block(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            A2{0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::block(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            A2{0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("philox double stream") {
    Philox4x32 rng(12345);
    Philox4x32 rng2(12345);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.next_double();
        CHECK(a >= 0.0);
        CHECK(a < 1.0);
        CHECK(a == rng2.next_double());
    }
    Philox4x32 other(12346);
    bool all_equal = true;
    Philox4x32 base(12345);
    for (int i = 0; i < 10; ++i) {
        all_equal = all_equal && (other.next_double() == base.next_double());
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("fractional_smoothing") {
    auto g = make_grid(16);

    // the k = 0 mode is excluded
    Field c = fractional_smoothing(Field::constant(g, 3.0), 0.7);
    for (const auto& v : c.coeffs()) CHECK(v == Complex{});

    // s = 0 subtracts the mean
    Field f = random_real_field(g, 31);
    Field s0 = fractional_smoothing(f, 0.0);
    CHECK(s0.coeff(0) == Complex{});
    for (int k = 1; k < 8; ++k) {
        CHECK(std::abs(s0.coeff(k) - f.coeff(k)) < 1e-15);
    }

    Field sm = fractional_smoothing(cosine(g, 2), 1.0);
    CHECK(std::abs(sm.coeff(2) - 0.25) < 1e-15);  // cos 2x / 2 has coeff 1/4
    CHECK(std::abs(sm.coeff(-2) - 0.25) < 1e-15);
}

TEST_CASE("generate: normalization and determinism") {
    for (double s : {0.2, 1.0 / 3.0, 0.5, 0.8}) {
        RoughDataSpec spec;
        spec.s = s;
        spec.M = 256;
        spec.seed = 7;
        GBState st = generate(spec);
        CHECK(std::fabs(sobolev_norm(st.z, s) - 1.0) <= 1e-12);
        CHECK(sobolev_norm(st.zt, 0.0) == 0.0);
        CHECK(st.z.real_valued());
    }

    RoughDataSpec spec;
    spec.s = 0.5;
    spec.M = 128;
    spec.seed = 99;
    GBState a = generate(spec);
    GBState b = generate(spec);
    const auto& ca = a.z.coeffs();
    const auto& cb = b.z.coeffs();
    for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(ca[i].real() == cb[i].real());
        CHECK(ca[i].imag() == cb[i].imag());
    }

    spec.seed = 100;
    GBState c = generate(spec);
    CHECK(max_coeff_diff(a.z, c.z) > 1e-6);
}

TEST_CASE("generate: pre-shift field is exactly mean free") {
    // reproduce the pipeline: the smoothed noise must have coeff(0) == 0
    const int m = 128;
    auto g = make_grid(m);
    Philox4x32 rng(7);
    std::vector<double> draws(m);
    for (auto& d : draws) d = rng.next_double();
    Field noise = Field::from_real_values(g, draws);
    Field z1 = fractional_smoothing(noise, 0.5);
    CHECK(z1.coeff(0) == Complex{});
}

TEST_CASE("generate: smoother exponent gives smaller high-frequency tail") {
    const int m = 256;
    RoughDataSpec rough;
    rough.s = 0.2;
    rough.M = m;
    rough.seed = 11;
    RoughDataSpec smooth = rough;
    smooth.s = 0.8;

    auto tail = [&](const GBState& st) {
        double acc = 0.0;
        const auto& g = st.z.grid();
        const auto& c = st.z.coeffs();
        for (int i = 0; i < m; ++i) {
            if (std::abs(g.wavenumber(i)) > m / 4) acc += std::norm(c[i]);
        }
        return acc;
    };

    CHECK(tail(generate(smooth)) < tail(generate(rough)));
}

TEST_CASE("generate: unnormalized smoothed noise shrinks with s") {
    const int m = 256;
    auto g = make_grid(m);
    Philox4x32 rng(13);
    std::vector<double> draws(m);
    for (auto& d : draws) d = rng.next_double();
    Field noise = Field::from_real_values(g, draws);

    double prev = std::numeric_limits<double>::infinity();
    for (double s : {0.2, 0.5, 0.8}) {
        const double n = sobolev_norm(fractional_smoothing(noise, s), 0.0);
        CHECK(std::isfinite(n));
        CHECK(n < prev);
        prev = n;
    }
}

TEST_CASE("generate: rough psi mode") {
    RoughDataSpec spec;
    spec.s = 0.5;
    spec.M = 256;
    spec.seed = 3;
    spec.psi_mode = RoughDataSpec::PsiMode::rough;
    GBState st = generate(spec);
    CHECK(std::fabs(sobolev_norm(st.zt, spec.s - 2.0) - 1.0) <= 1e-12);

    // phi_0 draws come first, so it matches the zero-psi variant bitwise
    RoughDataSpec zero_psi = spec;
    zero_psi.psi_mode = RoughDataSpec::PsiMode::zero;
    GBState st2 = generate(zero_psi);
    CHECK(max_coeff_diff(st.z, st2.z) == 0.0);
}

TEST_CASE("generate: spec validation") {
    RoughDataSpec spec;
    spec.s = 0.0;
    CHECK_THROWS_AS(generate(spec), ConfigError);
    spec.s = 0.5;
    spec.M = 10;  // even but tiny is fine; odd is not
    CHECK_NOTHROW(generate(spec));
    spec.M = 9;
    CHECK_THROWS_AS(generate(spec), ConfigError);
}
