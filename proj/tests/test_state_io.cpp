#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "flts/errors.hpp"
#include "flts/roughdata.hpp"
#include "flts/state_io.hpp"
#include "test_util.hpp"

using namespace flts;
using namespace flts::testing;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("flts_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("binary round trip is bit exact") {
    TempDir dir;
    RoughDataSpec spec;
    spec.s = 0.5;
    spec.M = 128;
    spec.seed = 77;
    GBState s = generate(spec);

    StateMeta meta;
    meta.seed = spec.seed;
    meta.s = spec.s;
    meta.psi_mode = "zero";
    meta.generator = kGeneratorVersion;
    meta.extra["note"] = "test";

    const std::string path = dir.file("state.bin");
    save_state(path, s, meta);

    StateMeta back_meta;
    GBState back = load_state(path, &back_meta);
    CHECK(back_meta.seed == 77);
    CHECK(back_meta.s == 0.5);
    CHECK(back_meta.M == 128);
    CHECK(back_meta.generator == kGeneratorVersion);
    CHECK(back_meta.extra.at("note") == "test");

    const auto& a = s.z.coeffs();
    const auto& b = back.z.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].real() == b[i].real());
        CHECK(a[i].imag() == b[i].imag());
    }
    const auto& at = s.zt.coeffs();
    const auto& bt = back.zt.coeffs();
    for (std::size_t i = 0; i < at.size(); ++i) {
        CHECK(at[i] == bt[i]);
    }
}

TEST_CASE("text round trip preserves nodal values") {
    TempDir dir;
    auto g = make_grid(64);
    GBState s{cosine(g, 3, 0.25), sine(g, 1, -0.5)};

    StateMeta meta;
    meta.seed = 5;
    meta.s = 0.8;
    meta.generator = kGeneratorVersion;

    const std::string path = dir.file("state.txt");
    CHECK(format_for_path(path) == StateFormat::text);
    save_state(path, s, meta);

    StateMeta back_meta;
    GBState back = load_state(path, &back_meta);
    CHECK(back_meta.M == 64);
    CHECK(back_meta.seed == 5);
    CHECK(back_meta.s == 0.8);

    // shortest round-trip formatting reproduces doubles exactly
    const auto za = s.z.real_values();
    const auto zb = back.z.real_values();
    for (int j = 0; j < 64; ++j) CHECK(za[j] == doctest::Approx(zb[j]).epsilon(1e-15));
}

TEST_CASE("format detection and sniffing") {
    CHECK(format_for_path("a.bin") == StateFormat::binary);
    CHECK(format_for_path("a.state") == StateFormat::binary);
    CHECK(format_for_path("a.txt") == StateFormat::text);
    CHECK(format_for_path("a.dat") == StateFormat::text);

    TempDir dir;
    auto g = make_grid(16);
    GBState s{cosine(g, 1), Field::zero(g)};
    StateMeta meta;

    // binary content under a .txt-less name, loaded by sniffing
    const std::string odd = dir.file("state.out");
    save_state(odd, s, meta, StateFormat::text);
    GBState back = load_state(odd);
    CHECK(max_coeff_diff(back.z, s.z) < 1e-12);
}

TEST_CASE("io errors") {
    TempDir dir;
    CHECK_THROWS_AS(load_state(dir.file("missing.bin")), IoError);

    const std::string garbage = dir.file("garbage.bin");
    {
        std::ofstream os(garbage, std::ios::binary);
        os << "FLTSGB1\n";
        const std::uint32_t len = 10;
        os.write(reinterpret_cast<const char*>(&len), sizeof(len));
        os << "not json!!";
    }
    CHECK_THROWS_AS(load_state(garbage), IoError);

    const std::string truncated = dir.file("short.txt");
    {
        std::ofstream os(truncated);
        os << "# M: 64\n0.0 1.0 2.0\n";
    }
    CHECK_THROWS_AS(load_state(truncated), IoError);
}
