#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "flts/convergence.hpp"
#include "flts/errors.hpp"
#include "flts/philox.hpp"
#include "test_util.hpp"

using namespace flts;
using namespace flts::testing;

namespace {

// numeric part of a report CSV: everything except wall_time and the
// timestamp metadata line
std::string numeric_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("# timestamp:", 0) == 0) continue;
        if (!line.empty() && line[0] != '#') {
            const auto last_comma = line.rfind(',');
            if (last_comma != std::string::npos && line.find("wall_time") == std::string::npos) {
                line.erase(last_comma);
            }
        }
        os << line << "\n";
    }
    return os.str();
}

}  // namespace

TEST_CASE("error_metric examples") {
    auto g = make_grid(16);
    GBState ref{cosine(g, 1, 0.4), sine(g, 2, 0.2)};

    const ErrorBreakdown zero = error_metric(ref, ref);
    CHECK(zero.total == 0.0);
    CHECK(zero.z_l2 == 0.0);
    CHECK(zero.zt_hm2 == 0.0);

    // z differs by cos x
    GBState num{cosine(g, 1, 1.4), sine(g, 2, 0.2)};
    const ErrorBreakdown ez = error_metric(num, ref);
    CHECK(ez.z_l2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(ez.zt_hm2 == 0.0);
    CHECK(ez.total == ez.z_l2 + ez.zt_hm2);

    // zt differs by cos x: weight <1>^{-2} = 1/2
    GBState num2{cosine(g, 1, 0.4), [&] {
                     std::vector<Complex> c = sine(g, 2, 0.2).coeffs();
                     c[g->index_of(1)] += 0.5;
                     c[g->index_of(-1)] += 0.5;
                     return Field::from_coeffs(g, std::move(c), true);
                 }()};
    const ErrorBreakdown ezt = error_metric(num2, ref);
    CHECK(ezt.z_l2 == 0.0);
    CHECK(ezt.zt_hm2 == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(ezt.total == ezt.z_l2 + ezt.zt_hm2);

    auto g2 = make_grid(32);
    GBState other{Field::zero(g2), Field::zero(g2)};
    CHECK_THROWS_AS(error_metric(ref, other), ConfigError);
}

TEST_CASE("fit_order") {
    // exact power law
    std::vector<std::pair<double, double>> pairs;
    for (int j = 0; j < 7; ++j) {
        const double tau = 1e-2 * std::pow(2.0, -j);
        pairs.emplace_back(tau, 3.0 * std::pow(tau, 0.25));
    }
    CHECK(std::fabs(fit_order(pairs) - 0.25) <= 1e-10);

    // two points halving together give order 1
    std::vector<std::pair<double, double>> two{{1e-2, 5e-3}, {5e-3, 2.5e-3}};
    CHECK(fit_order(two) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<std::pair<double, double>> bad{{1e-2, 1e-3}, {5e-3, -1.0}};
    CHECK_THROWS_AS(fit_order(bad), ConfigError);
    std::vector<std::pair<double, double>> single{{1e-2, 1e-3}};
    CHECK_THROWS_AS(fit_order(single), ConfigError);
}

TEST_CASE("fit_order under multiplicative noise") {
    // errors ~ tau^{0.1} with 5% multiplicative noise over 7 points:
    // slope stays within 0.1 +- 0.05
    Philox4x32 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<double, double>> pairs;
        for (int j = 0; j < 7; ++j) {
            const double tau = 1e-2 * std::pow(2.0, -j);
            const double noise = 1.0 + 0.05 * (2.0 * rng.next_double() - 1.0);
            pairs.emplace_back(tau, 3.0 * std::pow(tau, 0.1) * noise);
        }
        const double slope = fit_order(pairs);
        CHECK(slope > 0.05);
        CHECK(slope < 0.15);
    }
}

TEST_CASE("fit_report_orders") {
    std::vector<StudyRow> rows;
    for (int j = 0; j < 5; ++j) {
        StudyRow r;
        r.s = 0.5;
        r.tau = 1e-2 * std::pow(2.0, -j);
        r.err_total = 3.0 * std::pow(r.tau, 0.25);
        rows.push_back(r);
    }
    // one failed row is skipped
    rows[2].ok = false;
    rows[2].err_total = std::numeric_limits<double>::quiet_NaN();

    // a second s with a single row: insufficient
    StudyRow lone;
    lone.s = 0.2;
    lone.tau = 1e-2;
    lone.err_total = 0.1;
    rows.push_back(lone);

    const auto fitted = fit_report_orders(rows);
    REQUIRE(fitted.size() == 2);
    CHECK(fitted[0].s == 0.2);
    CHECK_FALSE(fitted[0].order.has_value());
    CHECK(fitted[0].note == "insufficient points");
    CHECK(fitted[1].s == 0.5);
    REQUIRE(fitted[1].order.has_value());
    CHECK(std::fabs(*fitted[1].order - 0.25) <= 1e-10);
}

TEST_CASE("study config parsing") {
    const std::string text = R"(
# comment
s_list = 0.2, 0.5
tau_list = 0.01, 0.005, 0.0025
T = 0.5
M = 64
seed = 42
reference = rk4
rk4_tau_ref = 0.0001
psi = zero
out = out/study.csv
)";
    StudySpec spec = parse_study_config_text(text);
    CHECK(spec.s_list == std::vector<double>{0.2, 0.5});
    CHECK(spec.tau_list.size() == 3);
    CHECK(spec.T == 0.5);
    CHECK(spec.M == 64);
    CHECK(spec.seed == 42);
    CHECK(spec.reference == StudySpec::Reference::rk4);
    CHECK(spec.rk4_tau_ref == 1e-4);
    CHECK(spec.csv_path == "out/study.csv");
    CHECK_NOTHROW(spec.validate());

    CHECK_THROWS_AS(parse_study_config_text("bogus_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_study_config_text("reference = euler\n"), ConfigError);
    CHECK_THROWS_AS(parse_study_config_text("s_list 0.5\n"), ConfigError);
}

TEST_CASE("study spec validation") {
    StudySpec spec;
    spec.s_list = {0.5};
    spec.tau_list = {1e-2, 5e-3};
    spec.T = 0.5;
    spec.M = 64;
    CHECK_NOTHROW(spec.validate());

    StudySpec inc = spec;
    inc.tau_list = {5e-3, 1e-2};
    CHECK_THROWS_AS(inc.validate(), ConfigError);

    StudySpec nodiv = spec;
    nodiv.tau_list = {3e-3};
    CHECK_THROWS_AS(nodiv.validate(), ConfigError);

    StudySpec badm = spec;
    badm.M = 48;
    CHECK_THROWS_AS(badm.validate(), ConfigError);
}

TEST_CASE("run_convergence is deterministic and worker-count independent") {
    StudySpec spec;
    spec.s_list = {0.4, 0.7};
    spec.tau_list = {4e-3, 2e-3, 1e-3};
    spec.T = 0.1;
    spec.M = 128;
    spec.seed = 5;
    spec.reference = StudySpec::Reference::flts_fine;
    spec.ref_divisor = 8.0;

    const ConvergenceReport serial = run_convergence(spec, 1);
    const ConvergenceReport parallel = run_convergence(spec, 8);
    CHECK(numeric_csv(csv_string(serial)) == numeric_csv(csv_string(parallel)));

    REQUIRE(serial.rows.size() == 6);
    // rows sorted by (s ascending, tau descending)
    CHECK(serial.rows[0].s == 0.4);
    CHECK(serial.rows[0].tau == 4e-3);
    CHECK(serial.rows[3].s == 0.7);
    // errors decrease with tau for each s
    for (std::size_t base : {std::size_t{0}, std::size_t{3}}) {
        CHECK(serial.rows[base].err_total > 0.0);
        CHECK(serial.rows[base + 2].err_total < serial.rows[base].err_total);
    }
    REQUIRE(serial.fitted.size() == 2);
    CHECK(serial.fitted[0].order.has_value());
}

TEST_CASE("csv format") {
    ConvergenceReport report;
    report.seed = 9;
    report.M = 64;
    report.T = 0.5;
    report.reference = "flts_fine";
    report.generator = kGeneratorVersion;
    report.timestamp = "2026-01-01T00:00:00Z";
    StudyRow row;
    row.s = 0.5;
    row.tau = 0.01;
    row.err_total = 0.125;
    row.err_z_l2 = 0.1;
    row.err_zt_hm2 = 0.025;
    row.wall_time = 1.5;
    report.rows.push_back(row);
    StudyRow failed = row;
    failed.tau = 0.005;
    failed.ok = false;
    failed.err_total = failed.err_z_l2 = failed.err_zt_hm2 =
        std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back(failed);
    report.fitted = fit_report_orders(report.rows);

    const std::string csv = csv_string(report);
    CHECK(csv.find("s,tau,err_total,err_z_L2,err_zt_Hm2,status,wall_time\n") != std::string::npos);
    CHECK(csv.find("0.5,0.01,0.125,0.1,0.025,ok,1.500000\n") != std::string::npos);
    CHECK(csv.find("blowup") != std::string::npos);
    CHECK(csv.find("# seed: 9") != std::string::npos);
    CHECK(csv.find("# fitted_order s=0.5: none (insufficient points)") != std::string::npos);
    CHECK(csv.find("\r") == std::string::npos);
}

TEST_CASE("plot script emission") {
    ConvergenceReport report;
    report.reference = "flts_fine";
    const std::string script = plot_script_string(report, "results/study.csv");
    CHECK(script.find("study.csv") != std::string::npos);
    CHECK(script.find("matplotlib") != std::string::npos);
    CHECK(script.find("s / 2") != std::string::npos);
    CHECK(plot_path_for_csv("results/study.csv") == "results/study_plot.py");
}

TEST_CASE("worker count from env") {
    CHECK(worker_count_from_env() >= 1);
}
