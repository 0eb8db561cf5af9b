// flts: spectral solver for the "good" Boussinesq equation with a filtered
// Lie-Trotter time stepper, rough-data generation, reference oracles, and a
// convergence-study harness.
//
// Exit codes: 0 success, 2 invalid config, 3 numerical blow-up, 4 I/O failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "flts/convergence.hpp"
#include "flts/errors.hpp"
#include "flts/gb.hpp"
#include "flts/oracles.hpp"
#include "flts/roughdata.hpp"
#include "flts/state_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBlowup = 3;
constexpr int kExitIo = 4;

std::string shortest(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int run_gen(double s, int M, std::uint64_t seed, const std::string& psi, const std::string& out) {
    flts::RoughDataSpec spec;
    spec.s = s;
    spec.M = M;
    spec.seed = seed;
    if (psi == "zero") {
        spec.psi_mode = flts::RoughDataSpec::PsiMode::zero;
    } else if (psi == "rough") {
        spec.psi_mode = flts::RoughDataSpec::PsiMode::rough;
    } else {
        throw flts::ConfigError("--psi must be 'zero' or 'rough'");
    }
    flts::GBState state = flts::generate(spec);

    flts::StateMeta meta;
    meta.seed = seed;
    meta.s = s;
    meta.psi_mode = psi;
    meta.generator = flts::kGeneratorVersion;
    flts::save_state(out, state, meta);
    std::printf("gen: wrote %s (M=%d, s=%s, seed=%llu)\n", out.c_str(), M, shortest(s).c_str(),
                static_cast<unsigned long long>(seed));
    return kExitOk;
}

int run_solve(const std::string& in, double tau, double T, bool no_filter, bool no_nonlinearity,
              const std::string& out) {
    flts::StateMeta meta;
    flts::GBState state = flts::load_state(in, &meta);

    flts::SolverConfig cfg;
    cfg.tau = tau;
    cfg.T = T;
    cfg.M = state.grid().size();
    cfg.filter_enabled = !no_filter;
    cfg.nonlinearity_enabled = !no_nonlinearity;
    cfg.seed = meta.seed;

    flts::GBState final_state = flts::evolve(state, cfg);

    meta.extra["tau"] = shortest(tau);
    meta.extra["T"] = shortest(T);
    meta.extra["filter"] = cfg.filter_enabled ? "on" : "off";
    meta.extra["nonlinearity"] = cfg.nonlinearity_enabled ? "on" : "off";
    flts::save_state(out, final_state, meta);
    std::printf("solve: %lld steps of tau=%s, wrote %s (seed=%llu)\n",
                static_cast<long long>(cfg.steps()), shortest(tau).c_str(), out.c_str(),
                static_cast<unsigned long long>(meta.seed));
    return kExitOk;
}

int run_oracle(const std::string& in, const std::string& method, double tau_ref, double T,
               const std::string& out, bool no_nonlinearity, double filter_tau) {
    flts::StateMeta meta;
    flts::GBState state = flts::load_state(in, &meta);

    flts::GBState result;
    if (method == "rk4") {
        flts::OracleConfig cfg;
        cfg.method = flts::OracleConfig::Method::rk4;
        cfg.tau_ref = tau_ref;
        cfg.M = state.grid().size();
        cfg.nonlinearity_enabled = !no_nonlinearity;
        cfg.filter_tau = filter_tau;
        result = flts::rk4_reference(state, cfg, T);
    } else if (method == "linear") {
        result = flts::linear_exact(state, T);
    } else {
        throw flts::ConfigError("--method must be 'rk4' or 'linear'");
    }

    meta.extra["oracle"] = method;
    meta.extra["T"] = shortest(T);
    if (method == "rk4") meta.extra["tau_ref"] = shortest(tau_ref);
    flts::save_state(out, result, meta);
    std::printf("oracle: %s reference at T=%s, wrote %s (seed=%llu)\n", method.c_str(),
                shortest(T).c_str(), out.c_str(), static_cast<unsigned long long>(meta.seed));
    return kExitOk;
}

int run_converge(const std::string& config_path) {
    flts::StudySpec spec = flts::parse_study_config(config_path);
    spec.validate();
    const int workers = flts::worker_count_from_env();
    std::printf("converge: %zu s-values x %zu steps on %d workers\n", spec.s_list.size(),
                spec.tau_list.size(), workers);

    flts::ConvergenceReport report = flts::run_convergence(spec, workers);
    flts::write_csv(report, spec.csv_path);
    const std::string plot = flts::plot_path_for_csv(spec.csv_path);
    flts::write_plot_script(report, spec.csv_path, plot);

    for (const auto& f : report.fitted) {
        if (f.order) {
            std::printf("converge: s=%s fitted order %.4f (target s/2 = %.4f)\n",
                        shortest(f.s).c_str(), *f.order, f.s / 2.0);
        } else {
            std::printf("converge: s=%s no fitted order (%s)\n", shortest(f.s).c_str(),
                        f.note.c_str());
        }
    }
    std::printf("converge: wrote %s and %s (seed=%llu)\n", spec.csv_path.c_str(), plot.c_str(),
                static_cast<unsigned long long>(report.seed));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"filtered Lie-Trotter splitting solver for the \"good\" Boussinesq equation"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate normalized H^s rough initial data");
    double gen_s = 0.5;
    int gen_m = 1 << 12;
    std::uint64_t gen_seed = 0;
    std::string gen_psi = "zero";
    std::string gen_out;
    gen->add_option("--s", gen_s, "regularity exponent")->required();
    gen->add_option("--M", gen_m, "grid size (power of two)");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--psi", gen_psi, "psi_0 mode: zero|rough");
    gen->add_option("--out", gen_out, "output state file (.txt/.dat for text)")->required();

    // solve
    auto* solve = app.add_subcommand("solve", "run the splitting scheme");
    std::string solve_in, solve_out;
    double solve_tau = 0.0, solve_T = 0.0;
    bool solve_no_filter = false, solve_no_nonlin = false;
    solve->add_option("--in", solve_in, "input state file")->required();
    solve->add_option("--tau", solve_tau, "time step")->required();
    solve->add_option("--T", solve_T, "final time")->required();
    solve->add_flag("--no-filter", solve_no_filter, "disable the frequency projection");
    solve->add_flag("--no-nonlinearity", solve_no_nonlin, "drop the quadratic term");
    solve->add_option("--out", solve_out, "output state file")->required();

    // oracle
    auto* oracle = app.add_subcommand("oracle", "compute a reference solution");
    std::string oracle_in, oracle_out, oracle_method = "rk4";
    double oracle_tau_ref = 1e-4, oracle_T = 0.0, oracle_filter_tau = 0.0;
    bool oracle_no_nonlin = false;
    oracle->add_option("--in", oracle_in, "input state file")->required();
    oracle->add_option("--method", oracle_method, "rk4|linear")->required();
    oracle->add_option("--tau-ref", oracle_tau_ref, "rk4 reference step");
    oracle->add_option("--T", oracle_T, "final time")->required();
    oracle->add_flag("--no-nonlinearity", oracle_no_nonlin, "drop the quadratic term");
    oracle->add_option("--filter-tau", oracle_filter_tau,
                       "project the system at this tau (0: unprojected)");
    oracle->add_option("--out", oracle_out, "output state file")->required();

    // converge
    auto* converge = app.add_subcommand("converge", "run a convergence study from a config file");
    std::string converge_config;
    converge->add_option("--config", converge_config, "key=value study config")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed()) return run_gen(gen_s, gen_m, gen_seed, gen_psi, gen_out);
        if (solve->parsed()) {
            return run_solve(solve_in, solve_tau, solve_T, solve_no_filter, solve_no_nonlin,
                             solve_out);
        }
        if (oracle->parsed()) {
            return run_oracle(oracle_in, oracle_method, oracle_tau_ref, oracle_T, oracle_out,
                              oracle_no_nonlin, oracle_filter_tau);
        }
        if (converge->parsed()) return run_converge(converge_config);
    } catch (const flts::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const flts::BlowupError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBlowup;
    } catch (const flts::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
