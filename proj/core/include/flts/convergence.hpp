#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flts/gb.hpp"
#include "flts/oracles.hpp"
#include "flts/roughdata.hpp"

namespace flts {

// One convergence experiment: for each regularity s, generate data once,
// compute a reference solution at time T, then measure the final-time error
// of the splitting scheme for every tau in tau_list.
struct StudySpec {
    enum class Reference { flts_fine, rk4 };

    std::vector<double> s_list;
    std::vector<double> tau_list;  // strictly decreasing; each divides T
    double T = 0.5;
    int M = 1 << 12;
    std::uint64_t seed = 0;
    Reference reference = Reference::flts_fine;
    double ref_divisor = 128.0;    // flts_fine reference step: min(tau)/ref_divisor
    double rk4_tau_ref = 1e-4;     // rk4 reference step
    RoughDataSpec::PsiMode psi_mode = RoughDataSpec::PsiMode::zero;
    std::string csv_path = "study.csv";

    void validate() const;  // throws ConfigError
};

struct ErrorBreakdown {
    double total;    // z_l2 + zt_hm2
    double z_l2;     // ||z_num - z_ref||_{L^2}
    double zt_hm2;   // ||zt_num - zt_ref||_{H^{-2}}
};

// Throws ConfigError when the two states live on different grids.
ErrorBreakdown error_metric(const GBState& numerical, const GBState& reference);

// Least-squares slope of log(err) against log(tau). Requires >= 2 pairs, all
// entries positive; throws ConfigError otherwise.
double fit_order(std::span<const std::pair<double, double>> tau_err);

struct StudyRow {
    double s = 0.0;
    double tau = 0.0;
    double err_total = 0.0;
    double err_z_l2 = 0.0;
    double err_zt_hm2 = 0.0;
    bool ok = true;          // false: run aborted (blow-up)
    double wall_time = 0.0;  // seconds
};

struct FittedOrder {
    double s = 0.0;
    std::optional<double> order;  // absent: fewer than 3 valid rows
    std::string note;
};

struct ConvergenceReport {
    std::vector<StudyRow> rows;        // sorted by (s ascending, tau descending)
    std::vector<FittedOrder> fitted;   // one entry per s
    std::uint64_t seed = 0;
    int M = 0;
    double T = 0.0;
    std::string reference;
    std::string generator;
    std::string timestamp;
};

// Fits one order per s from the rows, skipping failed ones; requires at least
// 3 valid rows per s.
std::vector<FittedOrder> fit_report_orders(const std::vector<StudyRow>& rows);

// Runs the study. Independent (s, tau) runs fan out over `workers` threads
// (0: FLTS_WORKERS env var, else hardware concurrency). Results are
// independent of the worker count.
ConvergenceReport run_convergence(const StudySpec& spec, int workers = 0);

// Frozen CSV schema: '#'-prefixed metadata, one header row
// s,tau,err_total,err_z_L2,err_zt_Hm2,status,wall_time, LF line endings,
// shortest round-trip decimal formatting. Fitted orders are appended as
// trailing comment lines.
std::string csv_string(const ConvergenceReport& report);
void write_csv(const ConvergenceReport& report, const std::string& path);

// Companion log-log plot script (matplotlib) with s/2 reference slopes,
// written next to the CSV.
std::string plot_script_string(const ConvergenceReport& report, const std::string& csv_path);
void write_plot_script(const ConvergenceReport& report, const std::string& csv_path,
                       const std::string& script_path);
std::string plot_path_for_csv(const std::string& csv_path);

// key=value study config parsing (lines of `key = value`, '#' comments).
StudySpec parse_study_config_text(const std::string& text);
StudySpec parse_study_config(const std::string& path);

int worker_count_from_env();

}  // namespace flts
