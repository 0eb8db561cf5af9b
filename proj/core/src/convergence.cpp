#include "flts/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "flts/errors.hpp"

namespace flts {

namespace {

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double parse_double(const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number: '" + text + "'");
    }
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(parse_double(item));
    }
    return out;
}

}  // namespace

void StudySpec::validate() const {
    if (s_list.empty()) throw ConfigError("study: s_list must not be empty");
    for (double s : s_list) {
        if (!(s > 0.0)) throw ConfigError("study: every s must be > 0");
    }
    if (tau_list.empty()) throw ConfigError("study: tau_list must not be empty");
    for (std::size_t i = 0; i < tau_list.size(); ++i) {
        if (!(tau_list[i] > 0.0)) throw ConfigError("study: every tau must be > 0");
        if (i > 0 && !(tau_list[i] < tau_list[i - 1])) {
            throw ConfigError("study: tau_list must be strictly decreasing");
        }
        integer_quotient(T, tau_list[i]);
    }
    if (!(T > 0.0)) throw ConfigError("study: T must be > 0");
    if (M < 4 || (M & (M - 1)) != 0) throw ConfigError("study: M must be a power of two >= 4");
    if (reference == Reference::flts_fine) {
        if (!(ref_divisor >= 2.0)) throw ConfigError("study: ref_divisor must be >= 2");
        integer_quotient(T, tau_list.back() / ref_divisor);
    } else {
        if (!(rk4_tau_ref > 0.0) || rk4_tau_ref > tau_list.back()) {
            throw ConfigError("study: rk4_tau_ref must be positive and <= min(tau_list)");
        }
        integer_quotient(T, rk4_tau_ref);
    }
    if (csv_path.empty()) throw ConfigError("study: csv_path must not be empty");
}

ErrorBreakdown error_metric(const GBState& numerical, const GBState& reference) {
    if (numerical.grid_ptr() != reference.grid_ptr() &&
        numerical.grid().size() != reference.grid().size()) {
        throw ConfigError("error_metric: states live on different grids");
    }
    const auto& g = numerical.grid();
    const int m = g.size();
    const auto& zn = numerical.z.coeffs();
    const auto& zr = reference.z.coeffs();
    const auto& ztn = numerical.zt.coeffs();
    const auto& ztr = reference.zt.coeffs();

    double acc_z = 0.0, acc_zt = 0.0;
    for (int i = 0; i < m; ++i) {
        const double k = g.wavenumber(i);
        const double w = 1.0 + k * k;
        acc_z += std::norm(zn[i] - zr[i]);
        acc_zt += std::norm(ztn[i] - ztr[i]) / (w * w);
    }
    const double z_l2 = std::sqrt(acc_z);
    const double zt_hm2 = std::sqrt(acc_zt);
    return ErrorBreakdown{z_l2 + zt_hm2, z_l2, zt_hm2};
}

double fit_order(std::span<const std::pair<double, double>> tau_err) {
    if (tau_err.size() < 2) throw ConfigError("fit_order: need at least 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [tau, err] : tau_err) {
        if (!(tau > 0.0) || !(err > 0.0)) {
            throw ConfigError("fit_order: tau and err must be positive");
        }
        sx += std::log(tau);
        sy += std::log(err);
    }
    const double n = static_cast<double>(tau_err.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [tau, err] : tau_err) {
        const double dx = std::log(tau) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(err) - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("fit_order: tau values are all equal");
    return sxy / sxx;
}

std::vector<FittedOrder> fit_report_orders(const std::vector<StudyRow>& rows) {
    std::vector<double> s_values;
    for (const auto& row : rows) {
        if (std::find(s_values.begin(), s_values.end(), row.s) == s_values.end()) {
            s_values.push_back(row.s);
        }
    }
    std::sort(s_values.begin(), s_values.end());

    std::vector<FittedOrder> fitted;
    for (double s : s_values) {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& row : rows) {
            if (row.s == s && row.ok && std::isfinite(row.err_total) && row.err_total > 0.0) {
                pairs.emplace_back(row.tau, row.err_total);
            }
        }
        FittedOrder f;
        f.s = s;
        if (pairs.size() >= 3) {
            f.order = fit_order(pairs);
        } else {
            f.note = "insufficient points";
        }
        fitted.push_back(std::move(f));
    }
    return fitted;
}

int worker_count_from_env() {
    if (const char* env = std::getenv("FLTS_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

struct Task {
    std::size_t row_index;
    double s;
    double tau;
};

GBState compute_reference(const StudySpec& spec, const GBState& initial) {
    if (spec.reference == StudySpec::Reference::flts_fine) {
        SolverConfig cfg;
        cfg.tau = spec.tau_list.back() / spec.ref_divisor;
        cfg.T = spec.T;
        cfg.M = spec.M;
        cfg.seed = spec.seed;
        return evolve(initial, cfg);
    }
    OracleConfig cfg;
    cfg.method = OracleConfig::Method::rk4;
    cfg.tau_ref = spec.rk4_tau_ref;
    cfg.M = spec.M;
    cfg.nonlinearity_enabled = true;
    // The reference integrates the projected system of the smallest tau in
    // the study, so projection error is attributed to the scheme under test.
    cfg.filter_tau = spec.tau_list.back();
    return rk4_reference(initial, cfg, spec.T);
}

void run_tasks(int workers, std::size_t count, const std::function<void(std::size_t)>& body) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<std::size_t>(workers, count);
    std::vector<std::exception_ptr> errors(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    body(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
                next.store(count);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

ConvergenceReport run_convergence(const StudySpec& spec, int workers) {
    spec.validate();
    if (workers <= 0) workers = worker_count_from_env();

    ConvergenceReport report;
    report.seed = spec.seed;
    report.M = spec.M;
    report.T = spec.T;
    report.reference = spec.reference == StudySpec::Reference::flts_fine ? "flts_fine" : "rk4";
    report.generator = kGeneratorVersion;
    report.timestamp = utc_timestamp();

    std::vector<double> s_sorted = spec.s_list;
    std::sort(s_sorted.begin(), s_sorted.end());

    // Phase 1: per-s initial data and reference solutions (the heavy runs).
    std::vector<GBState> initial(s_sorted.size());
    std::vector<GBState> reference(s_sorted.size());
    run_tasks(workers, s_sorted.size(), [&](std::size_t i) {
        RoughDataSpec data;
        data.s = s_sorted[i];
        data.M = spec.M;
        data.seed = spec.seed;
        data.psi_mode = spec.psi_mode;
        initial[i] = generate(data);
        reference[i] = compute_reference(spec, initial[i]);
    });

    // Phase 2: one task per (s, tau).
    std::vector<Task> tasks;
    report.rows.resize(s_sorted.size() * spec.tau_list.size());
    for (std::size_t i = 0; i < s_sorted.size(); ++i) {
        for (std::size_t j = 0; j < spec.tau_list.size(); ++j) {
            tasks.push_back(Task{i * spec.tau_list.size() + j, s_sorted[i], spec.tau_list[j]});
        }
    }
    run_tasks(workers, tasks.size(), [&](std::size_t t) {
        const Task& task = tasks[t];
        const std::size_t s_index = task.row_index / spec.tau_list.size();
        StudyRow row;
        row.s = task.s;
        row.tau = task.tau;
        const auto start = std::chrono::steady_clock::now();
        try {
            SolverConfig cfg;
            cfg.tau = task.tau;
            cfg.T = spec.T;
            cfg.M = spec.M;
            cfg.seed = spec.seed;
            const GBState final_state = evolve(initial[s_index], cfg);
            const ErrorBreakdown err = error_metric(final_state, reference[s_index]);
            row.err_total = err.total;
            row.err_z_l2 = err.z_l2;
            row.err_zt_hm2 = err.zt_hm2;
        } catch (const BlowupError&) {
            row.ok = false;
            row.err_total = row.err_z_l2 = row.err_zt_hm2 =
                std::numeric_limits<double>::quiet_NaN();
        }
        row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.rows[task.row_index] = row;
    });

    report.fitted = fit_report_orders(report.rows);
    return report;
}

std::string csv_string(const ConvergenceReport& report) {
    std::ostringstream os;
    os << "# flts convergence report\n";
    os << "# version: 1\n";
    os << "# seed: " << report.seed << "\n";
    os << "# M: " << report.M << "\n";
    os << "# T: " << shortest(report.T) << "\n";
    os << "# reference: " << report.reference << "\n";
    os << "# generator: " << report.generator << "\n";
    os << "# timestamp: " << report.timestamp << "\n";
    os << "s,tau,err_total,err_z_L2,err_zt_Hm2,status,wall_time\n";
    for (const auto& row : report.rows) {
        os << shortest(row.s) << "," << shortest(row.tau) << "," << shortest(row.err_total)
           << "," << shortest(row.err_z_l2) << "," << shortest(row.err_zt_hm2) << ","
           << (row.ok ? "ok" : "blowup") << "," << fixed6(row.wall_time) << "\n";
    }
    for (const auto& f : report.fitted) {
        os << "# fitted_order s=" << shortest(f.s) << ": ";
        if (f.order) {
            os << shortest(*f.order);
        } else {
            os << "none (" << f.note << ")";
        }
        os << "\n";
    }
    return os.str();
}

void write_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << csv_string(report);
    if (!os) throw IoError("write failed: " + path);
}

std::string plot_path_for_csv(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    const std::string stem = dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
    return stem + "_plot.py";
}

std::string plot_script_string(const ConvergenceReport& report, const std::string& csv_path) {
    std::string csv_name = csv_path;
    const auto slash = csv_name.find_last_of('/');
    if (slash != std::string::npos) csv_name = csv_name.substr(slash + 1);

    std::ostringstream os;
    os << "#!/usr/bin/env python3\n";
    os << "\"\"\"Log-log error vs tau for " << csv_name << " with s/2 reference slopes.\"\"\"\n";
    os << "import csv\n";
    os << "import os\n";
    os << "\n";
    os << "import matplotlib\n";
    os << "matplotlib.use(\"Agg\")\n";
    os << "import matplotlib.pyplot as plt\n";
    os << "\n";
    os << "here = os.path.dirname(os.path.abspath(__file__))\n";
    os << "rows = []\n";
    os << "with open(os.path.join(here, \"" << csv_name << "\")) as fh:\n";
    os << "    for row in csv.DictReader(r for r in fh if not r.startswith(\"#\")):\n";
    os << "        if row[\"status\"] == \"ok\":\n";
    os << "            rows.append((float(row[\"s\"]), float(row[\"tau\"]), float(row[\"err_total\"])))\n";
    os << "\n";
    os << "fig, ax = plt.subplots(figsize=(6, 4.5))\n";
    os << "for s in sorted({r[0] for r in rows}):\n";
    os << "    taus = [r[1] for r in rows if r[0] == s]\n";
    os << "    errs = [r[2] for r in rows if r[0] == s]\n";
    os << "    (line,) = ax.loglog(taus, errs, \"o-\", label=f\"s = {s:g}\")\n";
    os << "    anchor = errs[0] / taus[0] ** (s / 2)\n";
    os << "    ax.loglog(taus, [anchor * t ** (s / 2) for t in taus], \"--\",\n";
    os << "              color=line.get_color(), alpha=0.5, label=f\"slope {s / 2:g}\")\n";
    os << "ax.set_xlabel(r\"$\\tau$\")\n";
    os << "ax.set_ylabel(\"error at final time\")\n";
    os << "ax.legend(fontsize=8)\n";
    os << "ax.grid(True, which=\"both\", alpha=0.3)\n";
    os << "fig.tight_layout()\n";
    os << "out = os.path.join(here, \"" << csv_name << "\").rsplit(\".\", 1)[0] + \".png\"\n";
    os << "fig.savefig(out, dpi=150)\n";
    os << "print(out)\n";
    return os.str();
}

void write_plot_script(const ConvergenceReport& report, const std::string& csv_path,
                       const std::string& script_path) {
    std::ofstream os(script_path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + script_path);
    os << plot_script_string(report, csv_path);
    if (!os) throw IoError("write failed: " + script_path);
}

StudySpec parse_study_config_text(const std::string& text) {
    StudySpec spec;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
        };
        trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("study config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        trim(key);
        trim(value);

        if (key == "s_list") {
            spec.s_list = parse_double_list(value);
        } else if (key == "tau_list") {
            spec.tau_list = parse_double_list(value);
        } else if (key == "T") {
            spec.T = parse_double(value);
        } else if (key == "M") {
            spec.M = static_cast<int>(parse_double(value));
        } else if (key == "seed") {
            spec.seed = std::stoull(value);
        } else if (key == "reference") {
            if (value == "flts_fine") {
                spec.reference = StudySpec::Reference::flts_fine;
            } else if (value == "rk4") {
                spec.reference = StudySpec::Reference::rk4;
            } else {
                throw ConfigError("study config: unknown reference '" + value + "'");
            }
        } else if (key == "ref_divisor") {
            spec.ref_divisor = parse_double(value);
        } else if (key == "rk4_tau_ref") {
            spec.rk4_tau_ref = parse_double(value);
        } else if (key == "psi") {
            if (value == "zero") {
                spec.psi_mode = RoughDataSpec::PsiMode::zero;
            } else if (value == "rough") {
                spec.psi_mode = RoughDataSpec::PsiMode::rough;
            } else {
                throw ConfigError("study config: unknown psi mode '" + value + "'");
            }
        } else if (key == "out") {
            spec.csv_path = value;
        } else {
            throw ConfigError("study config: unknown key '" + key + "'");
        }
    }
    return spec;
}

StudySpec parse_study_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open study config: " + path);
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_study_config_text(buffer.str());
}

}  // namespace flts
