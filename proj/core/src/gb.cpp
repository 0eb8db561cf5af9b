#include "flts/gb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flts/errors.hpp"

namespace flts {

namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

double bracket(double k) { return std::sqrt(1.0 + k * k * k * k); }

// c(k) + conj(c(-k)), i.e. the coefficients of f + conj f. Hermitian by
// construction, including the self-mirrored Nyquist mode.
void conj_sum_coeffs(const SpectralGrid& g, std::span<const Complex> c, std::span<Complex> out) {
    const int m = g.size();
    for (int i = 0; i < m; ++i) {
        const int k = g.wavenumber(i);
        const int mirror = (k == -m / 2) ? i : g.index_of(-k);
        out[i] = c[i] + std::conj(c[mirror]);
    }
}

bool finite_l2(std::span<const Complex> c) {
    double acc = 0.0;
    for (const Complex& z : c) acc += std::norm(z);
    return std::isfinite(acc);
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("solver config: tau must be > 0");
    if (!(T >= 0.0)) throw ConfigError("solver config: T must be >= 0");
    if (!is_power_of_two(M) || M < 4) {
        throw ConfigError("solver config: M must be a power of two >= 4, got " + std::to_string(M));
    }
    integer_quotient(T, tau);
}

std::int64_t SolverConfig::steps() const { return integer_quotient(T, tau); }

std::int64_t integer_quotient(double T, double tau) {
    const double q = T / tau;
    const double n = std::nearbyint(q);
    const double half_ulp = 0.5 * (std::nextafter(q, std::numeric_limits<double>::infinity()) - q);
    if (!(std::fabs(q - n) <= half_ulp) || n < 0.0) {
        throw ConfigError("T/tau = " + std::to_string(q) + " is not an integer");
    }
    return static_cast<std::int64_t>(n);
}

Field to_u(const GBState& state, double tau, bool filtered) {
    if (state.z.grid_ptr() != state.zt.grid_ptr()) {
        throw ConfigError("to_u: z and z_t live on different grids");
    }
    const auto& g = state.grid();
    const auto& zc = state.z.coeffs();
    const auto& ztc = state.zt.coeffs();
    std::vector<Complex> u(g.size());
    for (int i = 0; i < g.size(); ++i) {
        const int k = g.wavenumber(i);
        if (filtered && !mode_kept(k, tau)) continue;
        u[i] = zc[i] - Complex(0.0, 1.0) * ztc[i] / bracket(k);
    }
    u[0] += 0.5;
    return Field::from_coeffs(state.grid_ptr(), std::move(u));
}

GBState from_u(const Field& u) {
    const auto& g = u.grid();
    const int m = g.size();
    const auto& c = u.coeffs();

    std::vector<Complex> zc(m), ztc(m);
    for (int i = 0; i < m; ++i) {
        const int k = g.wavenumber(i);
        const int mirror = (k == -m / 2) ? i : g.index_of(-k);
        const Complex sum = c[i] + std::conj(c[mirror]);
        const Complex diff = c[i] - std::conj(c[mirror]);
        zc[i] = 0.5 * sum;
        ztc[i] = Complex(0.0, 0.5) * bracket(k) * diff;
    }
    zc[0] -= 0.5;

    Field z = Field::from_coeffs(u.grid_ptr(), std::move(zc), true);
    Field zt = Field::from_coeffs(u.grid_ptr(), std::move(ztc), true);

    double max_im = 0.0, max_abs = 0.0;
    for (const Field* f : {&z, &zt}) {
        for (const Complex& v : f->values()) {
            max_im = std::max(max_im, std::fabs(v.imag()));
            max_abs = std::max(max_abs, std::fabs(v.real()));
        }
    }
    if (max_im > 1e-8 * (max_abs + 1.0)) {
        throw StateError("from_u: imaginary residue " + std::to_string(max_im) +
                         " exceeds 1e-8 relative; state is corrupted");
    }
    return GBState{std::move(z), std::move(zt)};
}

Field linear_flow(const Field& u, double t) {
    const auto& g = u.grid();
    const auto& c = u.coeffs();
    std::vector<Complex> out(c.size());
    for (int i = 0; i < g.size(); ++i) {
        const double k = g.wavenumber(i);
        out[i] = std::polar(1.0, t * bracket(k)) * c[i];
    }
    return Field::from_coeffs(u.grid_ptr(), std::move(out));
}

namespace detail {

StepWorkspace::StepWorkspace(GridPtr grid)
    : p(grid->size()),
      h(grid->size()),
      qhat(grid->size()),
      base_(std::move(grid)),
      fine_(make_grid(2 * base_->size())),
      fine_a_(2 * base_->size()),
      fine_b_(2 * base_->size()),
      fine_index_(base_->size()),
      inv_bracket_(base_->size()),
      keep_(base_->size(), 1),
      phase_(base_->size()) {
    for (int i = 0; i < base_->size(); ++i) {
        fine_index_[i] = fine_->index_of(base_->wavenumber(i));
        inv_bracket_[i] = 1.0 / bracket(base_->wavenumber(i));
    }
}

void StepWorkspace::prepare(double tau, bool filtered) {
    if (tau == cached_tau_ && filtered == cached_filtered_) return;
    const int m = base_->size();
    for (int i = 0; i < m; ++i) {
        const int k = base_->wavenumber(i);
        keep_[i] = (!filtered || mode_kept(k, tau)) ? 1 : 0;
        phase_[i] = std::polar(1.0, tau * bracket(k));
    }
    cached_tau_ = tau;
    cached_filtered_ = filtered;
}

void StepWorkspace::padded_square(std::span<const Complex> h_in, std::span<Complex> qhat_out) {
    const int m = base_->size();
    const int fine_m = 2 * m;

    // Embed on the 2M grid with the node-offset phase folded in. The sign at
    // fine index f is (-1)^f.
    std::fill(fine_a_.begin(), fine_a_.end(), Complex{});
    for (int i = 0; i < m; ++i) {
        const int f = fine_index_[i];
        fine_a_[f] = (f % 2 == 0) ? h_in[i] : -h_in[i];
    }
    fine_->raw_backward(fine_a_, fine_b_);

    // h is Hermitian, so the nodal imaginary parts are pure roundoff; square
    // the real parts.
    for (int j = 0; j < fine_m; ++j) {
        const double r = fine_b_[j].real();
        fine_b_[j] = Complex(r * r, 0.0);
    }
    fine_->raw_forward(fine_b_, fine_a_);

    const double scale = 1.0 / fine_m;
    for (int i = 0; i < m; ++i) {
        const int f = fine_index_[i];
        qhat_out[i] = ((f % 2 == 0) ? scale : -scale) * fine_a_[f];
    }
    // The base-grid Nyquist mode has no conjugate partner; zeroing it keeps
    // nonlinear products real-valued.
    qhat_out[base_->index_of(-m / 2)] = Complex{};
}

namespace {

// Fills ws.p with (w + conj w) and, when the quadratic term is on, ws.qhat
// with the coefficients of (Pi w + Pi conj w)^2.
void compute_sources(std::span<const Complex> w, bool nonlinearity, StepWorkspace& ws) {
    const auto& g = ws.base();
    const int m = g.size();
    conj_sum_coeffs(g, w, ws.p);
    if (!nonlinearity) return;
    const auto keep = ws.keep();
    for (int i = 0; i < m; ++i) {
        ws.h[i] = keep[i] ? ws.p[i] : Complex{};
    }
    ws.padded_square(ws.h, ws.qhat);
}

}  // namespace

void nonlinear_flow_coeffs(std::span<Complex> w, double t, double tau, bool filtered,
                           bool nonlinearity, StepWorkspace& ws) {
    ws.prepare(tau, filtered);
    compute_sources(w, nonlinearity, ws);
    const auto& g = ws.base();
    const auto keep = ws.keep();
    const auto inv_br = ws.inv_bracket();
    const int m = g.size();
    for (int i = 0; i < m; ++i) {
        if (!keep[i]) continue;
        const double k = g.wavenumber(i);
        Complex source = ws.p[i];
        if (nonlinearity) source += 0.5 * (-(k * k)) * ws.qhat[i];
        w[i] -= Complex(0.0, 0.5 * t) * source * inv_br[i];
    }
}

void flts_step_coeffs(std::span<Complex> u, double tau, bool filtered, bool nonlinearity,
                      StepWorkspace& ws) {
    ws.prepare(tau, filtered);
    compute_sources(u, nonlinearity, ws);
    const auto& g = ws.base();
    const auto keep = ws.keep();
    const auto inv_br = ws.inv_bracket();
    const auto phase = ws.step_phase();
    const int m = g.size();
    for (int i = 0; i < m; ++i) {
        if (!keep[i]) {
            u[i] = Complex{};
            continue;
        }
        const double k = g.wavenumber(i);
        Complex acc = u[i] - Complex(0.0, 0.5 * tau) * ws.p[i] * inv_br[i];
        if (nonlinearity) acc -= Complex(0.0, 0.25 * tau) * (-(k * k)) * ws.qhat[i] * inv_br[i];
        u[i] = phase[i] * acc;
    }
}

}  // namespace detail

Field nonlinear_flow(const Field& w0, double t, double tau, bool filtered, bool nonlinearity) {
    if (!(tau > 0.0)) throw ConfigError("nonlinear_flow: tau must be > 0");
    detail::StepWorkspace ws(w0.grid_ptr());
    std::vector<Complex> w = w0.coeffs();
    detail::nonlinear_flow_coeffs(w, t, tau, filtered, nonlinearity, ws);
    return Field::from_coeffs(w0.grid_ptr(), std::move(w));
}

Field flts_step(const Field& u, const SolverConfig& cfg) {
    cfg.validate();
    if (u.size() != cfg.M) throw ConfigError("flts_step: field grid does not match config M");
    detail::StepWorkspace ws(u.grid_ptr());
    std::vector<Complex> c = u.coeffs();
    detail::flts_step_coeffs(c, cfg.tau, cfg.filter_enabled, cfg.nonlinearity_enabled, ws);
    return Field::from_coeffs(u.grid_ptr(), std::move(c));
}

GBState evolve(const GBState& state0, const SolverConfig& cfg) {
    return evolve(state0, cfg, 0, SampleCallback{});
}

GBState evolve(const GBState& state0, const SolverConfig& cfg, std::int64_t sample_stride,
               const SampleCallback& on_sample) {
    cfg.validate();
    if (state0.grid().size() != cfg.M) {
        throw ConfigError("evolve: initial state grid does not match config M");
    }
    const std::int64_t n_steps = cfg.steps();
    const GridPtr grid = state0.grid_ptr();

    Field u0 = to_u(state0, cfg.tau, cfg.filter_enabled);
    std::vector<Complex> u = u0.coeffs();
    detail::StepWorkspace ws(grid);

    auto emit = [&](std::int64_t step) {
        if (!on_sample) return;
        on_sample(step, step * cfg.tau, from_u(Field::from_coeffs(grid, u)));
    };

    emit(0);
    for (std::int64_t n = 0; n < n_steps; ++n) {
        detail::flts_step_coeffs(u, cfg.tau, cfg.filter_enabled, cfg.nonlinearity_enabled, ws);
        if (!finite_l2(u)) throw BlowupError(n + 1, (n + 1) * cfg.tau);
        if (on_sample && n + 1 < n_steps && sample_stride > 0 && (n + 1) % sample_stride == 0) {
            emit(n + 1);
        }
    }
    if (n_steps > 0) emit(n_steps);
    return from_u(Field::from_coeffs(grid, std::move(u)));
}

}  // namespace flts
