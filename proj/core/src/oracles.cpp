#include "flts/oracles.hpp"

#include <cmath>
#include <vector>

#include "flts/errors.hpp"

namespace flts {

void OracleConfig::validate() const {
    if (!(tau_ref > 0.0)) throw ConfigError("oracle config: tau_ref must be > 0");
    if (M < 4 || M % 2 != 0) throw ConfigError("oracle config: M must be even and >= 4");
    if (filter_tau < 0.0) throw ConfigError("oracle config: filter_tau must be >= 0");
}

namespace {

double bracket(double k) { return std::sqrt(1.0 + k * k * k * k); }

// Right-hand side of the first-order system in u, evaluated on coefficients.
class RhsEvaluator {
public:
    RhsEvaluator(GridPtr grid, const OracleConfig& cfg)
        : ws_(grid), grid_(std::move(grid)), cfg_(cfg) {}

    void operator()(std::span<const Complex> u, std::span<Complex> out) {
        const auto& g = *grid_;
        const int m = g.size();
        const bool filtered = cfg_.filter_tau > 0.0;

        p_.resize(m);
        for (int i = 0; i < m; ++i) {
            const int k = g.wavenumber(i);
            const int mirror = (k == -m / 2) ? i : g.index_of(-k);
            p_[i] = u[i] + std::conj(u[mirror]);
        }

        if (cfg_.nonlinearity_enabled) {
            h_.resize(m);
            for (int i = 0; i < m; ++i) {
                h_[i] = (!filtered || mode_kept(g.wavenumber(i), cfg_.filter_tau)) ? p_[i]
                                                                                   : Complex{};
            }
            qhat_.resize(m);
            ws_.padded_square(h_, qhat_);
        }

        for (int i = 0; i < m; ++i) {
            const double k = g.wavenumber(i);
            const double br = bracket(k);
            out[i] = Complex(0.0, 1.0) * br * u[i];
            if (filtered && !mode_kept(g.wavenumber(i), cfg_.filter_tau)) continue;
            Complex source = 2.0 * p_[i];
            if (cfg_.nonlinearity_enabled) source += (-(k * k)) * qhat_[i];
            out[i] -= Complex(0.0, 0.25) * source / br;
        }
    }

private:
    detail::StepWorkspace ws_;
    GridPtr grid_;
    OracleConfig cfg_;
    std::vector<Complex> p_, h_, qhat_;
};

bool finite_l2(std::span<const Complex> c) {
    double acc = 0.0;
    for (const Complex& z : c) acc += std::norm(z);
    return std::isfinite(acc);
}

}  // namespace

GBState rk4_reference(const GBState& state0, const OracleConfig& cfg, double T) {
    cfg.validate();
    if (state0.grid().size() != cfg.M) {
        throw ConfigError("rk4_reference: state grid does not match config M");
    }
    const std::int64_t n_steps = integer_quotient(T, cfg.tau_ref);
    const GridPtr grid = state0.grid_ptr();
    const int m = grid->size();
    const double h = cfg.tau_ref;

    std::vector<Complex> u = to_u(state0, cfg.filter_tau > 0.0 ? cfg.filter_tau : 1.0,
                                  cfg.filter_tau > 0.0)
                                 .coeffs();
    RhsEvaluator rhs(grid, cfg);

    std::vector<Complex> k1(m), k2(m), k3(m), k4(m), stage(m);
    for (std::int64_t n = 0; n < n_steps; ++n) {
        rhs(u, k1);
        for (int i = 0; i < m; ++i) stage[i] = u[i] + 0.5 * h * k1[i];
        rhs(stage, k2);
        for (int i = 0; i < m; ++i) stage[i] = u[i] + 0.5 * h * k2[i];
        rhs(stage, k3);
        for (int i = 0; i < m; ++i) stage[i] = u[i] + h * k3[i];
        rhs(stage, k4);
        for (int i = 0; i < m; ++i) {
            u[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!finite_l2(u)) throw BlowupError(n + 1, (n + 1) * h);
    }
    return from_u(Field::from_coeffs(grid, std::move(u)));
}

GBState linear_exact(const GBState& state0, double T) {
    const auto& g = state0.grid();
    const int m = g.size();
    const auto& zc = state0.z.coeffs();
    const auto& ztc = state0.zt.coeffs();

    std::vector<Complex> z_out(m), zt_out(m);
    for (int i = 0; i < m; ++i) {
        const double k = g.wavenumber(i);
        const Complex w0 = (i == 0) ? zc[0] + 0.5 : zc[i];
        const Complex wt0 = ztc[i];
        if (i == 0) {
            z_out[0] = w0 + T * wt0 - 0.5;
            zt_out[0] = wt0;
        } else {
            const double k2 = k * k;
            const double c = std::cos(k2 * T);
            const double s = std::sin(k2 * T);
            z_out[i] = c * w0 + (s / k2) * wt0;
            zt_out[i] = -k2 * s * w0 + c * wt0;
        }
    }
    return GBState{Field::from_coeffs(state0.grid_ptr(), std::move(z_out), true),
                   Field::from_coeffs(state0.grid_ptr(), std::move(zt_out), true)};
}

}  // namespace flts
