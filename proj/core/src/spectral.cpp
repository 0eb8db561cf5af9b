#include "flts/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "flts/errors.hpp"

namespace flts {

namespace {

// FFTW plan creation is not thread-safe; execution through the new-array
// interface is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralGrid::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

SpectralGrid::SpectralGrid(int m) : m_(m), spacing_(2.0 * pi() / m) {
    if (m < 4 || m % 2 != 0) {
        throw ConfigError("grid size must be even and >= 4, got " + std::to_string(m));
    }
    plans_ = std::make_unique<Plans>();
    std::vector<Complex> scratch_in(m), scratch_out(m);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    // FFTW_UNALIGNED so the new-array execute interface accepts arbitrary
    // std::vector storage.
    plans_->forward = fftw_plan_dft_1d(m, in, out, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->backward = fftw_plan_dft_1d(m, in, out, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->forward || !plans_->backward) {
        throw std::runtime_error("fftw plan creation failed for M = " + std::to_string(m));
    }
}

SpectralGrid::~SpectralGrid() = default;

void SpectralGrid::raw_forward(std::span<Complex> in, std::span<Complex> out) const {
    fftw_execute_dft(plans_->forward, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void SpectralGrid::raw_backward(std::span<Complex> in, std::span<Complex> out) const {
    fftw_execute_dft(plans_->backward, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

void SpectralGrid::values_to_coeffs(std::span<const Complex> values, std::span<Complex> coeffs) const {
    auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(values.data()));
    auto* out = reinterpret_cast<fftw_complex*>(coeffs.data());
    fftw_execute_dft(plans_->forward, in, out);
    // Nodes start at -pi rather than 0, which shifts each mode by the exact
    // phase e^{ik pi} = (-1)^k; (-1)^k == (-1)^index because M is even.
    const double scale = 1.0 / m_;
    for (int i = 0; i < m_; ++i) {
        coeffs[i] *= (i % 2 == 0) ? scale : -scale;
    }
}

void SpectralGrid::coeffs_to_values(std::span<const Complex> coeffs, std::span<Complex> values) const {
    std::vector<Complex> staged(coeffs.begin(), coeffs.end());
    for (int i = 1; i < m_; i += 2) staged[i] = -staged[i];
    auto* in = reinterpret_cast<fftw_complex*>(staged.data());
    auto* out = reinterpret_cast<fftw_complex*>(values.data());
    fftw_execute_dft(plans_->backward, in, out);
}

GridPtr make_grid(int m) { return std::make_shared<const SpectralGrid>(m); }

Field Field::from_values(GridPtr grid, std::vector<Complex> values, bool real_valued) {
    if (!grid || static_cast<int>(values.size()) != grid->size()) {
        throw ConfigError("field values length does not match grid size");
    }
    Field f;
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    f.has_values_ = true;
    f.real_valued_ = real_valued;
    return f;
}

Field Field::from_coeffs(GridPtr grid, std::vector<Complex> coeffs, bool real_valued) {
    if (!grid || static_cast<int>(coeffs.size()) != grid->size()) {
        throw ConfigError("field coeffs length does not match grid size");
    }
    Field f;
    f.grid_ = std::move(grid);
    f.coeffs_ = std::move(coeffs);
    f.has_coeffs_ = true;
    f.real_valued_ = real_valued;
    return f;
}

Field Field::from_real_values(GridPtr grid, std::span<const double> values) {
    std::vector<Complex> v(values.size());
    std::transform(values.begin(), values.end(), v.begin(), [](double x) { return Complex(x, 0.0); });
    return from_values(std::move(grid), std::move(v), true);
}

Field Field::zero(GridPtr grid) {
    const int m = grid->size();
    return from_coeffs(std::move(grid), std::vector<Complex>(m, Complex{}), true);
}

Field Field::constant(GridPtr grid, Complex c) {
    const int m = grid->size();
    std::vector<Complex> coeffs(m, Complex{});
    coeffs[0] = c;
    return from_coeffs(std::move(grid), std::move(coeffs), c.imag() == 0.0);
}

const std::vector<Complex>& Field::values() const& {
    if (!has_values_) {
        values_.resize(grid_->size());
        grid_->coeffs_to_values(coeffs_, values_);
        has_values_ = true;
    }
    return values_;
}

const std::vector<Complex>& Field::coeffs() const& {
    if (!has_coeffs_) {
        coeffs_.resize(grid_->size());
        grid_->values_to_coeffs(values_, coeffs_);
        has_coeffs_ = true;
    }
    return coeffs_;
}

std::vector<Complex> Field::values() && {
    static_cast<const Field&>(*this).values();
    has_values_ = false;
    return std::move(values_);
}

std::vector<Complex> Field::coeffs() && {
    static_cast<const Field&>(*this).coeffs();
    has_coeffs_ = false;
    return std::move(coeffs_);
}

std::vector<double> Field::real_values() const {
    const auto& v = values();
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](Complex z) { return z.real(); });
    return out;
}

Field to_coeffs(Field f) {
    f.coeffs();
    return f;
}

Field to_values(Field f) {
    f.values();
    return f;
}

Field apply_multiplier(const Field& f, const std::function<Complex(int)>& m) {
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    std::vector<Complex> out(c.size());
    for (int i = 0; i < g.size(); ++i) {
        out[i] = m(g.wavenumber(i)) * c[i];
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(out));
}

Field bracket_op(const Field& f, double power) {
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    std::vector<Complex> out(c.size());
    for (int i = 0; i < g.size(); ++i) {
        const double k = g.wavenumber(i);
        out[i] = std::pow(1.0 + k * k * k * k, 0.5 * power) * c[i];
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(out), f.real_valued());
}

Field second_derivative(const Field& f) {
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    std::vector<Complex> out(c.size());
    for (int i = 0; i < g.size(); ++i) {
        const double k = g.wavenumber(i);
        out[i] = -(k * k) * c[i];
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(out), f.real_valued());
}

bool mode_kept(int k, double tau) {
    return static_cast<double>(k) * k * tau <= 1.0;
}

int filter_cutoff(double tau) {
    if (!(tau > 0.0)) throw ConfigError("filter cutoff requires tau > 0");
    int k = static_cast<int>(std::floor(1.0 / std::sqrt(tau)));
    while (!mode_kept(k, tau)) --k;
    while (mode_kept(k + 1, tau)) ++k;
    return k;
}

Field project(const Field& f, double tau) {
    if (!(tau > 0.0)) throw ConfigError("project requires tau > 0");
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    std::vector<Complex> out(c.size());
    for (int i = 0; i < g.size(); ++i) {
        out[i] = mode_kept(g.wavenumber(i), tau) ? c[i] : Complex{};
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(out), f.real_valued());
}

double sobolev_norm(const Field& f, double s) {
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double k = g.wavenumber(i);
        acc += std::pow(1.0 + k * k, s) * std::norm(c[i]);
    }
    return std::sqrt(acc);
}

double sup_norm(const Field& f) {
    const auto& v = f.values();
    double m = 0.0;
    for (const Complex& z : v) m = std::max(m, std::abs(z));
    return m;
}

Field conjugate(const Field& f) {
    const auto& g = f.grid();
    const int m = g.size();
    if (f.has_values() && !f.has_coeffs()) {
        const auto& v = f.values();
        std::vector<Complex> out(m);
        std::transform(v.begin(), v.end(), out.begin(), [](Complex z) { return std::conj(z); });
        return Field::from_values(f.grid_ptr(), std::move(out), f.real_valued());
    }
    const auto& c = f.coeffs();
    std::vector<Complex> out(m);
    for (int i = 0; i < m; ++i) {
        const int k = g.wavenumber(i);
        const int mirror = (k == g.min_wavenumber()) ? i : g.index_of(-k);
        out[i] = std::conj(c[mirror]);
    }
    return Field::from_coeffs(f.grid_ptr(), std::move(out), f.real_valued());
}

double hermitian_residual(const Field& f) {
    const auto& c = f.coeffs();
    const auto& g = f.grid();
    double max_abs = 0.0;
    double max_dev = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const int k = g.wavenumber(i);
        const int mirror = (k == g.min_wavenumber()) ? i : g.index_of(-k);
        max_abs = std::max(max_abs, std::abs(c[i]));
        max_dev = std::max(max_dev, std::abs(c[i] - std::conj(c[mirror])));
    }
    return max_dev / (max_abs + 1e-300);
}

}  // namespace flts
