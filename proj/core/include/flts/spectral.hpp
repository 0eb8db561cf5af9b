#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace flts {

using Complex = std::complex<double>;

// Equispaced periodic grid on [-pi, pi) with M nodes and integer wavenumbers
// k in {-M/2, ..., M/2 - 1}. Coefficient arrays use transform order: index i
// holds wavenumber i for i < M/2 and i - M otherwise.
//
// Conventions:
//   f(x)  = sum_k c(k) e^{ikx}
//   c(k)  = (1/M) sum_j f(x_j) e^{-ik x_j},   x_j = -pi + j 2pi/M
//
// so a pure mode e^{ikx} has c(k) = 1 exactly. A grid is immutable after
// construction and owns its transform plans; transform execution is
// reentrant, so one grid may serve concurrent transforms on distinct buffers.
class SpectralGrid {
public:
    explicit SpectralGrid(int m);
    ~SpectralGrid();

    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;

    int size() const noexcept { return m_; }
    double spacing() const noexcept { return spacing_; }
    double node(int j) const noexcept { return -pi() + spacing_ * j; }

    int min_wavenumber() const noexcept { return -m_ / 2; }
    int max_wavenumber() const noexcept { return m_ / 2 - 1; }
    int wavenumber(int index) const noexcept { return index < m_ / 2 ? index : index - m_; }
    int index_of(int k) const noexcept { return k >= 0 ? k : k + m_; }

    // Nodal samples <-> Fourier coefficients, both length M in transform
    // order. Out-of-place; in and out must not alias.
    void values_to_coeffs(std::span<const Complex> values, std::span<Complex> coeffs) const;
    void coeffs_to_values(std::span<const Complex> coeffs, std::span<Complex> values) const;

    // Unnormalized transforms without the node-offset phase; building blocks
    // for allocation-free kernels. Out-of-place; input is left intact.
    void raw_forward(std::span<Complex> in, std::span<Complex> out) const;
    void raw_backward(std::span<Complex> in, std::span<Complex> out) const;

    static constexpr double pi() noexcept { return 3.141592653589793238462643383279502884; }

private:
    struct Plans;

    int m_;
    double spacing_;
    std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int m);

// A periodic function held as nodal samples and/or Fourier coefficients on a
// shared grid. Whichever representation was supplied is authoritative; the
// other is filled in on first access. Plain value data: copyable, not meant
// for concurrent mutation.
class Field {
public:
    Field() = default;

    static Field from_values(GridPtr grid, std::vector<Complex> values, bool real_valued = false);
    static Field from_coeffs(GridPtr grid, std::vector<Complex> coeffs, bool real_valued = false);
    static Field from_real_values(GridPtr grid, std::span<const double> values);
    static Field zero(GridPtr grid);
    static Field constant(GridPtr grid, Complex c);

    bool empty() const noexcept { return grid_ == nullptr; }
    const SpectralGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    int size() const { return grid_->size(); }

    bool has_values() const noexcept { return has_values_; }
    bool has_coeffs() const noexcept { return has_coeffs_; }

    // True for fields constructed from real data or produced by operations
    // that preserve real-valuedness (Hermitian coefficient symmetry).
    bool real_valued() const noexcept { return real_valued_; }

    const std::vector<Complex>& values() const&;
    const std::vector<Complex>& coeffs() const&;

    // rvalue access moves the storage out, so expressions like
    // to_coeffs(f).coeffs() never dangle
    std::vector<Complex> values() &&;
    std::vector<Complex> coeffs() &&;

    Complex value(int j) const { return values()[j]; }
    Complex coeff(int k) const { return coeffs()[grid_->index_of(k)]; }

    std::vector<double> real_values() const;

private:
    GridPtr grid_;
    mutable std::vector<Complex> values_;
    mutable std::vector<Complex> coeffs_;
    mutable bool has_values_ = false;
    mutable bool has_coeffs_ = false;
    bool real_valued_ = false;
};

// Both representations present and consistent afterwards; idempotent.
Field to_coeffs(Field f);
Field to_values(Field f);

// coeff_out(k) = m(k) coeff_in(k). Shared kernel for all multiplier operators.
Field apply_multiplier(const Field& f, const std::function<Complex(int)>& m);

// <d_x^2>^power with <d_x^2> = (1 + d_x^4)^{1/2}: multiplier (1 + k^4)^{power/2}.
Field bracket_op(const Field& f, double power);

// d_x^2: multiplier -k^2.
Field second_derivative(const Field& f);

// Frequency projection Pi_tau: keeps modes with |k| <= tau^{-1/2} (inclusive).
Field project(const Field& f, double tau);

// True when Pi_tau keeps wavenumber k, decided as k^2 tau <= 1 (exact at the
// boundary, no square root involved).
bool mode_kept(int k, double tau);

// Largest K >= 0 with K^2 tau <= 1.
int filter_cutoff(double tau);

// H^s norm on coefficients: ( sum_k (1 + k^2)^s |c(k)|^2 )^{1/2}.
// s = 0 is the coefficient-l2 (L^2) norm.
double sobolev_norm(const Field& f, double s);

// max_j |f(x_j)|
double sup_norm(const Field& f);

// Complex conjugate field: values conj(v_j); coeffs conj(c(-k)), with the
// Nyquist mode -M/2 mapping to itself.
Field conjugate(const Field& f);

// max_k |c(k) - conj(c(-k))| / (max_k |c(k)| + tiny); 0 for Hermitian fields.
double hermitian_residual(const Field& f);

}  // namespace flts
