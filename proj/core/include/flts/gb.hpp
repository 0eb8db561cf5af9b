#pragma once

#include <cstdint>
#include <functional>

#include "flts/spectral.hpp"

namespace flts {

// The physical pair (z, z_t) of the "good" Boussinesq equation
//
//   z_tt + z_xxxx - z_xx - (z^2)_xx = 0
//
// as real-valued fields on a common grid.
struct GBState {
    Field z;
    Field zt;

    const SpectralGrid& grid() const { return z.grid(); }
    const GridPtr& grid_ptr() const { return z.grid_ptr(); }
};

struct SolverConfig {
    double tau = 0.0;          // time step
    double T = 0.0;            // final time; T/tau must be integral
    int M = 0;                 // grid size, power of two
    bool filter_enabled = true;
    bool nonlinearity_enabled = true;
    std::uint64_t seed = 0;    // carried into output metadata only

    void validate() const;     // throws ConfigError
    std::int64_t steps() const;
};

// N with T = N tau, accepted when |T/tau - N| <= 0.5 ulp(T/tau).
std::int64_t integer_quotient(double T, double tau);

// Complex state u = Pi z + 1/2 - i <d_x^2>^{-1} Pi z_t, with Pi = Pi_tau when
// filtered and the identity otherwise. The 1/2 enters only the k = 0 mode.
Field to_u(const GBState& state, double tau, bool filtered);

// Recovery z = (u + conj u)/2 - 1/2, z_t = (i/2) <d_x^2> (u - conj u).
// Outputs are real-valued by construction; throws StateError if the nodal
// imaginary residue exceeds 1e-8 relative (corrupted state).
GBState from_u(const Field& u);

// Exact flow of the linear subproblem: c(k) *= e^{it sqrt(1 + k^4)}.
Field linear_flow(const Field& u, double t);

// Exact flow of the nonlinear subproblem:
//
//   w0 - (it/2) <d_x^2>^{-1} Pi[ (w0 + conj w0)
//                                + (1/2) d_x^2 (Pi w0 + Pi conj w0)^2 ]
//
// with Pi = Pi_tau when filtered (identity otherwise) and the squared term
// dropped when nonlinearity is off. Re(output) = Re(w0). The quadratic term
// is evaluated on a 2M zero-padded grid, so it equals the exact coefficient
// convolution of the band-limited inputs.
Field nonlinear_flow(const Field& w0, double t, double tau, bool filtered, bool nonlinearity);

// One step of the filtered Lie-Trotter splitting:
//
//   e^{i tau <d_x^2>} Pi_tau [ u - (i tau/2) <d_x^2>^{-1} (u + conj u)
//                                - (i tau/4) <d_x^2>^{-1} d_x^2 (Pi u + Pi conj u)^2 ]
//
// Output support is confined to |k| <= tau^{-1/2} when the filter is on.
Field flts_step(const Field& u, const SolverConfig& cfg);

using SampleCallback = std::function<void(std::int64_t step, double t, const GBState&)>;

// u^0 = to_u(state0), u^{n+1} = flts_step(u^n); returns from_u(u^N).
// With a callback, emits the recovered state every `sample_stride` steps
// (stride 0: only step 0 and the final step). Deterministic; throws
// BlowupError with the offending step index on non-finite values.
GBState evolve(const GBState& state0, const SolverConfig& cfg);
GBState evolve(const GBState& state0, const SolverConfig& cfg, std::int64_t sample_stride,
               const SampleCallback& on_sample);

namespace detail {

// Reusable buffers, padded-grid plans, and per-run multiplier tables. One
// workspace per running trajectory; distinct workspaces may be used
// concurrently over the same grid.
class StepWorkspace {
public:
    explicit StepWorkspace(GridPtr grid);

    const SpectralGrid& base() const { return *base_; }

    // Caches the keep mask and step phases for (tau, filtered); cheap when
    // called repeatedly with the same arguments.
    void prepare(double tau, bool filtered);

    // qhat(k) <- coefficients of h^2 where h is given by Hermitian
    // coefficients on the base grid; computed alias-free on the 2M grid.
    // The base-grid Nyquist mode of the result is zeroed.
    void padded_square(std::span<const Complex> h, std::span<Complex> qhat);

    std::span<const char> keep() const { return keep_; }
    std::span<const double> inv_bracket() const { return inv_bracket_; }
    std::span<const Complex> step_phase() const { return phase_; }

    std::vector<Complex> p;     // (w + conj w) coefficients
    std::vector<Complex> h;     // filtered real part, doubled
    std::vector<Complex> qhat;  // quadratic term coefficients

private:
    GridPtr base_;
    GridPtr fine_;
    std::vector<Complex> fine_a_;
    std::vector<Complex> fine_b_;
    std::vector<int> fine_index_;     // base index -> fine index
    std::vector<double> inv_bracket_;
    std::vector<char> keep_;
    std::vector<Complex> phase_;
    double cached_tau_ = -1.0;
    bool cached_filtered_ = false;
};

// In-place FLTS step on coefficient storage (transform order); the workspace
// must be prepared for (tau, filtered).
void flts_step_coeffs(std::span<Complex> u, double tau, bool filtered, bool nonlinearity,
                      StepWorkspace& ws);

// In-place flow of the nonlinear subproblem on coefficient storage.
void nonlinear_flow_coeffs(std::span<Complex> w, double t, double tau, bool filtered,
                           bool nonlinearity, StepWorkspace& ws);

}  // namespace detail

}  // namespace flts
