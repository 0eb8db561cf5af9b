#pragma once

#include "flts/gb.hpp"

namespace flts {

// Reference solvers, independent of the splitting scheme: a classical 4-stage
// Runge-Kutta integrator for the first-order system in u, and the closed-form
// solution of the linearized equation.
struct OracleConfig {
    enum class Method { rk4, linear_exact };

    Method method = Method::rk4;
    double tau_ref = 1e-4;   // reference step; T/tau_ref must be integral
    int M = 0;
    bool nonlinearity_enabled = true;
    // Cutoff parameter of the projection applied inside the right-hand side;
    // 0 means no projection (the unprojected system).
    double filter_tau = 0.0;

    void validate() const;
};

// Fourth-order one-step integration of
//
//   du/dt = i <d_x^2> u - (i/4) <d_x^2>^{-1} Pi[ 2 (u + conj u)
//                                + d_x^2 (Pi u + Pi conj u)^2 ]
//
// from state0 to time T. Deterministic; throws BlowupError on non-finite
// values with the step index.
GBState rk4_reference(const GBState& state0, const OracleConfig& cfg, double T);

// Exact solution of the linearization obtained by dropping the quadratic
// term: with the shifted variable w = z + 1/2, each mode obeys
// d^2/dt^2 w_k = -k^4 w_k, so
//
//   w_k(T)  = cos(k^2 T) w_k(0) + sin(k^2 T)/k^2 w_{t,k}(0)   (k != 0)
//   w_0(T)  = w_0(0) + T w_{t,0}(0)
GBState linear_exact(const GBState& state0, double T);

}  // namespace flts
