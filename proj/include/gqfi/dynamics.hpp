#pragma once

#include <vector>

#include "gqfi/core.hpp"

namespace gqfi {

/// Time-stamped bundle carried along a trajectory. `w` is the sensitivity
/// vector w(t) = int_0^t e^{X(t-tau)} Gamma(tau) a dtau, advanced as the
/// ODE dw/dt = X w + Gamma a; info_global accumulates dI_G/dt = 8 a^T w.
struct TrajectoryState {
    double t = 0.0;
    Vec phi;
    Mat gamma;
    Vec w;
    double info_global = 0.0;
    double info_diff = 0.0;   // delta I = 4 w^T Gamma^{-1} w
    double info_env = 0.0;    // I_E = I_G - delta I
    double nbar = 0.0;
};

enum class Scheme { Rk4, Midpoint };

struct IntegratorConfig {
    double dt = 1e-2;
    double t_max = 10.0;
    Scheme scheme = Scheme::Rk4;
    int record_stride = 100;
    double uncertainty_tol = 1e-9;  // relative, checked at recorded states
};

TrajectoryState initial_state(const ModelSpec& model);  // vacuum, w = 0

// d(phi)/dt = X phi + theta sigma a ; d(Gamma)/dt = X Gamma + Gamma X^T + Y
void moment_derivatives(const Generators& gen, const ModelSpec& model, const Vec& phi,
                        const Mat& gamma, Vec& dphi, Mat& dgamma);

// dw/dt = X w + Gamma a ; dI_G/dt = 8 a^T w
void sensitivity_derivatives(const Generators& gen, const ModelSpec& model, const Vec& w,
                             const Mat& gamma, Vec& dw, double& dinfo);

// One step of the coupled system (phi, Gamma, w, I_G); Gamma re-symmetrized.
// The w equation sees the same stage values of Gamma as the moment equations.
TrajectoryState step(const TrajectoryState& state, const Generators& gen,
                     const ModelSpec& model, double dt, Scheme scheme = Scheme::Rk4);

// Moment-only step (phi, Gamma); sensitivity and accumulators untouched.
TrajectoryState step_moments(const TrajectoryState& state, const Generators& gen,
                             const ModelSpec& model, double dt, Scheme scheme = Scheme::Rk4);

// delta I by linear solve (LLT); throws SingularCovariance if Gamma is not
// positive definite.
double info_difference(const Vec& w, const Mat& gamma);

// nbar = (Tr Gamma - M + |phi|^2) / (2M); pass include_mean=false for
// asymptotic reports where the first-moment part is dropped.
double excitation_number(const TrajectoryState& state, int mode_count,
                         bool include_mean = true);

// Deterministic fixed-step run from the vacuum; returns states at stride
// intervals (t=0 and the final step always included). The uncertainty
// invariant is enforced at every recorded state.
std::vector<TrajectoryState> run_trajectory(const ModelSpec& model,
                                            const IntegratorConfig& config);

}  // namespace gqfi
