#pragma once

#include <vector>

#include "gqfi/core.hpp"

namespace gqfi {

/// Dense operators on the truncated Fock space of dimension cutoff^M
/// (M <= 2 enforced). Quadratures follow the (x_1..x_M, p_1..p_M) ordering
/// of the phase-space formalism; [x, p] = i holds away from the top two
/// Fock levels.
struct TruncatedOperatorSet {
    int mode_count = 0;
    int cutoff = 0;
    std::vector<CMat> quadratures;   // 2M operators
    CMat ham_quadratic;              // (1/2) phi^T H phi part
    CMat drive_op;                   // a^T phi part; H(theta) = ham + theta*drive
    std::vector<CMat> jumps;
    CMat jump_sum;                   // sum_n L_n^dag L_n
};

TruncatedOperatorSet build_truncated_ops(const ModelSpec& model, int cutoff);

struct PseudoDensity {
    CMat mu;
    double top_leakage;  // population magnitude in the top two Fock levels
};

// RK4 integration of d(mu)/dt = -i H(th1) mu + i mu H(th2) + sum_n (L mu
// L^dag - {L^dag L, mu}/2) from the vacuum. CutoffExceeded when the top-level
// leakage passes leak_tol.
PseudoDensity integrate_pseudo_density(const ModelSpec& model, double theta1, double theta2,
                                       double t, int cutoff, double dt,
                                       double leak_tol = 1e-6);

struct OracleQfis {
    double info_global;
    double info_env;
    double fidelity_global;  // |Tr mu|
    double fidelity_env;     // sum of singular values of mu
};

// Symmetric finite differences at theta +- eps/2; IllConditioned when eps is
// too small (1-F at rounding level) or too large (F < 1/2, outside the
// quadratic regime).
OracleQfis fidelity_qfis(const ModelSpec& model, double theta, double eps, double t,
                         int cutoff, double dt);

// Moments of mu for cross-checks against the Gaussian engine: Tr[phi_k mu]
// and the symmetrized second moments around them.
struct FockMoments {
    CVec mean;
    CMat covariance;
    Complex trace;
};
FockMoments pseudo_moments(const TruncatedOperatorSet& ops, const CMat& mu);

}  // namespace gqfi
