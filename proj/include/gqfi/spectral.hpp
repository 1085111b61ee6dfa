#pragma once

#include <vector>

#include "gqfi/core.hpp"

namespace gqfi {

/// Spectral decomposition of the real drift X into conjugate eigenvalue
/// pairs. `eigenvalues` holds one representative per pair (Im >= 0, sorted
/// by imaginary part); `projector(k)` is the rank-one spectral projector of
/// that representative, so X = sum_k (lam_k P_k + conj(lam_k) conj(P_k)).
/// The full eigenbasis (all 2M columns) is kept for fast evaluation of the
/// closed-form covariance solutions.
struct SpectralDecomposition {
    CVec eigenvalues;            // M representatives
    std::vector<bool> degenerate;  // pair gap below tolerance
    double condition_number = 0.0;
    CVec lambda_full;            // all 2M eigenvalues
    CMat V;                      // right eigenvectors (columns)
    CMat V_inv;
    std::vector<int> rep_index;  // column of V per representative

    CMat projector(int k) const;
};

// cond_cap guards against exceptional points; DefectiveDrift when the
// eigenbasis condition number or the reconstruction residual is out of range.
SpectralDecomposition decompose_drift(const Generators& gen, double cond_cap = 1e8);

// Steady covariance for dissipative dynamics, evaluated in the eigenbasis
// of X (the projector-form pair sum, grouped). Checks the Lyapunov residual
// ||X G + G X^T + Y|| <= 1e-8 ||Y||; WrongClass unless dissipative.
Mat steady_covariance(const Generators& gen, const SpectralDecomposition& sd);

// Closed-form Gamma(t) for dissipative dynamics from initial value gamma0.
Mat dissipative_solution(const Generators& gen, const SpectralDecomposition& sd,
                         const Mat& gamma0, double t);

// Closed-form Gamma(t) for zero-damping dynamics, including the secular
// (linear-in-t) term. Pairs with |lam_a - lam_b| < gap_tol_rel*||X|| are
// merged into the secular term.
Mat zero_damping_solution(const Generators& gen, const SpectralDecomposition& sd,
                          const Mat& gamma0, double t, double gap_tol_rel = 1e-8);

// Asymptotic growth rate of the covariance matrix, 2 Re sum_a P_a Y P_a^dag.
Mat covariance_growth_rate(const Generators& gen, const SpectralDecomposition& sd);

// Dephasing-time estimate pi/sigma_gap from the weighted dispersion of the
// oscillation-frequency gaps. Throws AllGapsDegenerate when every expansion
// factor vanishes and DegenerateGap when distinct modes collide within
// gap_tol_rel*||X|| while carrying weight.
double dephasing_time(const Generators& gen, const SpectralDecomposition& sd,
                      double gap_tol_rel = 1e-8);

// Computed weighted mean gap (zero by symmetry; exposed for verification).
double dephasing_mean_gap(const Generators& gen, const SpectralDecomposition& sd);

}  // namespace gqfi
