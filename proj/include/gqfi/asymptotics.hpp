#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gqfi/core.hpp"
#include "gqfi/spectral.hpp"

namespace gqfi {

/// Biorthogonal eigensystem of the position-block effective Hamiltonian
/// h_eff = h + m_I. Columns of `right`/`left` satisfy l_a^T r_b = delta_ab
/// with the convention l_a^T l_a = 1, so the projectors r_a l_a^T carry the
/// full skin-effect norm growth.
struct PositionBlockDecomposition {
    Vec eigenvalues;   // lambda~, ascending, real positive
    Mat right;         // r_a columns
    Mat left;          // l_a columns
    Mat h;
    Mat m_R;
    Mat m_I;
    double Omega = 0.0;
    Vec b;             // position-block drive
    double condition_number = 0.0;
};

// WrongBlockStructure if H or M deviate from the position-measurement block
// form beyond block_tol (relative); WrongClass if h_eff has complex or
// non-positive eigenvalues.
PositionBlockDecomposition decompose_position_block(const ModelSpec& model,
                                                    const Generators& gen,
                                                    double block_tol = 1e-12,
                                                    double cond_cap = 1e8);

struct OptimizedRates {
    double rate_global = 0.0;
    double rate_env = 0.0;
    Vec maximizer_global;  // scaled to |a|^2 = M
    Vec maximizer_env;
};

/// Asymptotic report for one model: closed-form steady rates plus the
/// optimized rates over drive vectors with |a|^2 = M.
struct AsymptoticReport {
    DynamicsClass dynamics;
    double rate_info_global = 0.0;  // I_G rate
    double rate_info_env = 0.0;     // I_E rate
    double rate_info_diff = 0.0;    // delta I rate (0 for dissipative)
    double nbar = 0.0;              // steady value (dissipative) or rate (zero-damping)
    Mat gamma;                      // steady covariance or its growth rate
    std::optional<double> t_star;   // zero-damping only
    OptimizedRates optimized;
};

// I_G rate = 8 a^T (-X^{-1} Gamma_st) a; the projector-form double sum is
// evaluated as a cross-check to 1e-8 relative. I_E rate equals it.
struct DissipativeRates {
    double rate_global;
    double rate_env;
    double rate_diff;  // 0
};
DissipativeRates dissipative_rates(const Generators& gen, const SpectralDecomposition& sd,
                                   const Mat& gamma_st, const Vec& a);

struct ZeroDampingRates {
    double nbar_rate;
    double rate_global;
    double rate_env;
    double rate_diff;
};
ZeroDampingRates zero_damping_rates(const PositionBlockDecomposition& pbd, const Vec& b);

// Dephased backaction matrix sum_a P~_a m_R P~_a^T and its 1/(sqrt2 lambda~)
// weighted companion.
Mat dephased_backaction(const PositionBlockDecomposition& pbd);
Mat dephased_backaction_weighted(const PositionBlockDecomposition& pbd);

// sum_a P~_a m_R P~_a^T / (2 lambda~_a^2): the dephasing part of the global
// rate quadratic form (equals the weighted-companion sandwich).
Mat info_diff_rate_matrix(const PositionBlockDecomposition& pbd);

// Exact symmetric-eigenvalue maximization of the rate quadratic forms.
OptimizedRates optimized_rates_dissipative(const Generators& gen, const Mat& gamma_st);
OptimizedRates optimized_rates_zero_damping(const PositionBlockDecomposition& pbd);

// Full report for a builder output; uses the class-appropriate formulas.
// classify_tol < 0 selects the default 1e-9 ||X||.
AsymptoticReport asymptotic_report(const ModelSpec& model, double classify_tol = -1.0);

struct BoundCheckRow {
    int mode_count;
    double opt_rate_global;
    double opt_rate_env;
    double resource;       // nbar_st or nbar rate
    double lower_ratio_g;  // opt_G / (resource * M)
    double upper_ratio_g;  // opt_G / (resource * M^2)
    double lower_ratio_e;  // opt_E / M      (zero-damping) or = lower_ratio_g
    double upper_ratio_e;  // opt_E / M^2    (zero-damping) or = upper_ratio_g
};

struct BoundCheckResult {
    std::vector<BoundCheckRow> rows;
    double lower_g_drift;  // |ratio(Mmax)/ratio(Mmin) - 1|
    double upper_g_drift;
    double lower_e_drift;
    double upper_e_drift;
    bool lower_g_flagged;  // monotone drift above 10%
    bool upper_g_flagged;
    bool lower_e_flagged;
    bool upper_e_flagged;
};

// Sandwich ratios over a swept family; violations are reported, not thrown.
BoundCheckResult check_bounds(const std::vector<BoundCheckRow>& rows);

struct SkinSpectrum {
    Vec eigenvalues;            // analytic, ascending
    double xi;                  // localization length (inf in Hermitian limit)
    double profile_exponent;    // fitted log-slope of a bulk eigenvector
    double max_abs_error;       // analytic vs dense eigensolve
};

// Uniform-diagonal nonreciprocal chain: eigenvalues w + 2 sqrt(tR tL) cos(n
// pi/(L+1)) and common localization length 1/xi = |log sqrt(tR/tL)|, checked
// against a dense eigensolve. InvalidHopping if tR*tL <= 0.
SkinSpectrum skin_spectrum(double t_r, double t_l, double w, int length);

// Hopping parameters of the trapped-array effective position Hamiltonian.
void skin_params_from_trapped(double spring, double rate, double phase, double& t_r,
                              double& t_l);

}  // namespace gqfi
