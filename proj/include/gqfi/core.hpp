#pragma once

#include <Eigen/Dense>
#include <string>

#include "gqfi/errors.hpp"

namespace gqfi {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// One sensor setup: quadratic Hamiltonian matrix, linear drive vector,
/// jump-operator coefficient matrix and the estimated drive strength theta.
/// Quadrature ordering is fixed as (x_1..x_M, p_1..p_M) throughout.
struct ModelSpec {
    int mode_count = 0;    // M
    Mat hamiltonian;       // 2M x 2M, symmetric
    Vec drive;             // 2M, coefficient of theta
    CMat jump_matrix;      // n_jump x 2M, rows are jump-operator coefficients
    double theta = 0.0;
    std::string label;
};

// Symmetrizes the Hamiltonian and checks dimensions. All builders go
// through here so ModelSpec invariants hold by construction.
ModelSpec make_model(int mode_count, Mat hamiltonian, Vec drive, CMat jump_matrix,
                     double theta, std::string label);

/// sigma = [[0, 1_M], [-1_M, 0]]; sigma^T = -sigma, sigma^2 = -1.
Mat symplectic_form(int mode_count);

/// Derived generator matrices. M_full = L^dag L decomposes into a symmetric
/// real part M_R and an antisymmetric imaginary part M_I; the drift is
/// X = sigma*(H + M_I) and the diffusion Y = -sigma*M_R*sigma.
struct Generators {
    int mode_count = 0;
    CMat M_full;
    Mat M_R;
    Mat M_I;
    Mat H_eff;
    Mat X;
    Mat Y;
};

// psd_tol is relative to ||M_full||; throws NonPsdM when L^dag L fails
// positive semidefiniteness beyond it.
Generators assemble_generators(const ModelSpec& model, double psd_tol = 1e-12);

enum class CouplingClass { Dissipative, ZeroDamping, Unstable };

struct DynamicsClass {
    CouplingClass tag = CouplingClass::Unstable;
    double spectral_margin = 0.0;  // max over eigenvalues of X of Re(lambda)
};

const char* to_string(CouplingClass tag);

// tol < 0 selects the default 1e-9 * ||X||_2.
DynamicsClass classify_dynamics(const Generators& gen, double tol = -1.0);

/// Mean vector and covariance matrix of a Gaussian state.
struct GaussianState {
    Vec mean;
    Mat covariance;
};

// Smallest eigenvalue of the Hermitian matrix Gamma + i*sigma/2; physical
// states have it >= 0 up to tolerance.
double uncertainty_margin(const Mat& gamma);

// Throws UncertaintyViolation if min eig(Gamma + i sigma/2) < -tol_rel*||Gamma||_2.
void require_uncertainty(const Mat& gamma, double tol_rel = 1e-9);

GaussianState vacuum_state(int mode_count);

double spectral_norm(const Mat& m);

}  // namespace gqfi
