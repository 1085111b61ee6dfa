#include "gqfi/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gqfi {

Mat symplectic_form(int mode_count) {
    const int m = mode_count;
    Mat s = Mat::Zero(2 * m, 2 * m);
    s.topRightCorner(m, m) = Mat::Identity(m, m);
    s.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
    return s;
}

ModelSpec make_model(int mode_count, Mat hamiltonian, Vec drive, CMat jump_matrix,
                     double theta, std::string label) {
    if (mode_count < 1) throw ConfigError("mode_count must be >= 1");
    const int n = 2 * mode_count;
    if (hamiltonian.rows() != n || hamiltonian.cols() != n)
        throw ConfigError("hamiltonian must be 2M x 2M for " + label);
    if (drive.size() != n) throw ConfigError("drive must have length 2M for " + label);
    if (jump_matrix.size() > 0 && jump_matrix.cols() != n)
        throw ConfigError("jump_matrix must have 2M columns for " + label);
    ModelSpec m;
    m.mode_count = mode_count;
    m.hamiltonian = 0.5 * (hamiltonian + hamiltonian.transpose());  // exact symmetry
    m.drive = std::move(drive);
    m.jump_matrix = std::move(jump_matrix);
    m.theta = theta;
    m.label = std::move(label);
    return m;
}

double spectral_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

Generators assemble_generators(const ModelSpec& model, double psd_tol) {
    const int n = 2 * model.mode_count;
    Generators gen;
    gen.mode_count = model.mode_count;
    if (model.jump_matrix.rows() == 0) {
        gen.M_full = CMat::Zero(n, n);
    } else {
        gen.M_full = model.jump_matrix.adjoint() * model.jump_matrix;
    }

    Eigen::SelfAdjointEigenSolver<CMat> es(gen.M_full);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() < -psd_tol * scale)
        throw NonPsdM("L^dag L has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) +
                      " below tolerance; inconsistent jump matrix");

    gen.M_R = gen.M_full.real();
    gen.M_I = gen.M_full.imag();
    gen.M_R = 0.5 * (gen.M_R + gen.M_R.transpose().eval());
    gen.M_I = 0.5 * (gen.M_I - gen.M_I.transpose().eval());
    gen.H_eff = model.hamiltonian + gen.M_I;
    const Mat sigma = symplectic_form(model.mode_count);
    gen.X = sigma * gen.H_eff;
    gen.Y = -sigma * gen.M_R * sigma;
    gen.Y = 0.5 * (gen.Y + gen.Y.transpose().eval());
    return gen;
}

const char* to_string(CouplingClass tag) {
    switch (tag) {
        case CouplingClass::Dissipative: return "dissipative";
        case CouplingClass::ZeroDamping: return "zero_damping";
        case CouplingClass::Unstable: return "unstable";
    }
    return "unknown";
}

DynamicsClass classify_dynamics(const Generators& gen, double tol) {
    Eigen::EigenSolver<Mat> es(gen.X, /*computeEigenvectors=*/false);
    const CVec lam = es.eigenvalues();
    if (tol < 0) tol = 1e-9 * spectral_norm(gen.X);
    DynamicsClass dc;
    dc.spectral_margin = lam.real().maxCoeff();
    const double max_abs_re = lam.real().cwiseAbs().maxCoeff();
    if (dc.spectral_margin < -tol) {
        dc.tag = CouplingClass::Dissipative;
    } else if (max_abs_re <= tol) {
        dc.tag = CouplingClass::ZeroDamping;
    } else {
        dc.tag = CouplingClass::Unstable;
    }
    return dc;
}

double uncertainty_margin(const Mat& gamma) {
    const int m = static_cast<int>(gamma.rows()) / 2;
    CMat h = gamma.cast<Complex>();
    h += Complex(0, 0.5) * symplectic_form(m).cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void require_uncertainty(const Mat& gamma, double tol_rel) {
    Eigen::SelfAdjointEigenSolver<Mat> gs(gamma, Eigen::EigenvaluesOnly);
    const double scale = gs.eigenvalues().cwiseAbs().maxCoeff();
    const double margin = uncertainty_margin(gamma);
    if (margin < -tol_rel * scale)
        throw UncertaintyViolation("Gamma + i sigma/2 has eigenvalue " + std::to_string(margin) +
                                   " (scale " + std::to_string(scale) + ")");
}

GaussianState vacuum_state(int mode_count) {
    GaussianState s;
    s.mean = Vec::Zero(2 * mode_count);
    s.covariance = 0.5 * Mat::Identity(2 * mode_count, 2 * mode_count);
    return s;
}

}  // namespace gqfi
