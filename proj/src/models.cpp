#include "gqfi/models.hpp"

#include <cmath>

namespace gqfi {

namespace {

// Position-block chain: trap*1 + spring*(open-boundary discrete Laplacian).
Mat chain_block(int m, double trap, double spring) {
    Mat h = trap * Mat::Identity(m, m);
    for (int j = 0; j + 1 < m; ++j) {
        h(j, j) += spring;
        h(j + 1, j + 1) += spring;
        h(j, j + 1) -= spring;
        h(j + 1, j) -= spring;
    }
    return h;
}

Vec position_drive(int m) {
    Vec a = Vec::Zero(2 * m);
    a.head(m).setConstant(-1.0);
    return a;
}

}  // namespace

ModelSpec build_cavity_array(const CavityArrayParams& p) {
    const int m = p.mode_count;
    if (m < 1) throw ConfigError("cavity array needs M >= 1");
    const int n = 2 * m;

    Mat ham = Mat::Zero(n, n);
    ham.topLeftCorner(m, m) = chain_block(m, p.omega0, p.hopping);
    ham.bottomRightCorner(m, m) = p.omega0 * Mat::Identity(m, m);

    const int n_jump = m + (p.global_rate > 0 ? 1 : 0);
    CMat jumps = CMat::Zero(n_jump, n);
    for (int j = 0; j < m; ++j) {
        jumps(j, j) = std::sqrt(p.loss / 2.0);
        jumps(j, m + j) = Complex(0.0, std::sqrt(p.loss / 2.0));
    }
    if (p.global_rate > 0) {
        // sqrt(gamma/2) * sum_j (b_j + b_j^dag) = sqrt(gamma) * sum_j x_j
        for (int j = 0; j < m; ++j) jumps(m, j) = std::sqrt(p.global_rate);
    }

    ModelSpec model = make_model(m, std::move(ham), position_drive(m), std::move(jumps),
                                 p.drive, p.global_rate > 0 ? "cavity_hybrid" : "cavity_local");

    Eigen::SelfAdjointEigenSolver<Mat> es(model.hamiltonian.topLeftCorner(m, m),
                                          Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0)
        throw UnstableModel("cavity position block not positive definite");
    const DynamicsClass dc = classify_dynamics(assemble_generators(model));
    if (dc.tag == CouplingClass::Unstable)
        throw UnstableModel("cavity array classifies as unstable, margin " +
                            std::to_string(dc.spectral_margin));
    return model;
}

ModelSpec build_trapped_array(const TrappedArrayParams& p) {
    const int m = p.mode_count;
    if (m < 1) throw ConfigError("trapped array needs M >= 1");
    const int n = 2 * m;
    const bool nonrec = p.variant == TrappedVariant::Nonreciprocal ||
                        p.variant == TrappedVariant::NonreciprocalUniformDiag;
    if (nonrec && p.spring <= p.rate * std::abs(std::sin(p.phase)))
        throw PtBroken("requires K > gamma*|sin(delta_phi)|");

    Mat ham = Mat::Zero(n, n);
    Mat h = chain_block(m, p.trap, p.spring);
    if (p.variant == TrappedVariant::NonreciprocalUniformDiag && m >= 2) {
        h(0, 0) = p.trap + 2 * p.spring;
        h(m - 1, m - 1) = p.trap + 2 * p.spring;
    }
    ham.topLeftCorner(m, m) = h;
    ham.bottomRightCorner(m, m) = p.trap * Mat::Identity(m, m);

    CMat jumps;
    const double sq = std::sqrt(p.rate);
    switch (p.variant) {
        case TrappedVariant::Local:
            jumps = CMat::Zero(m, n);
            for (int j = 0; j < m; ++j) jumps(j, j) = sq;
            break;
        case TrappedVariant::Global:
            jumps = CMat::Zero(1, n);
            for (int j = 0; j < m; ++j) jumps(0, j) = sq;
            break;
        case TrappedVariant::Nonreciprocal:
        case TrappedVariant::NonreciprocalUniformDiag: {
            const int bonds = m - 1;
            jumps = CMat::Zero(2 * bonds, n);
            const Complex ph = std::polar(1.0, p.phase / 2.0);
            for (int j = 0; j < bonds; ++j) {
                jumps(2 * j, j) = sq * ph;            // L_j^-
                jumps(2 * j, j + 1) = -sq * std::conj(ph);
                jumps(2 * j + 1, j) = sq;             // L_j^+
                jumps(2 * j + 1, j + 1) = sq;
            }
            break;
        }
    }

    std::string label;
    switch (p.variant) {
        case TrappedVariant::Local: label = "trapped_local"; break;
        case TrappedVariant::Global: label = "trapped_global"; break;
        case TrappedVariant::Nonreciprocal: label = "trapped_nonreciprocal"; break;
        case TrappedVariant::NonreciprocalUniformDiag:
            label = "trapped_nonreciprocal_uniformdiag";
            break;
    }

    ModelSpec model = make_model(m, std::move(ham), position_drive(m), std::move(jumps),
                                 p.drive, std::move(label));
    const DynamicsClass dc = classify_dynamics(assemble_generators(model));
    if (dc.tag == CouplingClass::Unstable)
        throw UnstableModel("trapped array classifies as unstable, margin " +
                            std::to_string(dc.spectral_margin));
    return model;
}

std::vector<std::string> builder_names() {
    return {"cavity_local",        "cavity_hybrid",
            "trapped_local",       "trapped_global",
            "trapped_nonreciprocal", "trapped_nonreciprocal_uniformdiag"};
}

bool is_cavity_builder(const std::string& name) {
    return name.rfind("cavity", 0) == 0;
}

}  // namespace gqfi
