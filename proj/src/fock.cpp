#include "gqfi/fock.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace gqfi {

namespace {

CMat annihilation(int cutoff) {
    CMat b = CMat::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) b(n - 1, n) = std::sqrt(double(n));
    return b;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

TruncatedOperatorSet build_truncated_ops(const ModelSpec& model, int cutoff) {
    if (model.mode_count > 2)
        throw ConfigError("Fock oracle supports M <= 2 (dimension explosion)");
    if (cutoff < 8) throw ConfigError("Fock cutoff must be >= 8");

    const int m = model.mode_count;
    TruncatedOperatorSet ops;
    ops.mode_count = m;
    ops.cutoff = cutoff;

    const CMat b = annihilation(cutoff);
    const CMat x1 = (b + b.adjoint()) / std::sqrt(2.0);
    const CMat p1 = (b - b.adjoint()) / Complex(0, std::sqrt(2.0));
    const CMat id = CMat::Identity(cutoff, cutoff);

    ops.quadratures.resize(2 * m);
    if (m == 1) {
        ops.quadratures[0] = x1;
        ops.quadratures[1] = p1;
    } else {
        ops.quadratures[0] = kron(x1, id);
        ops.quadratures[1] = kron(id, x1);
        ops.quadratures[2] = kron(p1, id);
        ops.quadratures[3] = kron(id, p1);
    }

    const int dim = static_cast<int>(ops.quadratures[0].rows());
    ops.ham_quadratic = CMat::Zero(dim, dim);
    for (int j = 0; j < 2 * m; ++j)
        for (int k = 0; k < 2 * m; ++k)
            if (model.hamiltonian(j, k) != 0.0)
                ops.ham_quadratic +=
                    0.5 * model.hamiltonian(j, k) * (ops.quadratures[j] * ops.quadratures[k]);
    ops.drive_op = CMat::Zero(dim, dim);
    for (int j = 0; j < 2 * m; ++j)
        if (model.drive(j) != 0.0) ops.drive_op += model.drive(j) * ops.quadratures[j];

    ops.jump_sum = CMat::Zero(dim, dim);
    for (Eigen::Index n = 0; n < model.jump_matrix.rows(); ++n) {
        CMat l = CMat::Zero(dim, dim);
        for (int k = 0; k < 2 * m; ++k)
            if (model.jump_matrix(n, k) != 0.0) l += model.jump_matrix(n, k) * ops.quadratures[k];
        ops.jump_sum += l.adjoint() * l;
        ops.jumps.push_back(std::move(l));
    }
    return ops;
}

namespace {

double top_leakage(const CMat& mu, int mode_count, int cutoff) {
    const int dim = static_cast<int>(mu.rows());
    double acc = 0.0;
    if (mode_count == 1) {
        for (int n = cutoff - 2; n < cutoff; ++n) acc += std::abs(mu(n, n));
    } else {
        for (int i = 0; i < dim; ++i) {
            const int n1 = i / cutoff, n2 = i % cutoff;
            if (n1 >= cutoff - 2 || n2 >= cutoff - 2) acc += std::abs(mu(i, i));
        }
    }
    return acc;
}

}  // namespace

PseudoDensity integrate_pseudo_density(const ModelSpec& model, double theta1, double theta2,
                                       double t, int cutoff, double dt, double leak_tol) {
    const TruncatedOperatorSet ops = build_truncated_ops(model, cutoff);
    const int dim = static_cast<int>(ops.quadratures[0].rows());
    const CMat h1 = ops.ham_quadratic + theta1 * ops.drive_op;
    const CMat h2 = ops.ham_quadratic + theta2 * ops.drive_op;

    CMat mu = CMat::Zero(dim, dim);
    mu(0, 0) = 1.0;  // vacuum

    auto rhs = [&](const CMat& m) -> CMat {
        CMat out = Complex(0, -1) * (h1 * m - m * h2);
        out.noalias() -= 0.5 * (ops.jump_sum * m + m * ops.jump_sum);
        for (const CMat& l : ops.jumps) out.noalias() += l * m * l.adjoint();
        return out;
    };

    const long steps = std::lround(t / dt);
    const long check_every = std::max<long>(1, steps / 64);
    for (long k = 0; k < steps; ++k) {
        const CMat k1 = rhs(mu);
        const CMat k2 = rhs(mu + 0.5 * dt * k1);
        const CMat k3 = rhs(mu + 0.5 * dt * k2);
        const CMat k4 = rhs(mu + dt * k3);
        mu += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % check_every == 0 || k + 1 == steps) {
            const double leak = top_leakage(mu, model.mode_count, cutoff);
            if (leak > leak_tol)
                throw CutoffExceeded("top-level population " + std::to_string(leak) +
                                     " at t=" + std::to_string((k + 1) * dt) +
                                     "; increase cutoff");
        }
    }
    PseudoDensity out;
    out.top_leakage = top_leakage(mu, model.mode_count, cutoff);
    out.mu = std::move(mu);
    return out;
}

OracleQfis fidelity_qfis(const ModelSpec& model, double theta, double eps, double t,
                         int cutoff, double dt) {
    const PseudoDensity pd =
        integrate_pseudo_density(model, theta + eps / 2, theta - eps / 2, t, cutoff, dt);

    OracleQfis out;
    out.fidelity_global = std::abs(pd.mu.trace());
    out.fidelity_env = Eigen::JacobiSVD<CMat>(pd.mu).singularValues().sum();

    const double mach = std::numeric_limits<double>::epsilon();
    for (double f : {out.fidelity_global, out.fidelity_env}) {
        if (f < 0.5)
            throw IllConditioned("F = " + std::to_string(f) +
                                 " outside the quadratic regime; decrease eps");
        // eps >= 1e-6 resolves an O(1) QFI above rounding, so a vanishing
        // 1-F then means the information itself is zero at this resolution
        if (std::abs(1.0 - f) < 10.0 * mach && eps < 1e-6)
            throw IllConditioned("1 - F = " + std::to_string(1.0 - f) +
                                 " at rounding level; increase eps");
    }
    out.info_global = 8.0 * (1.0 - out.fidelity_global) / (eps * eps);
    out.info_env = 8.0 * (1.0 - out.fidelity_env) / (eps * eps);
    return out;
}

FockMoments pseudo_moments(const TruncatedOperatorSet& ops, const CMat& mu) {
    const int n = 2 * ops.mode_count;
    FockMoments fm;
    fm.trace = mu.trace();
    fm.mean = CVec(n);
    for (int j = 0; j < n; ++j) fm.mean(j) = (ops.quadratures[j] * mu).trace() / fm.trace;
    fm.covariance = CMat(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const Complex second =
                0.5 * ((ops.quadratures[j] * ops.quadratures[k] +
                        ops.quadratures[k] * ops.quadratures[j]) *
                       mu)
                          .trace() /
                fm.trace;
            fm.covariance(j, k) = second - fm.mean(j) * fm.mean(k);
        }
    }
    return fm;
}

}  // namespace gqfi
