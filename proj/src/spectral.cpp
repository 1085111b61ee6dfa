#include "gqfi/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace gqfi {

CMat SpectralDecomposition::projector(int k) const {
    const int i = rep_index[static_cast<size_t>(k)];
    return V.col(i) * V_inv.row(i);
}

SpectralDecomposition decompose_drift(const Generators& gen, double cond_cap) {
    const int n = static_cast<int>(gen.X.rows());
    const int m = n / 2;
    Eigen::EigenSolver<Mat> es(gen.X);
    if (es.info() != Eigen::Success) throw DefectiveDrift("eigensolver failed on X");

    SpectralDecomposition sd;
    sd.lambda_full = es.eigenvalues();
    sd.V = es.eigenvectors();

    Eigen::JacobiSVD<CMat> svd(sd.V);
    const auto& sv = svd.singularValues();
    sd.condition_number = sv(0) / sv(sv.size() - 1);
    if (!(sd.condition_number < cond_cap))
        throw DefectiveDrift("eigenbasis condition number " +
                             std::to_string(sd.condition_number) +
                             " exceeds cap (near an exceptional point)");
    sd.V_inv = sd.V.inverse();

    const double resid = (sd.V * sd.lambda_full.asDiagonal() * sd.V_inv - gen.X).norm();
    const double scale = std::max(1.0, gen.X.norm());
    if (resid > 1e-8 * scale * sd.condition_number)
        throw DefectiveDrift("spectral reconstruction residual " + std::to_string(resid));

    // one representative per conjugate pair, Im >= 0
    std::vector<int> reps;
    for (int i = 0; i < n; ++i)
        if (sd.lambda_full(i).imag() >= 0) reps.push_back(i);
    if (static_cast<int>(reps.size()) != m)
        throw DefectiveDrift("spectrum does not split into conjugate pairs");
    std::sort(reps.begin(), reps.end(), [&](int a, int b) {
        return sd.lambda_full(a).imag() < sd.lambda_full(b).imag();
    });

    sd.rep_index = reps;
    sd.eigenvalues = CVec(m);
    for (int k = 0; k < m; ++k) sd.eigenvalues(k) = sd.lambda_full(reps[k]);

    const double gap_tol = 1e-8 * spectral_norm(gen.X);
    sd.degenerate.assign(m, false);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (a != b && std::abs(sd.eigenvalues(a) - sd.eigenvalues(b)) < gap_tol)
                sd.degenerate[a] = true;
    return sd;
}

namespace {

// Gamma(t) = V [ (e^{li t} e^{lj t}) o G0~ + g(li+lj, t) o Y~ ] V^T with
// G0~ = V^-1 G0 V^-T, Y~ = V^-1 Y V^-T and g(z,t) = (e^{zt}-1)/z (t at z=0).
Mat propagate_eigenbasis(const SpectralDecomposition& sd, const Mat& gamma0, const Mat& y,
                         double t, bool allow_secular, double gap_tol) {
    const int n = static_cast<int>(sd.V.rows());
    const CMat g0t = sd.V_inv * gamma0.cast<Complex>() * sd.V_inv.transpose();
    const CMat yt = sd.V_inv * y.cast<Complex>() * sd.V_inv.transpose();
    CVec e(n);
    for (int i = 0; i < n; ++i) e(i) = std::exp(sd.lambda_full(i) * t);

    CMat core(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Complex z = sd.lambda_full(i) + sd.lambda_full(j);
            Complex g;
            if (std::abs(z) < gap_tol) {
                if (!allow_secular)
                    throw DefectiveDrift("vanishing eigenvalue sum in dissipative solution");
                g = Complex(t, 0.0);
            } else {
                g = (std::exp(z * t) - 1.0) / z;
            }
            core(i, j) = e(i) * e(j) * g0t(i, j) + g * yt(i, j);
        }
    }
    const CMat out = sd.V * core * sd.V.transpose();
    Mat real = out.real();
    return 0.5 * (real + real.transpose().eval());
}

}  // namespace

Mat steady_covariance(const Generators& gen, const SpectralDecomposition& sd) {
    const DynamicsClass dc = classify_dynamics(gen);
    if (dc.tag != CouplingClass::Dissipative)
        throw WrongClass("steady_covariance needs dissipative dynamics, got " +
                         std::string(to_string(dc.tag)));
    const int n = static_cast<int>(gen.X.rows());
    const CMat yt = sd.V_inv * gen.Y.cast<Complex>() * sd.V_inv.transpose();
    CMat core(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            core(i, j) = -yt(i, j) / (sd.lambda_full(i) + sd.lambda_full(j));
    Mat g = (sd.V * core * sd.V.transpose()).real();
    g = 0.5 * (g + g.transpose().eval());

    const double resid = (gen.X * g + g * gen.X.transpose() + gen.Y).norm();
    if (resid > 1e-8 * std::max(1e-300, gen.Y.norm()))
        throw NumericsError("Lyapunov residual " + std::to_string(resid) + " too large");
    return g;
}

Mat dissipative_solution(const Generators& gen, const SpectralDecomposition& sd,
                         const Mat& gamma0, double t) {
    const DynamicsClass dc = classify_dynamics(gen);
    if (dc.tag != CouplingClass::Dissipative)
        throw WrongClass("dissipative_solution needs dissipative dynamics");
    return propagate_eigenbasis(sd, gamma0, gen.Y, t, /*allow_secular=*/false,
                                1e-14 * spectral_norm(gen.X));
}

Mat zero_damping_solution(const Generators& gen, const SpectralDecomposition& sd,
                          const Mat& gamma0, double t, double gap_tol_rel) {
    const DynamicsClass dc = classify_dynamics(gen);
    if (dc.tag != CouplingClass::ZeroDamping)
        throw WrongClass("zero_damping_solution needs zero-damping dynamics");
    return propagate_eigenbasis(sd, gamma0, gen.Y, t, /*allow_secular=*/true,
                                gap_tol_rel * spectral_norm(gen.X));
}

Mat covariance_growth_rate(const Generators& gen, const SpectralDecomposition& sd) {
    const int n = static_cast<int>(gen.X.rows());
    const int m = n / 2;
    const CMat y = gen.Y.cast<Complex>();
    CMat acc = CMat::Zero(n, n);
    for (int k = 0; k < m; ++k) {
        const int i = sd.rep_index[static_cast<size_t>(k)];
        const Complex c = sd.V_inv.row(i) * y * sd.V_inv.row(i).adjoint();
        acc += c * (sd.V.col(i) * sd.V.col(i).adjoint());
    }
    Mat out = 2.0 * acc.real();
    return 0.5 * (out + out.transpose().eval());
}

namespace {

struct GapWeights {
    std::vector<double> gap;
    std::vector<double> weight2;  // V_S^2
};

GapWeights gap_weights(const Generators& gen, const SpectralDecomposition& sd,
                       double gap_tol_rel) {
    const int m = static_cast<int>(sd.eigenvalues.size());
    if (m < 2) throw AllGapsDegenerate("need at least two distinct eigenmodes");
    const double gap_tol = gap_tol_rel * spectral_norm(gen.X);
    const CMat y = gen.Y.cast<Complex>();

    // P_a Y P_b^dag = v_a (u_a^T Y conj(u_b)) conj(v_b)^T is rank one, so the
    // Hilbert-Schmidt norm factorizes. Amplitudes are compared against the
    // Cauchy-Schwarz scale ||Y|| |u_a||u_b||v_a||v_b| so analytic zeros are
    // not mistaken for weight.
    std::vector<double> vnorm(m), unorm(m), freq(m);
    CMat num(m, m);
    for (int a = 0; a < m; ++a) {
        const int i = sd.rep_index[static_cast<size_t>(a)];
        vnorm[a] = sd.V.col(i).norm();
        unorm[a] = sd.V_inv.row(i).norm();
        freq[a] = sd.eigenvalues(a).imag();
    }
    for (int a = 0; a < m; ++a) {
        const int i = sd.rep_index[static_cast<size_t>(a)];
        for (int b = 0; b < m; ++b) {
            const int j = sd.rep_index[static_cast<size_t>(b)];
            num(a, b) = (sd.V_inv.row(i) * y * sd.V_inv.row(j).conjugate().transpose())(0, 0);
        }
    }

    GapWeights gw;
    const double ynorm = gen.Y.norm();
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            if (a == b) continue;
            const double amp = std::abs(num(a, b)) * vnorm[a] * vnorm[b];
            const double ref = ynorm * unorm[a] * unorm[b] * vnorm[a] * vnorm[b];
            if (amp <= 1e-12 * ref) continue;  // analytic zero
            const double gap = freq[a] - freq[b];
            if (std::abs(gap) < gap_tol)
                throw DegenerateGap("modes " + std::to_string(a) + "," + std::to_string(b) +
                                    " collide within gap tolerance");
            gw.gap.push_back(gap);
            gw.weight2.push_back((amp / std::abs(gap)) * (amp / std::abs(gap)));
        }
    }
    double total = 0.0;
    for (double w2 : gw.weight2) total += w2;
    if (total <= 0.0 || !(total > 1e-300))
        throw AllGapsDegenerate("all expansion factors below tolerance");
    return gw;
}

}  // namespace

double dephasing_time(const Generators& gen, const SpectralDecomposition& sd,
                      double gap_tol_rel) {
    const GapWeights gw = gap_weights(gen, sd, gap_tol_rel);
    double total = 0.0, second = 0.0;
    for (size_t i = 0; i < gw.gap.size(); ++i) {
        total += gw.weight2[i];
        second += gw.weight2[i] * gw.gap[i] * gw.gap[i];
    }
    // mean gap is zero by the (a,b) <-> (b,a) antisymmetry
    const double sigma_gap = std::sqrt(second / total);
    return M_PI / sigma_gap;
}

double dephasing_mean_gap(const Generators& gen, const SpectralDecomposition& sd) {
    const GapWeights gw = gap_weights(gen, sd, 1e-8);
    double total = 0.0, first = 0.0;
    for (size_t i = 0; i < gw.gap.size(); ++i) {
        total += gw.weight2[i];
        first += gw.weight2[i] * gw.gap[i];
    }
    return first / total;
}

}  // namespace gqfi
