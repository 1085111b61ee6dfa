#include "gqfi/asymptotics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "gqfi/models.hpp"

namespace gqfi {

PositionBlockDecomposition decompose_position_block(const ModelSpec& model,
                                                    const Generators& gen, double block_tol,
                                                    double cond_cap) {
    const int m = model.mode_count;
    const Mat& ham = model.hamiltonian;
    const double hscale = std::max(1.0, ham.norm());
    const double mscale = std::max(1.0, gen.M_R.norm() + gen.M_I.norm());

    PositionBlockDecomposition pbd;
    pbd.Omega = ham(m, m);
    if (ham.topRightCorner(m, m).norm() > block_tol * hscale ||
        (ham.bottomRightCorner(m, m) - pbd.Omega * Mat::Identity(m, m)).norm() >
            block_tol * hscale)
        throw WrongBlockStructure("Hamiltonian is not position-block with uniform kinetic term");
    if (gen.M_R.bottomRows(m).norm() > block_tol * mscale ||
        gen.M_R.topRightCorner(m, m).norm() > block_tol * mscale ||
        gen.M_I.bottomRows(m).norm() > block_tol * mscale ||
        gen.M_I.topRightCorner(m, m).norm() > block_tol * mscale)
        throw WrongBlockStructure("measurement matrix acts outside the position block");
    if (model.drive.tail(m).norm() > block_tol * std::max(1.0, model.drive.norm()))
        throw WrongBlockStructure("drive has momentum components");

    pbd.h = ham.topLeftCorner(m, m);
    pbd.m_R = gen.M_R.topLeftCorner(m, m);
    pbd.m_I = gen.M_I.topLeftCorner(m, m);
    pbd.b = model.drive.head(m);

    const Mat h_eff = pbd.h + pbd.m_I;
    Eigen::EigenSolver<Mat> es(h_eff);
    if (es.info() != Eigen::Success) throw DefectiveDrift("eigensolver failed on h_eff");
    const CVec lam = es.eigenvalues();
    const double scale = std::max(1.0, h_eff.norm());
    if (lam.imag().cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw WrongClass("h_eff has complex eigenvalues (not zero-damping)");
    if (lam.real().minCoeff() <= 0)
        throw WrongClass("h_eff has non-positive eigenvalues");

    CMat vc = es.eigenvectors();
    Eigen::JacobiSVD<CMat> svd(vc);
    pbd.condition_number = svd.singularValues()(0) / svd.singularValues()(m - 1);
    if (!(pbd.condition_number < cond_cap))
        throw DefectiveDrift("h_eff eigenbasis condition number too large");

    // real eigenpairs; sort ascending, then normalize l^T l = 1 keeping
    // l_a^T r_b = delta_ab
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return lam(a).real() < lam(b).real(); });

    Mat v(m, m);
    pbd.eigenvalues = Vec(m);
    for (int k = 0; k < m; ++k) {
        pbd.eigenvalues(k) = lam(order[k]).real();
        if (vc.col(order[k]).imag().norm() > 1e-9 * vc.col(order[k]).norm())
            throw WrongClass("h_eff eigenvector is not real");
        v.col(k) = vc.col(order[k]).real();
    }
    Mat left_t = v.inverse();  // rows are l_a^T
    pbd.right = v;
    pbd.left = left_t.transpose();
    for (int k = 0; k < m; ++k) {
        const double s = pbd.left.col(k).norm();
        pbd.left.col(k) /= s;
        pbd.right.col(k) *= s;
    }
    return pbd;
}

DissipativeRates dissipative_rates(const Generators& gen, const SpectralDecomposition& sd,
                                   const Mat& gamma_st, const Vec& a) {
    const Vec z = gen.X.partialPivLu().solve(gamma_st * a);
    DissipativeRates r;
    r.rate_global = -8.0 * a.dot(z);
    r.rate_env = r.rate_global;
    r.rate_diff = 0.0;

    // projector-form cross-check, summed over conjugate-pair representatives
    const int m = static_cast<int>(sd.eigenvalues.size());
    const CMat y = gen.Y.cast<Complex>();
    const CVec av = a.cast<Complex>();
    Complex acc(0, 0);
    for (int aa = 0; aa < m; ++aa) {
        const int i = sd.rep_index[static_cast<size_t>(aa)];
        const Complex la = sd.lambda_full(i);
        const Complex a_va = (av.transpose() * sd.V.col(i))(0, 0);  // a^T v_a
        const Eigen::RowVectorXcd uy = sd.V_inv.row(i) * y;         // u_a^T Y
        for (int bb = 0; bb < m; ++bb) {
            const int j = sd.rep_index[static_cast<size_t>(bb)];
            const Complex lb = sd.lambda_full(j);
            const Complex n_dag = (uy * sd.V_inv.row(j).conjugate().transpose())(0, 0);
            const Complex n_t = (uy * sd.V_inv.row(j).transpose())(0, 0);
            const Complex va_b = (av.transpose() * sd.V.col(j))(0, 0);
            const Complex term_dag = n_dag * a_va * std::conj(va_b) / (la + std::conj(lb));
            const Complex term_t = n_t * a_va * va_b / (la + lb);
            acc += (term_dag + term_t) / la;
        }
    }
    const double cross = 16.0 * acc.real();
    if (std::abs(cross - r.rate_global) > 1e-8 * std::max(1.0, std::abs(r.rate_global)))
        throw NumericsError("projector-form rate " + std::to_string(cross) +
                            " disagrees with -X^{-1} Gamma_st form " +
                            std::to_string(r.rate_global));
    return r;
}

Mat dephased_backaction(const PositionBlockDecomposition& pbd) {
    const int m = static_cast<int>(pbd.eigenvalues.size());
    Mat acc = Mat::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        const double d = pbd.left.col(k).dot(pbd.m_R * pbd.left.col(k));
        acc += d * (pbd.right.col(k) * pbd.right.col(k).transpose());
    }
    return acc;
}

Mat dephased_backaction_weighted(const PositionBlockDecomposition& pbd) {
    const int m = static_cast<int>(pbd.eigenvalues.size());
    Mat acc = Mat::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        const double d = pbd.left.col(k).dot(pbd.m_R * pbd.left.col(k));
        acc += d / (std::sqrt(2.0) * pbd.eigenvalues(k)) *
               (pbd.right.col(k) * pbd.right.col(k).transpose());
    }
    return acc;
}

namespace {

Mat pseudo_inverse(const Mat& m, double rel_tol = 1e-10) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cut = rel_tol * sv(0);
    Vec inv = Vec::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

Mat info_diff_rate_matrix(const PositionBlockDecomposition& pbd) {
    const int m = static_cast<int>(pbd.eigenvalues.size());
    Mat acc = Mat::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        const double d = pbd.left.col(k).dot(pbd.m_R * pbd.left.col(k));
        acc += d / (2.0 * pbd.eigenvalues(k) * pbd.eigenvalues(k)) *
               (pbd.right.col(k) * pbd.right.col(k).transpose());
    }
    return acc;
}

namespace {

Mat env_rate_matrix(const PositionBlockDecomposition& pbd) {
    const Mat h_eff = pbd.h + pbd.m_I;
    const Mat hinv_m = h_eff.partialPivLu().solve(pbd.m_R);
    return h_eff.partialPivLu().solve(hinv_m.transpose()).transpose();
}

}  // namespace

ZeroDampingRates zero_damping_rates(const PositionBlockDecomposition& pbd, const Vec& b) {
    const int m = static_cast<int>(pbd.eigenvalues.size());
    ZeroDampingRates r{};

    double nacc = 0.0;
    for (int k = 0; k < m; ++k) {
        const double d = pbd.left.col(k).dot(pbd.m_R * pbd.left.col(k));
        nacc += (pbd.Omega / pbd.eigenvalues(k) + 1.0) * d * pbd.right.col(k).squaredNorm();
    }
    r.nbar_rate = nacc / (4.0 * m);

    const Mat env = env_rate_matrix(pbd);
    r.rate_env = 4.0 * b.dot(env * b);

    const Mat mt = dephased_backaction(pbd);
    const Mat mtw = dephased_backaction_weighted(pbd);
    r.rate_diff = 4.0 * b.dot(mtw * pseudo_inverse(mt) * mtw * b);

    r.rate_global = 4.0 * b.dot((env + info_diff_rate_matrix(pbd)) * b);

    const double scale = std::max({1.0, std::abs(r.rate_global), std::abs(r.rate_env)});
    if (std::abs(r.rate_global - r.rate_env - r.rate_diff) > 1e-8 * scale)
        throw NumericsError("zero-damping rate identity violated: " +
                            std::to_string(r.rate_global - r.rate_env - r.rate_diff));
    return r;
}

OptimizedRates optimized_rates_dissipative(const Generators& gen, const Mat& gamma_st) {
    const int m = gen.mode_count;
    const Mat s = -gen.X.partialPivLu().solve(gamma_st);
    const Mat sym = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    OptimizedRates r;
    const int top = static_cast<int>(sym.rows()) - 1;
    r.rate_global = 8.0 * m * es.eigenvalues()(top);
    r.rate_env = r.rate_global;
    r.maximizer_global = std::sqrt(double(m)) * es.eigenvectors().col(top);
    r.maximizer_env = r.maximizer_global;
    return r;
}

OptimizedRates optimized_rates_zero_damping(const PositionBlockDecomposition& pbd) {
    const int m = static_cast<int>(pbd.eigenvalues.size());
    const Mat env = env_rate_matrix(pbd);
    const Mat full = env + info_diff_rate_matrix(pbd);

    Eigen::SelfAdjointEigenSolver<Mat> eg(0.5 * (full + full.transpose()));
    Eigen::SelfAdjointEigenSolver<Mat> ee(0.5 * (env + env.transpose()));
    OptimizedRates r;
    r.rate_global = 4.0 * m * eg.eigenvalues()(m - 1);
    r.rate_env = 4.0 * m * ee.eigenvalues()(m - 1);
    const double root_m = std::sqrt(double(m));
    // maximizers live in the position block; momentum components are zero
    r.maximizer_global = Vec::Zero(2 * m);
    r.maximizer_global.head(m) = root_m * eg.eigenvectors().col(m - 1);
    r.maximizer_env = Vec::Zero(2 * m);
    r.maximizer_env.head(m) = root_m * ee.eigenvectors().col(m - 1);
    return r;
}

AsymptoticReport asymptotic_report(const ModelSpec& model, double classify_tol) {
    const Generators gen = assemble_generators(model);
    AsymptoticReport rep;
    rep.dynamics = classify_dynamics(gen, classify_tol);
    switch (rep.dynamics.tag) {
        case CouplingClass::Dissipative: {
            const SpectralDecomposition sd = decompose_drift(gen);
            rep.gamma = steady_covariance(gen, sd);
            const DissipativeRates dr = dissipative_rates(gen, sd, rep.gamma, model.drive);
            rep.rate_info_global = dr.rate_global;
            rep.rate_info_env = dr.rate_env;
            rep.rate_info_diff = 0.0;
            rep.nbar = rep.gamma.trace() / (2.0 * model.mode_count);
            rep.optimized = optimized_rates_dissipative(gen, rep.gamma);
            break;
        }
        case CouplingClass::ZeroDamping: {
            const PositionBlockDecomposition pbd = decompose_position_block(model, gen);
            const ZeroDampingRates zr = zero_damping_rates(pbd, pbd.b);
            rep.rate_info_global = zr.rate_global;
            rep.rate_info_env = zr.rate_env;
            rep.rate_info_diff = zr.rate_diff;
            rep.nbar = zr.nbar_rate;
            const SpectralDecomposition sd = decompose_drift(gen);
            rep.gamma = covariance_growth_rate(gen, sd);
            rep.optimized = optimized_rates_zero_damping(pbd);
            if (model.mode_count >= 2) {
                try {
                    rep.t_star = dephasing_time(gen, sd);
                } catch (const AllGapsDegenerate&) {
                    rep.t_star.reset();
                }
            }
            break;
        }
        case CouplingClass::Unstable:
            throw WrongClass("asymptotic report undefined for unstable dynamics");
    }
    return rep;
}

BoundCheckResult check_bounds(const std::vector<BoundCheckRow>& rows) {
    if (rows.size() < 2) throw ConfigError("bound check needs at least two sweep points");
    BoundCheckResult res;
    res.rows = rows;
    auto drift = [&](auto get) {
        const double first = get(rows.front());
        const double last = get(rows.back());
        return std::abs(last / first - 1.0);
    };
    res.lower_g_drift = drift([](const BoundCheckRow& r) { return r.lower_ratio_g; });
    res.upper_g_drift = drift([](const BoundCheckRow& r) { return r.upper_ratio_g; });
    res.lower_e_drift = drift([](const BoundCheckRow& r) { return r.lower_ratio_e; });
    res.upper_e_drift = drift([](const BoundCheckRow& r) { return r.upper_ratio_e; });
    res.lower_g_flagged = res.lower_g_drift > 0.10;
    res.upper_g_flagged = res.upper_g_drift > 0.10;
    res.lower_e_flagged = res.lower_e_drift > 0.10;
    res.upper_e_flagged = res.upper_e_drift > 0.10;
    return res;
}

void skin_params_from_trapped(double spring, double rate, double phase, double& t_r,
                              double& t_l) {
    t_r = spring + rate * std::sin(std::abs(phase));
    t_l = spring - rate * std::sin(std::abs(phase));
}

SkinSpectrum skin_spectrum(double t_r, double t_l, double w, int length) {
    if (t_r * t_l <= 0.0)
        throw InvalidHopping("t_R * t_L must be positive (PT-unbroken regime)");
    if (length < 2) throw ConfigError("skin chain needs length >= 2");

    SkinSpectrum out;
    out.eigenvalues = Vec(length);
    const double amp = 2.0 * std::sqrt(t_r * t_l);
    for (int n = 1; n <= length; ++n)
        out.eigenvalues(n - 1) = w + amp * std::cos(n * M_PI / (length + 1));
    std::sort(out.eigenvalues.data(), out.eigenvalues.data() + length);

    const double ratio = std::sqrt(t_r / t_l);
    out.xi = (std::abs(std::log(ratio)) < 1e-15)
                 ? std::numeric_limits<double>::infinity()
                 : 1.0 / std::abs(std::log(ratio));

    // dense oracle: H[j+1][j] = t_R, H[j][j+1] = t_L, diagonal w
    Mat h = Mat::Zero(length, length);
    for (int j = 0; j < length; ++j) h(j, j) = w;
    for (int j = 0; j + 1 < length; ++j) {
        h(j + 1, j) = t_r;
        h(j, j + 1) = t_l;
    }
    Eigen::EigenSolver<Mat> es(h);
    Vec numeric = es.eigenvalues().real();
    std::sort(numeric.data(), numeric.data() + length);
    out.max_abs_error = (numeric - out.eigenvalues).cwiseAbs().maxCoeff();

    // profile of a bulk eigenvector: |psi_j| ~ (sqrt(tR/tL))^j |sin(j theta_n)|
    const int bulk = length / 2;
    int col = 0;
    double best = std::abs(es.eigenvalues()(0).real() - out.eigenvalues(bulk));
    for (int i = 1; i < length; ++i) {
        const double d = std::abs(es.eigenvalues()(i).real() - out.eigenvalues(bulk));
        if (d < best) {
            best = d;
            col = i;
        }
    }
    const CVec psi = es.eigenvectors().col(col);
    const double theta = std::acos((out.eigenvalues(bulk) - w) / amp);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int j = 1; j <= length; ++j) {
        const double osc = std::abs(std::sin(j * theta));
        if (osc < 0.3) continue;  // avoid nodes of the oscillatory factor
        const double yv = std::log(std::abs(psi(j - 1)) / osc);
        sx += j; sy += yv; sxx += double(j) * j; sxy += j * yv;
        ++cnt;
    }
    out.profile_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return out;
}

}  // namespace gqfi
