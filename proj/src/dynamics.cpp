#include "gqfi/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>

namespace gqfi {

TrajectoryState initial_state(const ModelSpec& model) {
    const int n = 2 * model.mode_count;
    TrajectoryState s;
    s.phi = Vec::Zero(n);
    s.gamma = 0.5 * Mat::Identity(n, n);
    s.w = Vec::Zero(n);
    return s;
}

void moment_derivatives(const Generators& gen, const ModelSpec& model, const Vec& phi,
                        const Mat& gamma, Vec& dphi, Mat& dgamma) {
    const Mat sigma = symplectic_form(model.mode_count);
    dphi = gen.X * phi + model.theta * (sigma * model.drive);
    dgamma = gen.X * gamma + gamma * gen.X.transpose() + gen.Y;
}

void sensitivity_derivatives(const Generators& gen, const ModelSpec& model, const Vec& w,
                             const Mat& gamma, Vec& dw, double& dinfo) {
    dw = gen.X * w + gamma * model.drive;
    dinfo = 8.0 * model.drive.dot(w);
}

namespace {

struct Slope {
    Vec phi;
    Mat gamma;
    Vec w;
    double info;
};

Slope derivatives(const Generators& gen, const ModelSpec& model, const Vec& phi,
                  const Mat& gamma, const Vec& w) {
    Slope d;
    moment_derivatives(gen, model, phi, gamma, d.phi, d.gamma);
    sensitivity_derivatives(gen, model, w, gamma, d.w, d.info);
    return d;
}

}  // namespace

TrajectoryState step(const TrajectoryState& s, const Generators& gen, const ModelSpec& model,
                     double dt, Scheme scheme) {
    TrajectoryState out = s;
    if (scheme == Scheme::Midpoint) {
        Slope k1 = derivatives(gen, model, s.phi, s.gamma, s.w);
        Slope k2 = derivatives(gen, model, s.phi + 0.5 * dt * k1.phi,
                               s.gamma + 0.5 * dt * k1.gamma, s.w + 0.5 * dt * k1.w);
        out.phi += dt * k2.phi;
        out.gamma += dt * k2.gamma;
        out.w += dt * k2.w;
        out.info_global += dt * k2.info;
    } else {
        Slope k1 = derivatives(gen, model, s.phi, s.gamma, s.w);
        Slope k2 = derivatives(gen, model, s.phi + 0.5 * dt * k1.phi,
                               s.gamma + 0.5 * dt * k1.gamma, s.w + 0.5 * dt * k1.w);
        Slope k3 = derivatives(gen, model, s.phi + 0.5 * dt * k2.phi,
                               s.gamma + 0.5 * dt * k2.gamma, s.w + 0.5 * dt * k2.w);
        Slope k4 = derivatives(gen, model, s.phi + dt * k3.phi, s.gamma + dt * k3.gamma,
                               s.w + dt * k3.w);
        out.phi += (dt / 6.0) * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi);
        out.gamma += (dt / 6.0) * (k1.gamma + 2 * k2.gamma + 2 * k3.gamma + k4.gamma);
        out.w += (dt / 6.0) * (k1.w + 2 * k2.w + 2 * k3.w + k4.w);
        out.info_global += (dt / 6.0) * (k1.info + 2 * k2.info + 2 * k3.info + k4.info);
    }
    out.gamma = 0.5 * (out.gamma + out.gamma.transpose().eval());
    out.t = s.t + dt;
    return out;
}

TrajectoryState step_moments(const TrajectoryState& s, const Generators& gen,
                             const ModelSpec& model, double dt, Scheme scheme) {
    TrajectoryState frozen = s;
    frozen.w.setZero();  // decouples the sensitivity stages
    TrajectoryState out = step(frozen, gen, model, dt, scheme);
    out.w = s.w;
    out.info_global = s.info_global;
    return out;
}

double info_difference(const Vec& w, const Mat& gamma) {
    Eigen::LLT<Mat> llt(gamma);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("covariance not positive definite in info_difference");
    return 4.0 * w.dot(llt.solve(w));
}

double excitation_number(const TrajectoryState& state, int mode_count, bool include_mean) {
    double tr = state.gamma.trace() - mode_count;
    if (include_mean) tr += state.phi.squaredNorm();
    return tr / (2.0 * mode_count);
}

namespace {

void finalize(TrajectoryState& s, const ModelSpec& model, double tol) {
    require_uncertainty(s.gamma, tol);
    s.info_diff = info_difference(s.w, s.gamma);
    s.info_env = s.info_global - s.info_diff;
    s.nbar = excitation_number(s, model.mode_count);
}

}  // namespace

std::vector<TrajectoryState> run_trajectory(const ModelSpec& model,
                                            const IntegratorConfig& config) {
    if (config.dt <= 0) throw ConfigError("integrator dt must be positive");
    if (config.t_max <= 0) throw ConfigError("integrator t_max must be positive");
    if (config.record_stride < 1) throw ConfigError("record_stride must be >= 1");

    const Generators gen = assemble_generators(model);
    const double xnorm = spectral_norm(gen.X);
    if (config.dt * xnorm > 0.1)
        std::fprintf(stderr, "gqfi: warning: dt*||X|| = %.3g exceeds 0.1 for %s\n",
                     config.dt * xnorm, model.label.c_str());

    const long steps = std::lround(config.t_max / config.dt);
    std::vector<TrajectoryState> out;
    out.reserve(static_cast<size_t>(steps / config.record_stride) + 2);

    TrajectoryState s = initial_state(model);
    try {
        finalize(s, model, config.uncertainty_tol);
        out.push_back(s);
        for (long k = 1; k <= steps; ++k) {
            s = step(s, gen, model, config.dt, config.scheme);
            if (k % config.record_stride == 0 || k == steps) {
                finalize(s, model, config.uncertainty_tol);
                out.push_back(s);
            }
        }
    } catch (const UncertaintyViolation& e) {
        throw UncertaintyViolation(std::string(e.what()) + " at t=" + std::to_string(s.t));
    } catch (const SingularCovariance& e) {
        throw SingularCovariance(std::string(e.what()) + " at t=" + std::to_string(s.t));
    }
    return out;
}

}  // namespace gqfi
