#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gqfi/asymptotics.hpp"
#include "gqfi/dynamics.hpp"
#include "gqfi/models.hpp"
#include "gqfi/spectral.hpp"

using namespace gqfi;

namespace {

ModelSpec lossy_driven_mode(double theta = 0.1) {
    return build_cavity_array({1, 1.0, 0.0, 0.3, 0.0, theta});
}

}  // namespace

TEST_CASE("vacuum is the steady state of pure loss") {
    ModelSpec model = lossy_driven_mode(0.0);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 5.0;
    cfg.record_stride = 100;
    const auto series = run_trajectory(model, cfg);
    for (const auto& s : series) {
        CHECK(s.phi.norm() < 1e-12);
        CHECK((s.gamma - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("zero drive vector gives zero sensitivity and information") {
    CMat jump(1, 2);
    jump << std::sqrt(0.15), Complex(0, std::sqrt(0.15));
    ModelSpec model = make_model(1, Mat::Identity(2, 2), Vec::Zero(2), jump, 0.3, "nodrive");
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 8.0;
    const auto series = run_trajectory(model, cfg);
    for (const auto& s : series) {
        CHECK(s.w.norm() == 0.0);
        CHECK(s.info_global == 0.0);
        CHECK(s.info_diff == 0.0);
    }
}

TEST_CASE("driven lossy mode reaches the closed-form asymptotic rate") {
    ModelSpec model = lossy_driven_mode();
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 220.0;
    cfg.record_stride = 1000;
    const auto series = run_trajectory(model, cfg);
    const auto& a = series[series.size() - 8];
    const auto& b = series.back();
    const double slope = (b.info_global - a.info_global) / (b.t - a.t);
    const double closed = 0.6 / 1.0225;  // 2 zeta / (zeta^2/4 + omega0^2)
    CHECK(slope == doctest::Approx(closed).epsilon(1e-4));
}

TEST_CASE("information difference settles to a constant under dissipation") {
    ModelSpec model = lossy_driven_mode();
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 150.0;  // transients decay at zeta/2
    cfg.record_stride = 500;
    const auto series = run_trajectory(model, cfg);
    CHECK(series.front().info_diff == 0.0);  // w(0) = 0
    const auto& a = series[series.size() - 3];
    const auto& b = series.back();
    CHECK(std::abs(b.info_diff - a.info_diff) / (b.t - a.t) < 1e-8);
    CHECK(b.info_diff > 0.0);
}

TEST_CASE("excitation number values") {
    TrajectoryState s;
    s.phi = Vec::Zero(2);
    s.gamma = 0.5 * Mat::Identity(2, 2);
    CHECK(excitation_number(s, 1) == doctest::Approx(0.0));
    s.gamma = 1.5 * Mat::Identity(2, 2);
    CHECK(excitation_number(s, 1) == doctest::Approx(1.0));
    s.phi << 1.0, 1.0;
    CHECK(excitation_number(s, 1) == doctest::Approx(2.0));
    CHECK(excitation_number(s, 1, /*include_mean=*/false) == doctest::Approx(1.0));
}

TEST_CASE("zero-damping slopes match the closed forms") {
    const int m = 4;
    ModelSpec model = build_trapped_array({m, 1.0, 1.0, 0.1, 0.1, 0.0, TrappedVariant::Local});
    const Generators gen = assemble_generators(model);
    const PositionBlockDecomposition pbd = decompose_position_block(model, gen);
    const ZeroDampingRates zr = zero_damping_rates(pbd, pbd.b);

    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 1200.0;
    cfg.record_stride = 10000;
    const auto series = run_trajectory(model, cfg);
    const auto& a = series[series.size() - 4];
    const auto& b = series.back();
    const double span = b.t - a.t;

    CHECK((b.info_global - a.info_global) / span ==
          doctest::Approx(zr.rate_global).epsilon(0.02));
    CHECK((b.info_env - a.info_env) / span == doctest::Approx(zr.rate_env).epsilon(0.02));
    CHECK((b.nbar - a.nbar) / span == doctest::Approx(zr.nbar_rate).epsilon(0.02));

    // diagonal growth matches the asymptotic diffusion-rate diagonal
    const SpectralDecomposition sd = decompose_drift(gen);
    const Mat gdot = covariance_growth_rate(gen, sd);
    for (int i = 0; i < 2 * m; ++i) {
        const double slope = (b.gamma(i, i) - a.gamma(i, i)) / span;
        CHECK(slope == doctest::Approx(gdot(i, i)).epsilon(0.01));
    }
}

TEST_CASE("QFI accumulators are independent of theta, bitwise") {
    ModelSpec m0 = build_trapped_array({3, 1.0, 1.0, 0.1, 0.0, 0.0, TrappedVariant::Local});
    ModelSpec m1 = build_trapped_array({3, 1.0, 1.0, 0.1, 0.1, 0.0, TrappedVariant::Local});
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    cfg.t_max = 30.0;
    cfg.record_stride = 50;
    const auto s0 = run_trajectory(m0, cfg);
    const auto s1 = run_trajectory(m1, cfg);
    REQUIRE(s0.size() == s1.size());
    for (size_t i = 0; i < s0.size(); ++i) {
        CHECK(s0[i].info_global == s1[i].info_global);
        CHECK(s0[i].info_diff == s1[i].info_diff);
        CHECK(s0[i].info_env == s1[i].info_env);
        CHECK((s0[i].gamma - s1[i].gamma).norm() == 0.0);
    }
}

TEST_CASE("ordering invariants along trajectories") {
    for (const char* name : {"cavity", "trapped"}) {
        ModelSpec model =
            std::string(name) == "cavity"
                ? build_cavity_array({3, 1.0, 0.5, 0.3, 0.0, 0.1})
                : build_trapped_array({3, 1.0, 1.0, 0.1, 0.1, 0.0, TrappedVariant::Local});
        IntegratorConfig cfg;
        cfg.dt = 0.01;
        cfg.t_max = 40.0;
        cfg.record_stride = 100;
        for (const auto& s : run_trajectory(model, cfg)) {
            CHECK(s.info_diff >= -1e-9);
            CHECK(s.info_env <= s.info_global + 1e-9);
            CHECK(uncertainty_margin(s.gamma) >= -1e-9 * s.gamma.norm());
        }
    }
}

TEST_CASE("halving the step barely moves the result") {
    ModelSpec model = build_cavity_array({4, 1.0, 0.5, 0.3, 0.0, 0.1});
    IntegratorConfig coarse;
    coarse.dt = 0.02;
    coarse.t_max = 50.0;
    coarse.record_stride = 2500;
    IntegratorConfig fine = coarse;
    fine.dt = 0.01;
    fine.record_stride = 5000;
    const double ig_coarse = run_trajectory(model, coarse).back().info_global;
    const double ig_fine = run_trajectory(model, fine).back().info_global;
    CHECK(std::abs(ig_coarse - ig_fine) / ig_fine < 1e-6);
}

TEST_CASE("midpoint scheme agrees with rk4 at loose tolerance") {
    ModelSpec model = lossy_driven_mode();
    IntegratorConfig rk4;
    rk4.dt = 0.005;
    rk4.t_max = 20.0;
    rk4.record_stride = 4000;
    IntegratorConfig mid = rk4;
    mid.scheme = Scheme::Midpoint;
    const double a = run_trajectory(model, rk4).back().info_global;
    const double b = run_trajectory(model, mid).back().info_global;
    CHECK(a == doctest::Approx(b).epsilon(1e-3));
}

TEST_CASE("runaway step size is reported as an uncertainty violation") {
    // covariance must start away from its fixed point for the divergence
    ModelSpec model = build_cavity_array({2, 1.0, 0.5, 0.3, 0.0, 0.1});
    IntegratorConfig cfg;
    cfg.dt = 5.0;  // far beyond the stability limit
    cfg.t_max = 100.0;
    cfg.record_stride = 1;
    CHECK_THROWS_AS(run_trajectory(model, cfg), UncertaintyViolation);
}

TEST_CASE("moment-only stepping leaves the accumulators alone") {
    ModelSpec model = lossy_driven_mode();
    const Generators gen = assemble_generators(model);
    TrajectoryState s = initial_state(model);
    s.w = Vec::Constant(2, 0.3);
    s.info_global = 1.25;
    const TrajectoryState full = step(s, gen, model, 0.01);
    const TrajectoryState only = step_moments(s, gen, model, 0.01);
    CHECK((only.gamma - full.gamma).norm() == 0.0);
    CHECK((only.phi - full.phi).norm() == 0.0);
    CHECK(only.w == s.w);
    CHECK(only.info_global == 1.25);
    CHECK(full.info_global != 1.25);
}

TEST_CASE("corrupted covariance is reported as singular") {
    Mat bad = Mat::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(info_difference(Vec::Ones(2), bad), SingularCovariance);
}

TEST_CASE("config validation") {
    ModelSpec model = lossy_driven_mode();
    IntegratorConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(run_trajectory(model, cfg), ConfigError);
    cfg.dt = 0.1;
    cfg.t_max = 0.0;
    CHECK_THROWS_AS(run_trajectory(model, cfg), ConfigError);
}
