#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gqfi/core.hpp"
#include "gqfi/models.hpp"

using namespace gqfi;

namespace {

std::vector<ModelSpec> model_zoo(int m) {
    std::vector<ModelSpec> zoo;
    zoo.push_back(build_cavity_array({m, 1.0, 0.5, 0.3, 0.0, 0.1}));
    zoo.push_back(build_cavity_array({m, 1.0, 0.5, 0.1, 0.3, 0.1}));
    zoo.push_back(build_trapped_array({m, 1.0, 1.0, 0.1, 0.1, 0.0, TrappedVariant::Local}));
    zoo.push_back(build_trapped_array({m, 1.0, 1.0, 0.1, 0.1, 0.0, TrappedVariant::Global}));
    if (m >= 2) {
        zoo.push_back(build_trapped_array(
            {m, 1.0, 1.0, 0.1, 0.1, -M_PI / 2, TrappedVariant::Nonreciprocal}));
        zoo.push_back(build_trapped_array(
            {m, 1.0, 1.0, 0.1, 0.1, -M_PI / 2, TrappedVariant::NonreciprocalUniformDiag}));
    }
    return zoo;
}

}  // namespace

TEST_CASE("symplectic form satisfies the canonical relations") {
    for (int m : {1, 3, 7}) {
        const Mat s = symplectic_form(m);
        CHECK((s.transpose() + s).norm() == 0.0);
        CHECK((s * s + Mat::Identity(2 * m, 2 * m)).norm() == 0.0);
    }
}

TEST_CASE("closed system: empty jump matrix gives zero generators") {
    Mat h = Mat::Identity(4, 4);
    ModelSpec model = make_model(2, h, Vec::Zero(4), CMat(0, 4), 0.0, "closed");
    const Generators gen = assemble_generators(model);
    CHECK(gen.M_full.norm() == 0.0);
    CHECK(gen.Y.norm() == 0.0);
    CHECK((gen.H_eff - model.hamiltonian).norm() == 0.0);
}

TEST_CASE("single lossy mode generators match hand arithmetic") {
    const double zeta = 0.3, omega0 = 1.0;
    CMat jump(1, 2);
    jump << std::sqrt(zeta / 2), Complex(0, std::sqrt(zeta / 2));
    ModelSpec model =
        make_model(1, omega0 * Mat::Identity(2, 2), Vec::Zero(2), jump, 0.0, "lossy");
    const Generators gen = assemble_generators(model);

    CHECK((gen.M_R - (zeta / 2) * Mat::Identity(2, 2)).norm() < 1e-15);
    CHECK((gen.M_I - (zeta / 2) * symplectic_form(1)).norm() < 1e-15);

    Eigen::EigenSolver<Mat> es(gen.X);
    CVec lam = es.eigenvalues();
    for (int i = 0; i < 2; ++i) {
        CHECK(lam(i).real() == doctest::Approx(-zeta / 2).epsilon(1e-12));
        CHECK(std::abs(lam(i).imag()) == doctest::Approx(omega0).epsilon(1e-12));
    }

    const DynamicsClass dc = classify_dynamics(gen);
    CHECK(dc.tag == CouplingClass::Dissipative);
    CHECK(dc.spectral_margin == doctest::Approx(-zeta / 2).epsilon(1e-10));
}

TEST_CASE("nonreciprocal builder produces the antisymmetric backaction block") {
    const double gamma = 0.1, dphi = -0.7;
    const int m = 5;
    ModelSpec model =
        build_trapped_array({m, 1.0, 1.0, gamma, 0.1, dphi, TrappedVariant::Nonreciprocal});
    const Generators gen = assemble_generators(model);
    const Mat mi = gen.M_I.topLeftCorner(m, m);
    for (int j = 0; j + 1 < m; ++j) {
        CHECK(mi(j, j + 1) == doctest::Approx(gamma * std::sin(dphi)).epsilon(1e-12));
        CHECK(mi(j + 1, j) == doctest::Approx(-gamma * std::sin(dphi)).epsilon(1e-12));
    }
    CHECK((gen.M_I + gen.M_I.transpose()).norm() < 1e-14);
}

TEST_CASE("classification covers the three regimes") {
    ModelSpec trapped =
        build_trapped_array({4, 1.0, 1.0, 0.1, 0.1, 0.0, TrappedVariant::Local});
    CHECK(classify_dynamics(assemble_generators(trapped)).tag == CouplingClass::ZeroDamping);

    // inverted potential, no jumps
    Mat h = Mat::Identity(2, 2);
    h(0, 0) = -1.0;
    ModelSpec inverted = make_model(1, h, Vec::Zero(2), CMat(0, 2), 0.0, "inverted");
    CHECK(classify_dynamics(assemble_generators(inverted)).tag == CouplingClass::Unstable);
}

TEST_CASE("generator identities hold for every builder") {
    for (int m : {2, 5, 11}) {
        for (const ModelSpec& model : model_zoo(m)) {
            CAPTURE(model.label);
            CHECK((model.hamiltonian - model.hamiltonian.transpose()).norm() == 0.0);
            const Generators gen = assemble_generators(model);
            const Mat sigma = symplectic_form(m);
            CHECK((gen.X - sigma * (model.hamiltonian + gen.M_I)).cwiseAbs().maxCoeff() <
                  1e-14);
            CHECK((gen.Y + sigma * gen.M_R * sigma).cwiseAbs().maxCoeff() < 1e-14);

            Eigen::SelfAdjointEigenSolver<Mat> ys(gen.Y, Eigen::EigenvaluesOnly);
            CHECK(ys.eigenvalues().minCoeff() >=
                  -1e-12 * std::max(1.0, ys.eigenvalues().cwiseAbs().maxCoeff()));

            const CMat rebuilt =
                gen.M_R.cast<Complex>() + Complex(0, 1) * gen.M_I.cast<Complex>();
            CHECK((rebuilt - gen.M_full).norm() <= 1e-12 * std::max(1.0, gen.M_full.norm()));

            const DynamicsClass dc = classify_dynamics(gen);
            if (model.label.rfind("cavity", 0) == 0)
                CHECK(dc.tag == CouplingClass::Dissipative);
            else
                CHECK(dc.tag == CouplingClass::ZeroDamping);
        }
    }
}

TEST_CASE("uncertainty relation check") {
    CHECK(uncertainty_margin(0.5 * Mat::Identity(4, 4)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_NOTHROW(require_uncertainty(0.5 * Mat::Identity(4, 4)));
    CHECK_NOTHROW(require_uncertainty(1.7 * Mat::Identity(6, 6)));
    CHECK_THROWS_AS(require_uncertainty(0.4 * Mat::Identity(4, 4)), UncertaintyViolation);
}

TEST_CASE("model construction rejects bad shapes") {
    CHECK_THROWS_AS(make_model(0, Mat(), Vec(), CMat(), 0.0, "x"), ConfigError);
    CHECK_THROWS_AS(make_model(2, Mat::Identity(3, 3), Vec::Zero(4), CMat(0, 4), 0.0, "x"),
                    ConfigError);
    CHECK_THROWS_AS(make_model(2, Mat::Identity(4, 4), Vec::Zero(3), CMat(0, 4), 0.0, "x"),
                    ConfigError);
    CHECK_THROWS_AS(make_model(2, Mat::Identity(4, 4), Vec::Zero(4), CMat(1, 3), 0.0, "x"),
                    ConfigError);
}
