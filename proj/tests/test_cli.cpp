#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gqfi/csv.hpp"
#include "gqfi/runner.hpp"

using namespace gqfi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string tmpdir(const std::string& leaf) {
    const auto dir = std::filesystem::temp_directory_path() / "gqfi_tests" / leaf;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("float formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, 0.0, -2.5e17}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("config parsing rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text(""), ConfigError);  // missing mode
    CHECK_THROWS_AS(parse_config_text("mode = warp\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("mode = sweep\nmodel.name = trapped_local\n"
                                      "sweep.M_list = 4\nbogus.key = 1\n"),
                    ConfigError);  // unknown key
    CHECK_THROWS_AS(parse_config_text("mode = sweep\nmodel.name = trapped_local\n"),
                    ConfigError);  // empty sweep list
    CHECK_THROWS_AS(parse_config_text("mode = trajectory\nmodel.name = nosuch\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("mode = trajectory\nmodel.name = trapped_local\n"
                                      "model.M = 3\nmodel.M = 4\n"),
                    ConfigError);  // duplicate key
    CHECK_THROWS_AS(parse_config_text("mode = trajectory\nmodel.name = trapped_local\n"
                                      "model.gamma = nan\n"),
                    ConfigError);  // non-finite parameter
    CHECK_THROWS_AS(parse_config_text("mode = trajectory\nmodel.name = trapped_local\n"
                                      "integrator.scheme = euler\n"),
                    ConfigError);
}

TEST_CASE("trajectory CSV carries the fixed schema and config header") {
    const std::string dir = tmpdir("traj");
    RunConfig cfg = parse_config_text(
        "mode = trajectory\nmodel.name = trapped_local\nmodel.M = 2\nmodel.gamma = 0.1\n"
        "model.E = 0.1\nintegrator.dt = 0.01\nintegrator.t_max = 2\n"
        "integrator.record_stride = 100\noutput.prefix = t\n");
    cfg.out_dir = dir;
    const auto paths = run(cfg);
    REQUIRE(paths.size() == 1);
    const std::string text = slurp(paths[0]);
    CHECK(text.find("# gqfi 0.1.0\n") != std::string::npos);
    CHECK(text.find("# model.name = trapped_local\n") != std::string::npos);
    CHECK(text.find("t,nbar,I_G,I_E,delta_I,gamma_diag_1,gamma_diag_2,gamma_diag_3,"
                    "gamma_diag_4\n") != std::string::npos);
    // vacuum start: first data row is all zeros except the 1/2 diagonals
    CHECK(text.find("\n0,0,0,0,0,0.5,0.5,0.5,0.5\n") != std::string::npos);
}

TEST_CASE("identical configs produce identical bytes, independent of jobs") {
    const std::string config =
        "mode = sweep\nmodel.name = trapped_nonreciprocal\nmodel.gamma = 0.1\n"
        "model.E = 0.1\nmodel.delta_phi = -1.5707963267948966\n"
        "sweep.M_list = 4,6,8,10\noutput.prefix = s\n";
    const std::string d1 = tmpdir("s1"), d2 = tmpdir("s2"), d3 = tmpdir("s3");
    RunConfig c1 = parse_config_text(config);
    c1.out_dir = d1;
    RunConfig c2 = parse_config_text(config);
    c2.out_dir = d2;
    RunConfig c3 = parse_config_text(config);
    c3.out_dir = d3;
    c3.jobs = 2;
    const std::string b1 = slurp(run(c1)[0]);
    const std::string b2 = slurp(run(c2)[0]);
    const std::string b3 = slurp(run(c3)[0]);
    CHECK(b1 == b2);
    CHECK(b1 == b3);
    CHECK(b1.find("M,rate_IG,rate_IE,nbar_rate,t_star,localization_length\n") !=
          std::string::npos);
}

TEST_CASE("dissipative sweep uses the steady-state schema") {
    RunConfig cfg = parse_config_text(
        "mode = sweep\nmodel.name = cavity_local\nmodel.zeta = 0.3\nmodel.Delta = 0.5\n"
        "model.E = 0.1\nsweep.M_list = 2,4\noutput.prefix = d\n");
    cfg.out_dir = tmpdir("diss");
    const std::string text = slurp(run(cfg)[0]);
    CHECK(text.find("M,rate_IG,rate_IE,nbar_st\n") != std::string::npos);
}

TEST_CASE("asymptotics, bounds, dephasing and skin modes produce their files") {
    const std::string dir = tmpdir("modes");
    RunConfig a = parse_config_text(
        "mode = asymptotics\nmodel.name = trapped_global\nmodel.M = 6\nmodel.gamma = 0.1\n"
        "model.E = 0.1\noutput.prefix = a\n");
    a.out_dir = dir;
    CHECK(slurp(run(a)[0]).find("rate_IG,") != std::string::npos);

    RunConfig b = parse_config_text(
        "mode = bounds\nmodel.name = trapped_local\nmodel.gamma = 0.1\nmodel.E = 0.1\n"
        "sweep.M_list = 4,8,12\noutput.prefix = b\n");
    b.out_dir = dir;
    const std::string btxt = slurp(run(b)[0]);
    CHECK(btxt.find("M,opt_rate_IG,opt_rate_IE,resource,lower_G,upper_G,lower_E,upper_E\n") !=
          std::string::npos);

    RunConfig d = parse_config_text(
        "mode = dephasing\nmodel.name = trapped_nonreciprocal\nmodel.gamma = 0.1\n"
        "model.E = 0.1\nmodel.delta_phi = -0.785398163397448\nsweep.M_list = 6,10\n"
        "output.prefix = d\n");
    d.out_dir = dir;
    CHECK(slurp(run(d)[0]).find("M,t_star\n") != std::string::npos);

    RunConfig s = parse_config_text(
        "mode = skin\nskin.t_R = 1.1\nskin.t_L = 0.9\nskin.w = 3\nskin.L = 16\n"
        "output.prefix = sk\n");
    s.out_dir = dir;
    const std::string stxt = slurp(run(s)[0]);
    CHECK(stxt.find("# xi = ") != std::string::npos);
    CHECK(stxt.find("n,eigenvalue_analytic\n") != std::string::npos);
}

TEST_CASE("validate mode emits the comparison schema at the percent level") {
    RunConfig cfg = parse_config_text(
        "mode = validate\nmodel.name = cavity_local\nmodel.M = 1\nmodel.Delta = 0\n"
        "model.zeta = 0.3\nmodel.E = 0.1\nvalidate.cutoff = 14\nvalidate.t = 3\n"
        "validate.dt = 0.001\nvalidate.epsilon = 0.01\noutput.prefix = v\n");
    cfg.out_dir = tmpdir("val");
    const std::string text = slurp(run(cfg)[0]);
    CHECK(text.find("quantity,gaussian_value,fock_value,rel_err\n") != std::string::npos);
    // every reported relative error is below 1e-2
    std::istringstream in(text);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("quantity", 0) == 0) continue;
        const auto pos = line.rfind(',');
        CHECK(std::stod(line.substr(pos + 1)) < 1e-2);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("figure presets enumerate and parse") {
    const auto presets = figure_recipes();
    CHECK(presets.size() >= 14);
    for (const auto& p : presets) {
        CAPTURE(p.name);
        CHECK_NOTHROW(parse_config_text(p.config));
    }
    CHECK(find_preset("fig2b").config.find("cavity_local") != std::string::npos);
    CHECK(find_preset("fig6fg").config.find("-1.5707963267948966") != std::string::npos);
    CHECK_THROWS_AS(find_preset("fig99"), ConfigError);
}

TEST_CASE("sweep.extra attaches the normalization and reference columns") {
    RunConfig cfg = parse_config_text(
        "mode = sweep\nmodel.name = cavity_local\nmodel.zeta = 0.3\nmodel.Delta = 0.5\n"
        "model.E = 0.1\nsweep.M_list = 2,4\nsweep.extra = rate_per_nbar\n"
        "output.prefix = n\n");
    cfg.out_dir = tmpdir("extra1");
    CHECK(slurp(run(cfg)[0]).find("M,rate_IG,rate_IE,nbar_st,rate_IG_per_nbar\n") !=
          std::string::npos);

    RunConfig ref = parse_config_text(
        "mode = sweep\nmodel.name = trapped_nonreciprocal\nmodel.gamma = 0.1\n"
        "model.E = 0.1\nmodel.delta_phi = -1.5707963267948966\nsweep.M_list = 4,6\n"
        "sweep.extra = skin_reference\noutput.prefix = r\n");
    ref.out_dir = tmpdir("extra2");
    const std::string text = slurp(run(ref)[0]);
    CHECK(text.find("ref_exp_2M_over_xi\n") != std::string::npos);

    CHECK_THROWS_AS(parse_config_text("mode = sweep\nmodel.name = cavity_local\n"
                                      "sweep.M_list = 2\nsweep.extra = bogus\n"),
                    ConfigError);
}

TEST_CASE("fig8 preset runs end to end") {
    RunConfig cfg = parse_config_text(find_preset("fig8_dphi_pi2").config);
    cfg.out_dir = tmpdir("fig8");
    cfg.sweep_modes = {10, 20, 30};  // trimmed for test speed
    cfg.resolved.emplace_back("note", "trimmed sweep");
    const std::string text = slurp(run(cfg)[0]);
    CHECK(text.find("M,t_star\n") != std::string::npos);
}
