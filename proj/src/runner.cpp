#include "gqfi/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "gqfi/asymptotics.hpp"
#include "gqfi/csv.hpp"
#include "gqfi/fock.hpp"

namespace gqfi {

namespace {

void emit_header(CsvWriter& csv, const RunConfig& cfg) {
    csv.comment(kArtifactVersion);
    for (const auto& [k, v] : cfg.resolved) csv.comment(k + " = " + v);
}

std::string out_path(const RunConfig& cfg, const std::string& stem) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / (cfg.prefix + "_" + stem + ".csv")).string();
}

// Per-M work items dispatched to a small pool; results land in index order
// so the output bytes never depend on the thread count.
template <typename Fn>
void parallel_for_index(int jobs, int count, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    const int n_threads = std::min(jobs, count);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::string> run_trajectory_mode(const RunConfig& cfg) {
    const ModelSpec model = cfg.build_model();
    const auto series = run_trajectory(model, cfg.integrator);

    CsvWriter csv;
    emit_header(csv, cfg);
    std::vector<std::string> cols = {"t", "nbar", "I_G", "I_E", "delta_I"};
    for (int i = 1; i <= 2 * model.mode_count; ++i)
        cols.push_back("gamma_diag_" + std::to_string(i));
    csv.header(cols);
    for (const auto& s : series) {
        std::vector<double> vals = {s.t, s.nbar, s.info_global, s.info_env, s.info_diff};
        for (int i = 0; i < 2 * model.mode_count; ++i) vals.push_back(s.gamma(i, i));
        csv.row_values(vals);
    }
    const std::string path = out_path(cfg, "trajectory");
    csv.write_file(path);
    return {path};
}

std::vector<std::string> run_sweep_mode(const RunConfig& cfg) {
    const int count = static_cast<int>(cfg.sweep_modes.size());
    std::vector<AsymptoticReport> reports(count);
    std::vector<ModelSpec> models(count);
    parallel_for_index(cfg.jobs, count, [&](int i) {
        models[i] = cfg.build_model(cfg.sweep_modes[i]);
        assemble_generators(models[i], cfg.tol_psd);
        reports[i] = asymptotic_report(models[i], cfg.tol_classify);
    });

    const bool dissipative = !reports.empty() &&
                             reports.front().dynamics.tag == CouplingClass::Dissipative;
    double xi = std::numeric_limits<double>::infinity();
    if (cfg.model_name.rfind("trapped_nonreciprocal", 0) == 0) {
        double tr, tl;
        skin_params_from_trapped(cfg.trapped.spring, cfg.trapped.rate, cfg.trapped.phase, tr,
                                 tl);
        if (std::abs(tr - tl) > 1e-15) xi = 1.0 / std::abs(std::log(std::sqrt(tr / tl)));
    }
    const bool want_norm = std::count(cfg.sweep_extra.begin(), cfg.sweep_extra.end(),
                                      "rate_per_nbar") > 0;
    const bool want_ref = std::count(cfg.sweep_extra.begin(), cfg.sweep_extra.end(),
                                     "skin_reference") > 0;

    CsvWriter csv;
    emit_header(csv, cfg);
    std::vector<std::string> cols =
        dissipative ? std::vector<std::string>{"M", "rate_IG", "rate_IE", "nbar_st"}
                    : std::vector<std::string>{"M", "rate_IG", "rate_IE", "nbar_rate",
                                               "t_star", "localization_length"};
    if (want_norm) cols.push_back("rate_IG_per_nbar");
    if (want_ref) cols.push_back("ref_exp_2M_over_xi");
    csv.header(cols);
    for (int i = 0; i < count; ++i) {
        std::vector<double> vals = {double(cfg.sweep_modes[i]), reports[i].rate_info_global,
                                    reports[i].rate_info_env, reports[i].nbar};
        if (!dissipative) {
            vals.push_back(
                reports[i].t_star.value_or(std::numeric_limits<double>::quiet_NaN()));
            vals.push_back(xi);
        }
        if (want_norm) vals.push_back(reports[i].rate_info_global / reports[i].nbar);
        if (want_ref) vals.push_back(std::exp(2.0 * cfg.sweep_modes[i] / xi));
        csv.row_values(vals);
    }
    const std::string path = out_path(cfg, "sweep");
    csv.write_file(path);
    return {path};
}

std::vector<std::string> run_asymptotics_mode(const RunConfig& cfg) {
    const ModelSpec model = cfg.build_model();
    assemble_generators(model, cfg.tol_psd);
    const AsymptoticReport rep = asymptotic_report(model, cfg.tol_classify);

    CsvWriter csv;
    emit_header(csv, cfg);
    csv.header({"quantity", "value"});
    auto put = [&](const std::string& k, double v) { csv.row({k, format_double(v)}); };
    csv.row({"class", to_string(rep.dynamics.tag)});
    put("spectral_margin", rep.dynamics.spectral_margin);
    put("rate_IG", rep.rate_info_global);
    put("rate_IE", rep.rate_info_env);
    put("rate_dI", rep.rate_info_diff);
    put(rep.dynamics.tag == CouplingClass::Dissipative ? "nbar_st" : "nbar_rate", rep.nbar);
    put("opt_rate_IG", rep.optimized.rate_global);
    put("opt_rate_IE", rep.optimized.rate_env);
    if (rep.t_star) put("t_star", *rep.t_star);
    const std::string path = out_path(cfg, "asymptotics");
    csv.write_file(path);
    return {path};
}

std::vector<std::string> run_validate_mode(const RunConfig& cfg) {
    const ModelSpec model = cfg.build_model();

    IntegratorConfig ic;
    ic.dt = std::min(cfg.integrator.dt, 1e-3);
    ic.t_max = cfg.fock_t;
    ic.record_stride = static_cast<int>(std::max(1L, std::lround(cfg.fock_t / ic.dt)));
    const auto series = run_trajectory(model, ic);
    const TrajectoryState& last = series.back();

    const OracleQfis coarse =
        fidelity_qfis(model, model.theta, cfg.fock_epsilon, cfg.fock_t, cfg.fock_cutoff,
                      cfg.fock_dt);
    const OracleQfis fine =
        fidelity_qfis(model, model.theta, cfg.fock_epsilon, cfg.fock_t, cfg.fock_cutoff + 5,
                      cfg.fock_dt);
    for (auto [a, b] : {std::pair{coarse.info_global, fine.info_global},
                        std::pair{coarse.info_env, fine.info_env}}) {
        if (std::abs(a - b) > 0.002 * std::abs(b))
            throw CutoffExceeded("QFIs moved more than 0.2% between cutoffs " +
                                 std::to_string(cfg.fock_cutoff) + " and " +
                                 std::to_string(cfg.fock_cutoff + 5));
    }

    CsvWriter csv;
    emit_header(csv, cfg);
    csv.header({"quantity", "gaussian_value", "fock_value", "rel_err"});
    auto put = [&](const std::string& q, double g, double f) {
        const double rel = std::abs(f - g) / std::max(1e-300, std::abs(g));
        csv.row({q, format_double(g), format_double(f), format_double(rel)});
    };
    put("I_G", last.info_global, fine.info_global);
    put("I_E", last.info_env, fine.info_env);
    put("delta_I", last.info_diff, fine.info_global - fine.info_env);
    const std::string path = out_path(cfg, "validate");
    csv.write_file(path);
    return {path};
}

std::vector<std::string> run_bounds_mode(const RunConfig& cfg) {
    const int count = static_cast<int>(cfg.sweep_modes.size());
    std::vector<BoundCheckRow> rows(count);
    parallel_for_index(cfg.jobs, count, [&](int i) {
        const int m = cfg.sweep_modes[i];
        const ModelSpec model = cfg.build_model(m);
        const AsymptoticReport rep = asymptotic_report(model, cfg.tol_classify);
        BoundCheckRow& r = rows[i];
        r.mode_count = m;
        r.opt_rate_global = rep.optimized.rate_global;
        r.opt_rate_env = rep.optimized.rate_env;
        r.resource = rep.nbar;
        r.lower_ratio_g = r.opt_rate_global / (r.resource * m);
        r.upper_ratio_g = r.opt_rate_global / (r.resource * m * m);
        if (rep.dynamics.tag == CouplingClass::ZeroDamping) {
            r.lower_ratio_e = r.opt_rate_env / m;
            r.upper_ratio_e = r.opt_rate_env / (double(m) * m);
        } else {
            r.lower_ratio_e = r.lower_ratio_g;
            r.upper_ratio_e = r.upper_ratio_g;
        }
    });
    const BoundCheckResult res = check_bounds(rows);

    CsvWriter csv;
    emit_header(csv, cfg);
    csv.comment("drift lower_G=" + format_double(res.lower_g_drift) +
                " upper_G=" + format_double(res.upper_g_drift) +
                " lower_E=" + format_double(res.lower_e_drift) +
                " upper_E=" + format_double(res.upper_e_drift));
    csv.header({"M", "opt_rate_IG", "opt_rate_IE", "resource", "lower_G", "upper_G", "lower_E",
                "upper_E"});
    for (const auto& r : res.rows)
        csv.row_values({double(r.mode_count), r.opt_rate_global, r.opt_rate_env, r.resource,
                        r.lower_ratio_g, r.upper_ratio_g, r.lower_ratio_e, r.upper_ratio_e});
    const std::string path = out_path(cfg, "bounds");
    csv.write_file(path);
    return {path};
}

std::vector<std::string> run_dephasing_mode(const RunConfig& cfg) {
    const int count = static_cast<int>(cfg.sweep_modes.size());
    std::vector<double> tstar(count);
    parallel_for_index(cfg.jobs, count, [&](int i) {
        const ModelSpec model = cfg.build_model(cfg.sweep_modes[i]);
        const Generators gen = assemble_generators(model, cfg.tol_psd);
        tstar[i] = dephasing_time(gen, decompose_drift(gen));
    });
    CsvWriter csv;
    emit_header(csv, cfg);
    csv.header({"M", "t_star"});
    for (int i = 0; i < count; ++i) csv.row_values({double(cfg.sweep_modes[i]), tstar[i]});
    const std::string path = out_path(cfg, "dephasing");
    csv.write_file(path);
    return {path};
}

std::vector<std::string> run_skin_mode(const RunConfig& cfg) {
    const SkinSpectrum sp = skin_spectrum(cfg.skin_t_r, cfg.skin_t_l, cfg.skin_w,
                                          cfg.skin_length);
    CsvWriter csv;
    emit_header(csv, cfg);
    csv.comment("xi = " + format_double(sp.xi));
    csv.comment("profile_exponent = " + format_double(sp.profile_exponent));
    csv.comment("max_abs_error = " + format_double(sp.max_abs_error));
    csv.header({"n", "eigenvalue_analytic"});
    for (int i = 0; i < sp.eigenvalues.size(); ++i)
        csv.row_values({double(i + 1), sp.eigenvalues(i)});
    const std::string path = out_path(cfg, "skin");
    csv.write_file(path);
    return {path};
}

}  // namespace

std::vector<std::string> run(const RunConfig& cfg) {
    if (cfg.mode == "trajectory") return run_trajectory_mode(cfg);
    if (cfg.mode == "sweep") return run_sweep_mode(cfg);
    if (cfg.mode == "asymptotics") return run_asymptotics_mode(cfg);
    if (cfg.mode == "validate") return run_validate_mode(cfg);
    if (cfg.mode == "bounds") return run_bounds_mode(cfg);
    if (cfg.mode == "dephasing") return run_dephasing_mode(cfg);
    if (cfg.mode == "skin") return run_skin_mode(cfg);
    throw ConfigError("unknown mode " + cfg.mode);
}

namespace {

std::string sweep_list(int lo, int hi, int step) {
    std::string s;
    for (int m = lo; m <= hi; m += step) {
        if (!s.empty()) s += ",";
        s += std::to_string(m);
    }
    return s;
}

}  // namespace

std::vector<FigurePreset> figure_recipes() {
    std::vector<FigurePreset> out;
    auto add = [&](std::string name, std::string synopsis, std::string config) {
        out.push_back({std::move(name), std::move(synopsis), std::move(config)});
    };

    add("fig2a", "covariance diagonals of the local cavity array, M=60",
        "mode = trajectory\nmodel.name = cavity_local\nmodel.M = 60\nmodel.Delta = 0.5\n"
        "model.zeta = 0.3\nmodel.E = 0.1\nintegrator.dt = 0.02\nintegrator.t_max = 50\n"
        "integrator.record_stride = 25\noutput.prefix = fig2a\n");
    add("fig2b", "asymptotic global rate over nbar vs M, local cavity array",
        "mode = sweep\nmodel.name = cavity_local\nmodel.Delta = 0.5\nmodel.zeta = 0.3\n"
        "model.E = 0.1\nsweep.M_list = " + sweep_list(8, 60, 4) +
        "\nsweep.extra = rate_per_nbar\noutput.prefix = fig2b\n");
    add("fig3a", "covariance diagonals of the hybrid cavity array, M=60",
        "mode = trajectory\nmodel.name = cavity_hybrid\nmodel.M = 60\nmodel.Delta = 0.5\n"
        "model.zeta = 0.1\nmodel.gamma = 0.3\nmodel.E = 0.1\nintegrator.dt = 0.02\n"
        "integrator.t_max = 80\nintegrator.record_stride = 25\noutput.prefix = fig3a\n");
    add("fig3b", "asymptotic global rate over nbar vs M, hybrid cavity array",
        "mode = sweep\nmodel.name = cavity_hybrid\nmodel.Delta = 0.5\nmodel.zeta = 0.1\n"
        "model.gamma = 0.3\nmodel.E = 0.1\nsweep.M_list = " + sweep_list(8, 60, 4) +
        "\nsweep.extra = rate_per_nbar\noutput.prefix = fig3b\n");
    add("fig4ab", "trajectory of the local trapped array, M=60",
        "mode = trajectory\nmodel.name = trapped_local\nmodel.M = 60\nmodel.gamma = 0.1\n"
        "model.E = 0.1\nintegrator.dt = 0.02\nintegrator.t_max = 200\n"
        "integrator.record_stride = 50\noutput.prefix = fig4ab\n");
    add("fig4cd", "rate scalings vs M, local trapped array",
        "mode = sweep\nmodel.name = trapped_local\nmodel.gamma = 0.1\nmodel.E = 0.1\n"
        "sweep.M_list = " + sweep_list(8, 60, 4) +
        "\nsweep.extra = rate_per_nbar\noutput.prefix = fig4cd\n");
    add("fig5bc", "trajectory of the global trapped array, M=60",
        "mode = trajectory\nmodel.name = trapped_global\nmodel.M = 60\nmodel.gamma = 0.1\n"
        "model.E = 0.1\nintegrator.dt = 0.02\nintegrator.t_max = 400\n"
        "integrator.record_stride = 100\noutput.prefix = fig5bc\n");
    add("fig5de", "rate scalings vs M, global trapped array",
        "mode = sweep\nmodel.name = trapped_global\nmodel.gamma = 0.1\nmodel.E = 0.1\n"
        "sweep.M_list = " + sweep_list(8, 60, 4) +
        "\nsweep.extra = rate_per_nbar\noutput.prefix = fig5de\n");
    add("fig6bc", "trajectory of the reciprocal bond-monitored array, M=60",
        "mode = trajectory\nmodel.name = trapped_nonreciprocal\nmodel.M = 60\n"
        "model.gamma = 0.1\nmodel.E = 0.1\nmodel.delta_phi = 0\nintegrator.dt = 0.02\n"
        "integrator.t_max = 200\nintegrator.record_stride = 50\noutput.prefix = fig6bc\n");
    add("fig6de", "trajectory of the nonreciprocal array, delta_phi = -pi/2, M=60",
        "mode = trajectory\nmodel.name = trapped_nonreciprocal\nmodel.M = 60\n"
        "model.gamma = 0.1\nmodel.E = 0.1\nmodel.delta_phi = -1.5707963267948966\n"
        "integrator.dt = 0.04\nintegrator.t_max = 1200\nintegrator.record_stride = 125\n"
        "output.prefix = fig6de\n");
    add("fig6fg", "exponential rate scalings vs M, nonreciprocal array",
        "mode = sweep\nmodel.name = trapped_nonreciprocal\nmodel.gamma = 0.1\nmodel.E = 0.1\n"
        "model.delta_phi = -1.5707963267948966\nsweep.M_list = " + sweep_list(10, 60, 5) +
        "\nsweep.extra = skin_reference\noutput.prefix = fig6fg\n");
    add("fig7a", "global vs environmental information, nonreciprocal array, M=60",
        "mode = trajectory\nmodel.name = trapped_nonreciprocal\nmodel.M = 60\n"
        "model.gamma = 0.1\nmodel.E = 0.1\nmodel.delta_phi = -1.5707963267948966\n"
        "integrator.dt = 0.04\nintegrator.t_max = 1200\nintegrator.record_stride = 125\n"
        "output.prefix = fig7a\n");
    add("fig7b", "environmental rate vs M, nonreciprocal array",
        "mode = sweep\nmodel.name = trapped_nonreciprocal\nmodel.gamma = 0.1\nmodel.E = 0.1\n"
        "model.delta_phi = -1.5707963267948966\nsweep.M_list = " + sweep_list(10, 60, 5) +
        "\noutput.prefix = fig7b\n");
    for (auto [suffix, phi] : {std::pair{"dphi0", "0"},
                               std::pair{"dphi_pi4", "-0.7853981633974483"},
                               std::pair{"dphi_pi2", "-1.5707963267948966"}}) {
        add(std::string("fig8_") + suffix,
            std::string("dephasing time vs M at delta_phi = ") + phi,
            std::string("mode = dephasing\nmodel.name = trapped_nonreciprocal\n"
                        "model.gamma = 0.1\nmodel.E = 0.1\nmodel.delta_phi = ") +
                phi + "\nsweep.M_list = " + sweep_list(10, 60, 10) + "\noutput.prefix = fig8_" +
                suffix + "\n");
    }
    return out;
}

FigurePreset find_preset(const std::string& name) {
    for (auto& p : figure_recipes())
        if (p.name == name) return p;
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace gqfi
