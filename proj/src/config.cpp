#include "gqfi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gqfi/csv.hpp"

namespace gqfi {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_finite(const std::string& key, const std::string& value) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": cannot parse '" + value + "' as number");
    }
    if (pos != value.size())
        throw ConfigError("key " + key + ": trailing characters in '" + value + "'");
    if (!std::isfinite(v)) throw ConfigError("key " + key + ": value must be finite");
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_finite(key, value);
    if (v != std::floor(v)) throw ConfigError("key " + key + ": expected integer");
    return static_cast<int>(v);
}

const std::set<std::string> kModes = {"trajectory", "sweep",      "asymptotics", "validate",
                                      "bounds",     "dephasing",  "skin"};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key)) throw ConfigError("duplicate key " + key);
        kv[key] = value;
    }

    RunConfig cfg;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("mode")) cfg.mode = *v;
    if (cfg.mode.empty()) throw ConfigError("missing required key: mode");
    if (!kModes.count(cfg.mode)) throw ConfigError("unknown mode '" + cfg.mode + "'");

    if (auto v = take("model.name")) cfg.model_name = *v;
    if (cfg.mode != "skin") {
        const auto names = builder_names();
        if (std::find(names.begin(), names.end(), cfg.model_name) == names.end())
            throw ConfigError("unknown model.name '" + cfg.model_name + "'");
    }

    if (auto v = take("model.M")) {
        const int m = parse_int("model.M", *v);
        cfg.cavity.mode_count = m;
        cfg.trapped.mode_count = m;
    }
    if (auto v = take("model.omega0")) cfg.cavity.omega0 = parse_finite("model.omega0", *v);
    if (auto v = take("model.Delta")) cfg.cavity.hopping = parse_finite("model.Delta", *v);
    if (auto v = take("model.zeta")) cfg.cavity.loss = parse_finite("model.zeta", *v);
    if (auto v = take("model.gamma")) {
        const double g = parse_finite("model.gamma", *v);
        cfg.cavity.global_rate = g;
        cfg.trapped.rate = g;
    }
    if (auto v = take("model.E")) {
        const double e = parse_finite("model.E", *v);
        cfg.cavity.drive = e;
        cfg.trapped.drive = e;
    }
    if (auto v = take("model.Omega")) cfg.trapped.trap = parse_finite("model.Omega", *v);
    if (auto v = take("model.K")) cfg.trapped.spring = parse_finite("model.K", *v);
    if (auto v = take("model.delta_phi")) cfg.trapped.phase = parse_finite("model.delta_phi", *v);

    if (auto v = take("integrator.dt")) cfg.integrator.dt = parse_finite("integrator.dt", *v);
    if (auto v = take("integrator.t_max"))
        cfg.integrator.t_max = parse_finite("integrator.t_max", *v);
    if (auto v = take("integrator.record_stride"))
        cfg.integrator.record_stride = parse_int("integrator.record_stride", *v);
    if (auto v = take("integrator.scheme")) {
        if (*v == "rk4") cfg.integrator.scheme = Scheme::Rk4;
        else if (*v == "midpoint") cfg.integrator.scheme = Scheme::Midpoint;
        else throw ConfigError("integrator.scheme must be rk4 or midpoint");
    }

    if (auto v = take("sweep.M_list")) {
        std::istringstream ls(*v);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            cfg.sweep_modes.push_back(parse_int("sweep.M_list", tok));
        }
    }
    if (auto v = take("sweep.extra")) {
        std::istringstream ls(*v);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            if (tok != "rate_per_nbar" && tok != "skin_reference")
                throw ConfigError("sweep.extra: unknown column '" + tok + "'");
            cfg.sweep_extra.push_back(tok);
        }
    }

    if (auto v = take("output.dir")) cfg.out_dir = *v;
    if (auto v = take("output.prefix")) cfg.prefix = *v;
    if (auto v = take("jobs")) cfg.jobs = parse_int("jobs", *v);

    if (auto v = take("validate.cutoff")) cfg.fock_cutoff = parse_int("validate.cutoff", *v);
    if (auto v = take("validate.dt")) cfg.fock_dt = parse_finite("validate.dt", *v);
    if (auto v = take("validate.epsilon"))
        cfg.fock_epsilon = parse_finite("validate.epsilon", *v);
    if (auto v = take("validate.t")) cfg.fock_t = parse_finite("validate.t", *v);

    if (auto v = take("skin.t_R")) cfg.skin_t_r = parse_finite("skin.t_R", *v);
    if (auto v = take("skin.t_L")) cfg.skin_t_l = parse_finite("skin.t_L", *v);
    if (auto v = take("skin.w")) cfg.skin_w = parse_finite("skin.w", *v);
    if (auto v = take("skin.L")) cfg.skin_length = parse_int("skin.L", *v);

    if (auto v = take("tol.psd")) cfg.tol_psd = parse_finite("tol.psd", *v);
    if (auto v = take("tol.uncertainty")) {
        cfg.tol_uncertainty = parse_finite("tol.uncertainty", *v);
        cfg.integrator.uncertainty_tol = cfg.tol_uncertainty;
    }
    if (auto v = take("tol.classify")) cfg.tol_classify = parse_finite("tol.classify", *v);

    if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");

    // mode-specific validation
    const bool needs_sweep = cfg.mode == "sweep" || cfg.mode == "bounds" ||
                             cfg.mode == "dephasing";
    if (needs_sweep && cfg.sweep_modes.empty())
        throw ConfigError("mode " + cfg.mode + " requires a non-empty sweep.M_list");
    for (int m : cfg.sweep_modes)
        if (m < 1) throw ConfigError("sweep.M_list entries must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");

    // resolved view, sorted, for reproducible CSV headers
    auto add = [&](const std::string& k, const std::string& v) {
        cfg.resolved.emplace_back(k, v);
    };
    add("mode", cfg.mode);
    if (!cfg.model_name.empty()) add("model.name", cfg.model_name);
    if (cfg.mode != "skin") {
        if (!needs_sweep) add("model.M", std::to_string(cfg.trapped.mode_count));
        add("model.E", format_double(cfg.trapped.drive));
        if (is_cavity_builder(cfg.model_name)) {
            add("model.omega0", format_double(cfg.cavity.omega0));
            add("model.Delta", format_double(cfg.cavity.hopping));
            add("model.zeta", format_double(cfg.cavity.loss));
            add("model.gamma", format_double(cfg.cavity.global_rate));
        } else {
            add("model.Omega", format_double(cfg.trapped.trap));
            add("model.K", format_double(cfg.trapped.spring));
            add("model.gamma", format_double(cfg.trapped.rate));
            add("model.delta_phi", format_double(cfg.trapped.phase));
        }
    }
    if (cfg.mode == "trajectory") {
        add("integrator.dt", format_double(cfg.integrator.dt));
        add("integrator.t_max", format_double(cfg.integrator.t_max));
        add("integrator.record_stride", std::to_string(cfg.integrator.record_stride));
        add("integrator.scheme", cfg.integrator.scheme == Scheme::Rk4 ? "rk4" : "midpoint");
    }
    if (needs_sweep) {
        std::string lst;
        for (size_t i = 0; i < cfg.sweep_modes.size(); ++i) {
            if (i) lst += ",";
            lst += std::to_string(cfg.sweep_modes[i]);
        }
        add("sweep.M_list", lst);
        if (!cfg.sweep_extra.empty()) {
            std::string ex;
            for (size_t i = 0; i < cfg.sweep_extra.size(); ++i) {
                if (i) ex += ",";
                ex += cfg.sweep_extra[i];
            }
            add("sweep.extra", ex);
        }
    }
    if (cfg.mode == "validate") {
        add("validate.cutoff", std::to_string(cfg.fock_cutoff));
        add("validate.dt", format_double(cfg.fock_dt));
        add("validate.epsilon", format_double(cfg.fock_epsilon));
        add("validate.t", format_double(cfg.fock_t));
    }
    if (cfg.mode == "skin") {
        add("skin.t_R", format_double(cfg.skin_t_r));
        add("skin.t_L", format_double(cfg.skin_t_l));
        add("skin.w", format_double(cfg.skin_w));
        add("skin.L", std::to_string(cfg.skin_length));
    }
    std::sort(cfg.resolved.begin(), cfg.resolved.end());
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

ModelSpec RunConfig::build_model(int mode_count) const {
    if (is_cavity_builder(model_name)) {
        CavityArrayParams p = cavity;
        p.mode_count = mode_count;
        if (model_name == "cavity_local") p.global_rate = 0.0;
        return build_cavity_array(p);
    }
    TrappedArrayParams p = trapped;
    p.mode_count = mode_count;
    if (model_name == "trapped_local") p.variant = TrappedVariant::Local;
    else if (model_name == "trapped_global") p.variant = TrappedVariant::Global;
    else if (model_name == "trapped_nonreciprocal") p.variant = TrappedVariant::Nonreciprocal;
    else if (model_name == "trapped_nonreciprocal_uniformdiag")
        p.variant = TrappedVariant::NonreciprocalUniformDiag;
    else throw ConfigError("unknown model.name '" + model_name + "'");
    return build_trapped_array(p);
}

ModelSpec RunConfig::build_model() const { return build_model(trapped.mode_count); }

}  // namespace gqfi
