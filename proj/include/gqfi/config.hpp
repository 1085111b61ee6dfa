#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gqfi/dynamics.hpp"
#include "gqfi/models.hpp"

namespace gqfi {

/// Parsed run configuration. The on-disk format is flat `key = value` lines
/// with dotted sections (model.name, integrator.dt, sweep.M_list, ...);
/// '#' starts a comment. Unknown keys are rejected.
struct RunConfig {
    std::string mode;  // trajectory|sweep|asymptotics|validate|bounds|dephasing|skin
    std::string model_name;
    CavityArrayParams cavity;
    TrappedArrayParams trapped;
    IntegratorConfig integrator;
    std::vector<int> sweep_modes;  // M values
    std::vector<std::string> sweep_extra;  // rate_per_nbar | skin_reference
    std::string out_dir = ".";
    std::string prefix = "gqfi";
    int jobs = 1;

    // validate-mode knobs
    int fock_cutoff = 30;
    double fock_dt = 1e-3;
    double fock_epsilon = 1e-2;
    double fock_t = 10.0;

    // skin-mode knobs
    double skin_t_r = 1.1;
    double skin_t_l = 0.9;
    double skin_w = 3.0;
    int skin_length = 40;

    double tol_psd = 1e-12;
    double tol_uncertainty = 1e-9;
    double tol_classify = -1.0;

    // resolved key/value view for CSV header comments (sorted by key)
    std::vector<std::pair<std::string, std::string>> resolved;

    ModelSpec build_model(int mode_count) const;
    ModelSpec build_model() const;  // at the configured model.M
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace gqfi
