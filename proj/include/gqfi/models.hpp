#pragma once

#include <string>
#include <vector>

#include "gqfi/core.hpp"

namespace gqfi {

/// Coupled cavity array with per-site loss and an optional collective
/// measurement channel (gamma > 0).
struct CavityArrayParams {
    int mode_count = 1;      // M
    double omega0 = 1.0;     // on-site frequency, sets the energy unit
    double hopping = 0.5;    // Delta
    double loss = 0.3;       // zeta, local loss rate
    double global_rate = 0.0;  // gamma, collective channel; 0 = local only
    double drive = 0.1;      // E, estimated field (theta)
};

// Throws UnstableModel if the assembled drift is not dissipative.
ModelSpec build_cavity_array(const CavityArrayParams& p);

enum class TrappedVariant {
    Local,
    Global,
    Nonreciprocal,
    NonreciprocalUniformDiag,  // end diagonals raised to Omega + 2K
};

/// Harmonically trapped array monitored through position quadratures.
struct TrappedArrayParams {
    int mode_count = 1;        // M
    double trap = 1.0;         // Omega
    double spring = 1.0;       // K
    double rate = 0.1;         // gamma, measurement rate
    double drive = 0.1;        // E (theta)
    double phase = 0.0;        // Delta phi in [-pi/2, pi/2]
    TrappedVariant variant = TrappedVariant::Local;
};

// Nonreciprocal variants require K > gamma*|sin(phase)| (PtBroken otherwise).
ModelSpec build_trapped_array(const TrappedArrayParams& p);

// Builders addressable from run configs. Known names: cavity_local,
// cavity_hybrid, trapped_local, trapped_global, trapped_nonreciprocal,
// trapped_nonreciprocal_uniformdiag.
std::vector<std::string> builder_names();
bool is_cavity_builder(const std::string& name);

}  // namespace gqfi
