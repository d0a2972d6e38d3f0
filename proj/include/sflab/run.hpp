#pragma once

// Subcommand dispatch: validates the raw configuration, runs the physics,
// writes CSV/JSON artifacts plus the manifest, and maps failures to exit
// codes (0 ok, 2 config, 3 budget, 4 non-convergence).

#include <iosfwd>
#include <string>

#include "sflab/config.hpp"

namespace sflab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitNonConvergence = 4;

/// Output directory precedence: config key "out", then $SFLAB_OUTDIR, then ".".
std::string resolve_out_dir(const Config& config);

int run_subcommand(const std::string& subcommand, const Config& raw,
                   std::ostream& diag);

/// Re-runs the subcommand and configuration stored in a manifest file.
int replay_manifest(const std::string& manifest_path,
                    const std::string& out_override, std::ostream& diag);

} // namespace sflab::cli
