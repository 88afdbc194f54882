#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prwlab/config.hpp"

namespace prwlab {

enum class Subcommand { tables, simulate, gamma, verify, clt };

std::string_view to_string(Subcommand cmd) noexcept;
Subcommand parse_subcommand(std::string_view name);

struct RunOptions {
    std::optional<std::string> out_dir;        ///< overrides config.output_dir
    std::optional<std::uint64_t> seed;         ///< overrides simulate.master_seed
    std::vector<std::string> dumps;            ///< grid functions to write as <name>.csv
    std::size_t threads = 0;
};

struct RunReport {
    std::string out_dir;
    std::vector<std::string> files;  ///< artifact names relative to out_dir, manifest last
    std::vector<std::string> warnings;
    std::string stdout_text;         ///< what the CLI prints on success
};

/// Executes one subcommand and writes its artifacts plus manifest.json. On
/// failure every file written by this call is removed and the error rethrown.
RunReport run(const ExperimentConfig& config, Subcommand cmd, const RunOptions& options = {});

/// {"error": {"kind": ..., "message": ...}}
std::string error_json(std::string_view kind, std::string_view message);

}  // namespace prwlab
