#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prwlab/asymp.hpp"
#include "prwlab/dist.hpp"

namespace prwlab {

struct GridConfig {
    double h = 1e-2;
    double T = 200.0;

    friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct GenerationsConfig {
    int jmax = 6;
    double schedule_power = 0.55;  ///< p in j(t) = floor(t^p)

    int j_at(double t) const;
    std::string schedule_text() const;

    friend bool operator==(const GenerationsConfig&, const GenerationsConfig&) = default;
};

struct SimulateSection {
    double t = 10.0;
    std::size_t replicas = 100000;
    std::uint64_t master_seed = 1;
    std::uint64_t max_nodes = 100'000'000;
    bool heights = true;

    friend bool operator==(const SimulateSection&, const SimulateSection&) = default;
};

struct VerifySection {
    std::vector<PredictionLabel> theorems;
    std::vector<double> t_checkpoints{100.0, 150.0, 200.0};

    friend bool operator==(const VerifySection&, const VerifySection&) = default;
};

struct ExperimentConfig {
    JointStepModel model = JointStepModel::gem();
    GridConfig grid;
    GenerationsConfig generations;
    SimulateSection simulate;
    VerifySection verify;
    std::string output_dir = "out";
    std::vector<std::string> warnings;  ///< produced by validation, not serialized

    friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
        return a.model == b.model && a.grid == b.grid && a.generations == b.generations &&
               a.simulate == b.simulate && a.verify == b.verify && a.output_dir == b.output_dir;
    }
};

/// Parses and validates a JSON experiment file. Parse errors carry the line
/// number; validation errors name the offending key (e.g. "grid.h").
ExperimentConfig parse_config(std::string_view text);

/// Canonical JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Re-checks cross-field constraints (lattice alignment, schedule window).
void validate_config(ExperimentConfig& config);

}  // namespace prwlab
