#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "prwlab/dist.hpp"
#include "prwlab/renewal.hpp"
#include "prwlab/rng.hpp"

namespace prwlab {

struct PrwPoints {
    std::vector<double> points;  ///< T_i <= t in index order
    bool truncated = false;
};

/// Birth times T_i = S_{i-1} + eta_i <= t of one perturbed random walk,
/// stopping at the first i with S_{i-1} > t.
PrwPoints simulate_prw_points(const JointStepModel& model, double t, RngStream& rng,
                              std::uint64_t max_points = 100'000'000);

struct TreeOptions {
    std::uint64_t max_nodes = 100'000'000;
    /// Expand the confined tree to extinction to find H(t). When false only
    /// generations below jmax are expanded and no height is reported.
    bool track_height = true;
};

struct GenerationCounts {
    std::vector<std::uint64_t> counts;  ///< counts[j - 1] = N_j(t), j = 1..jmax
    std::optional<std::uint64_t> height;  ///< H(t); absent when not tracked or truncated
    bool truncated = false;
    std::uint64_t nodes = 0;  ///< births visited, root excluded
};

/// Depth-first expansion of the tree confined to [0, t]. Every individual
/// draws its reproduction from its own stream, keyed by the root key and its
/// path of child indices, so trees for different t (and the leftmost-birth
/// search) see identical draws.
GenerationCounts simulate_generations(const JointStepModel& model, double t, int jmax,
                                      std::uint64_t root_key, const TreeOptions& options = {});

/// Same, with the root key drawn from `rng`.
GenerationCounts simulate_generations(const JointStepModel& model, double t, int jmax, RngStream& rng,
                                      const TreeOptions& options = {});

struct LeftmostBirth {
    double value;  ///< B(n), or the best bound found when truncated
    bool truncated = false;
    std::uint64_t nodes = 0;
};

/// B(n) = min birth time in generation n, by branch and bound over the keyed
/// tree rooted at `root_key`.
LeftmostBirth leftmost_birth(const JointStepModel& model, int n, std::uint64_t root_key,
                             std::uint64_t max_nodes = 100'000'000);

LeftmostBirth leftmost_birth(const JointStepModel& model, int n, RngStream& rng,
                             std::uint64_t max_nodes = 100'000'000);

struct SimConfig {
    JointStepModel model;
    double t;
    int jmax;
    std::size_t replicas;
    std::uint64_t master_seed;
    std::uint64_t max_nodes = 100'000'000;
    bool track_height = true;
    /// Stop launching replicas once one is truncated.
    bool abort_on_truncation = false;
    std::size_t threads = 0;
};

struct SeedRecord {
    std::size_t replica;
    std::uint64_t tree_key;
};

struct SimResult {
    int jmax = 0;
    std::vector<std::uint64_t> counts;  ///< row-major, replicas x jmax
    std::vector<std::optional<std::uint64_t>> heights;
    std::vector<bool> truncated;
    std::vector<bool> completed;  ///< false for replicas skipped after an abort
    std::vector<SeedRecord> seed_trace;
    std::vector<std::uint64_t> nodes;
    bool aborted = false;

    std::size_t replicas() const noexcept { return truncated.size(); }
    std::uint64_t count(std::size_t replica, int j) const {
        return counts[replica * static_cast<std::size_t>(jmax) + static_cast<std::size_t>(j - 1)];
    }
    bool any_truncated() const noexcept;
};

/// Root key of replica r: derive_seed(master_seed, r, tree).
std::uint64_t replica_tree_key(std::uint64_t master_seed, std::size_t replica) noexcept;

/// Replica fan-out over simulate_generations. Without abort the result is a
/// pure function of the configuration, independent of thread count.
SimResult simulate_ensemble(const SimConfig& config);

/// j^{1/2} (j-1)! (N_j(t) - V_j(t)) / (s^2 m^{-2j-1} t^{2j-1})^{1/2} per replica.
std::vector<double> clt_statistic(const SimResult& result, const RenewalTables& tables, int j, double t,
                                  double s2, double m);

}  // namespace prwlab
