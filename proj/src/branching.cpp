#include "prwlab/branching.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "prwlab/error.hpp"
#include "prwlab/parallel.hpp"

namespace prwlab {

namespace {

struct Frame {
    RngStream rng;
    double birth;
    double s;  // S_{i-1} of the next child
    std::uint64_t key;
    std::uint64_t next_index;
    int gen;
};

Frame make_frame(double birth, std::uint64_t key, int gen) {
    return {RngStream(key), birth, 0.0, key, 0, gen};
}

}  // namespace

PrwPoints simulate_prw_points(const JointStepModel& model, double t, RngStream& rng, std::uint64_t max_points) {
    if (t < 0.0) throw Error(ErrorKind::domain, "simulate_prw_points needs t >= 0");
    PrwPoints out;
    double s = 0.0;
    while (s <= t) {
        const StepPair p = sample_pair(model, rng);
        const double ti = s + p.eta;
        if (ti <= t) {
            if (out.points.size() >= max_points) {
                out.truncated = true;
                break;
            }
            out.points.push_back(ti);
        }
        s += p.xi;
    }
    return out;
}

GenerationCounts simulate_generations(const JointStepModel& model, double t, int jmax, std::uint64_t root_key,
                                      const TreeOptions& options) {
    if (t < 0.0) throw Error(ErrorKind::domain, "simulate_generations needs t >= 0");
    if (jmax < 1) throw Error(ErrorKind::domain, "simulate_generations needs jmax >= 1");
    GenerationCounts out;
    out.counts.assign(static_cast<std::size_t>(jmax), 0);
    int deepest = 0;

    std::vector<Frame> stack;
    stack.push_back(make_frame(0.0, root_key, 0));
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.birth + f.s > t) {
            stack.pop_back();
            continue;
        }
        const StepPair p = sample_pair(model, f.rng);
        const double child = f.birth + f.s + p.eta;
        const std::uint64_t index = f.next_index++;
        f.s += p.xi;
        if (child > t) continue;

        const int gen = f.gen + 1;
        const std::uint64_t key = child_key(f.key, index);
        if (++out.nodes > options.max_nodes) {
            out.truncated = true;
            break;
        }
        if (gen <= jmax) ++out.counts[static_cast<std::size_t>(gen - 1)];
        deepest = std::max(deepest, gen);
        if (options.track_height || gen < jmax) stack.push_back(make_frame(child, key, gen));
    }
    if (options.track_height && !out.truncated) out.height = static_cast<std::uint64_t>(deepest) + 1;
    return out;
}

GenerationCounts simulate_generations(const JointStepModel& model, double t, int jmax, RngStream& rng,
                                      const TreeOptions& options) {
    return simulate_generations(model, t, jmax, rng(), options);
}

LeftmostBirth leftmost_birth(const JointStepModel& model, int n, std::uint64_t root_key, std::uint64_t max_nodes) {
    if (n < 0) throw Error(ErrorKind::domain, "leftmost_birth needs n >= 0");
    if (n == 0) return {0.0, false, 0};
    LeftmostBirth out{std::numeric_limits<double>::infinity(), false, 0};

    // Greedy bound: follow the earliest child of each individual. The earliest
    // child is found by scanning until S_{i-1} passes the best birth so far.
    {
        double birth = 0.0;
        std::uint64_t key = root_key;
        for (int g = 0; g < n; ++g) {
            RngStream rng(key);
            double s = 0.0, best = std::numeric_limits<double>::infinity();
            std::uint64_t best_index = 0;
            for (std::uint64_t i = 0; birth + s < best; ++i) {
                const StepPair p = sample_pair(model, rng);
                const double c = birth + s + p.eta;
                if (c < best) {
                    best = c;
                    best_index = i;
                }
                s += p.xi;
                if (++out.nodes > max_nodes) {
                    out.truncated = true;
                    return out;
                }
            }
            birth = best;
            key = child_key(key, best_index);
        }
        out.value = birth;
    }

    std::vector<Frame> stack;
    stack.push_back(make_frame(0.0, root_key, 0));
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.birth + f.s >= out.value) {
            stack.pop_back();
            continue;
        }
        const StepPair p = sample_pair(model, f.rng);
        const double child = f.birth + f.s + p.eta;
        const std::uint64_t index = f.next_index++;
        f.s += p.xi;
        if (child >= out.value) continue;
        if (++out.nodes > max_nodes) {
            out.truncated = true;
            break;
        }
        const int gen = f.gen + 1;
        if (gen == n) {
            out.value = child;
        } else {
            const std::uint64_t key = child_key(f.key, index);
            stack.push_back(make_frame(child, key, gen));
        }
    }
    return out;
}

LeftmostBirth leftmost_birth(const JointStepModel& model, int n, RngStream& rng, std::uint64_t max_nodes) {
    return leftmost_birth(model, n, rng(), max_nodes);
}

bool SimResult::any_truncated() const noexcept {
    return std::any_of(truncated.begin(), truncated.end(), [](bool b) { return b; });
}

std::uint64_t replica_tree_key(std::uint64_t master_seed, std::size_t replica) noexcept {
    return derive_seed(master_seed, replica, StreamRole::tree);
}

SimResult simulate_ensemble(const SimConfig& config) {
    if (config.replicas < 1) throw Error(ErrorKind::validation, "simulate.replicas must be at least 1");
    if (config.jmax < 1) throw Error(ErrorKind::validation, "generations.jmax must be at least 1");
    if (!(config.t >= 0.0)) throw Error(ErrorKind::validation, "simulate.t must be nonnegative");
    const std::size_t R = config.replicas;
    const auto J = static_cast<std::size_t>(config.jmax);
    SimResult res;
    res.jmax = config.jmax;
    res.counts.assign(R * J, 0);
    res.heights.assign(R, std::nullopt);
    res.nodes.assign(R, 0);
    res.seed_trace.resize(R);
    std::vector<char> trunc(R, 0), done(R, 0);
    std::atomic<bool> stop{false};

    const TreeOptions opts{config.max_nodes, config.track_height};
    parallel_for(
        R,
        [&](std::size_t r) {
            const std::uint64_t key = replica_tree_key(config.master_seed, r);
            res.seed_trace[r] = {r, key};
            if (config.abort_on_truncation && stop.load()) return;
            GenerationCounts g = simulate_generations(config.model, config.t, config.jmax, key, opts);
            std::copy(g.counts.begin(), g.counts.end(), res.counts.begin() + static_cast<std::ptrdiff_t>(r * J));
            res.heights[r] = g.height;
            res.nodes[r] = g.nodes;
            trunc[r] = g.truncated ? 1 : 0;
            done[r] = 1;
            if (g.truncated) stop = true;
        },
        config.threads);
    res.truncated.assign(trunc.begin(), trunc.end());
    res.completed.assign(done.begin(), done.end());
    res.aborted = std::find(done.begin(), done.end(), 0) != done.end();
    return res;
}

std::vector<double> clt_statistic(const SimResult& result, const RenewalTables& tables, int j, double t, double s2,
                                  double m) {
    if (j < 1 || j > result.jmax) {
        throw Error(ErrorKind::domain, "clt_statistic: generation " + std::to_string(j) + " was not simulated");
    }
    if (!(s2 > 0.0)) throw Error(ErrorKind::domain, "clt_statistic needs s2 > 0");
    if (!(t > 0.0)) throw Error(ErrorKind::domain, "clt_statistic needs t > 0");
    const GridFunction& vj = tables.generation(j);
    const auto k = vj.try_index_of(t);
    if (!k) throw Error(ErrorKind::domain, "clt_statistic: V_j(t) is not tabulated at t = " + format_double(t));
    const double v = vj[*k];
    const double jd = j;
    const double log_scale = 0.5 * std::log(jd) + std::lgamma(jd) -
                             0.5 * (std::log(s2) - (2.0 * jd + 1.0) * std::log(m) + (2.0 * jd - 1.0) * std::log(t));
    const double scale = std::exp(log_scale);
    std::vector<double> out;
    out.reserve(result.replicas());
    for (std::size_t r = 0; r < result.replicas(); ++r) {
        if (!result.completed.empty() && !result.completed[r]) continue;
        out.push_back(scale * (static_cast<double>(result.count(r, j)) - v));
    }
    return out;
}

}  // namespace prwlab
