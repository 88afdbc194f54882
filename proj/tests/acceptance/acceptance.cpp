// Acceptance gate: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only N   run criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "prwlab/asymp.hpp"
#include "prwlab/branching.hpp"
#include "prwlab/config.hpp"
#include "prwlab/error.hpp"
#include "prwlab/growth_rate.hpp"
#include "prwlab/renewal.hpp"
#include "prwlab/runner.hpp"

using namespace prwlab;

namespace {

constexpr std::uint64_t kSeed = 20211;

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double at(const GridFunction& g, double t) { return g[g.index_of(t)]; }

// 1. GEM tables through the runner: |V_j(t) j!/t^j - 1| <= 0.01 on [1, 50].
Verdict ac1() {
    constexpr double tol = 0.01;
    constexpr double time_limit = 120.0;
    const auto dir = std::filesystem::temp_directory_path() / "prwlab_acceptance_ac1";
    std::filesystem::remove_all(dir);
    const auto cfg = parse_config(R"({"model": {"family": "GEM"}, "grid": {"h": 0.01, "T": 50},
        "generations": {"jmax": 6}})");
    const auto t0 = std::chrono::steady_clock::now();
    RunOptions opt;
    opt.out_dir = dir.string();
    run(cfg, Subcommand::tables, opt);
    const double wall = seconds_since(t0);

    std::ifstream in(dir / "tables.csv");
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    int worst_j = 0;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        const double t = row[0];
        if (t < 1.0 - 1e-9) continue;
        // columns: t, U, V, V_2, ..., V_6
        for (int j = 1; j <= 6; ++j) {
            const double v = row[static_cast<std::size_t>(j + 1)];
            const double e = std::abs(v * std::tgamma(j + 1.0) / std::pow(t, j) - 1.0);
            if (e > worst) {
                worst = e;
                worst_j = j;
            }
        }
    }
    std::filesystem::remove_all(dir);
    return {worst <= tol && wall <= time_limit,
            "max rel err " + fmt("%.3e", worst) + " (j=" + std::to_string(worst_j) + "), limit " + fmt("%.2g", tol) +
                "; " + fmt("%.2f", wall) + " s"};
}

// 2. GEM growth rate 1/e and mu(1) = e.
Verdict ac2() {
    constexpr double tol = 1e-6;
    const auto g = gamma_rate(JointStepModel::gem());
    const double mu1 = mu(JointStepModel::gem(), 1.0);
    const double eg = std::abs(g.gamma - 0.3678794);
    const double em = std::abs(mu1 - std::exp(1.0));
    return {eg <= tol && em <= tol,
            "gamma " + fmt("%.10f", g.gamma) + ", mu(1) " + fmt("%.10f", mu1) + ", tol " + fmt("%.0e", tol)};
}

// 3. Grid powers of ell against the closed form (a t + gamma0 j)_+^j / j!,
// pointwise at every node t <= 50 where the closed form is positive.
Verdict ac3() {
    constexpr double tol = 0.01;
    constexpr double h = 0.005;
    constexpr double a = 1.0;
    constexpr double tmax = 50.0;
    constexpr int jmax = 15;
    // reported alongside: the same error restricted to a t + gamma0 j >= 1
    constexpr double interior = 1.0;
    double worst = 0.0, worst_interior = 0.0;
    std::string where;
    for (double g0 : {-1.0, 0.5}) {
        const auto origin = static_cast<std::int64_t>(std::llround(-g0 / (a * h)));
        const std::int64_t lowest = std::min(origin, jmax * origin);
        const auto n = static_cast<std::size_t>(std::llround(tmax / h) - lowest + 1);
        const auto l1 = GridFunction::sample(h, origin, n, [&](double t) { return ell_conv_power(a, g0, 1, t); });
        GridFunction lj = l1;
        for (int j = 1; j <= jmax; ++j) {
            if (j > 1) lj = stieltjes_convolve(lj, l1);
            for (std::size_t k = 0; k < lj.size(); ++k) {
                const double t = lj.node(k);
                if (t > tmax + 1e-9) break;
                const double want = ell_conv_power(a, g0, j, t);
                if (!(want > 0.0)) continue;
                const double e = std::abs(lj[k] / want - 1.0);
                if (a * t + g0 * j >= interior) worst_interior = std::max(worst_interior, e);
                if (e > worst) {
                    worst = e;
                    where = "gamma0=" + fmt("%g", g0) + " j=" + std::to_string(j) + " t=" + fmt("%g", t);
                }
            }
        }
    }
    return {worst <= tol, "max rel err " + fmt("%.3e", worst) + " at " + where + ", limit " + fmt("%.2g", tol) +
                              "; " + fmt("%.3e", worst_interior) + " where a t + gamma0 j >= 1"};
}

// 4. f^{*5}(40) on the grid against Monte Carlo of E (t - S_5)_+^5 / 5!.
Verdict ac4() {
    constexpr double h = 0.01;
    constexpr double t = 40.0;
    constexpr int j = 5;
    constexpr std::size_t n_mc = 1'000'000;
    constexpr double z_limit = 3.0;
    // f(t) = E (t - xi)_+ for xi ~ Exp(1)
    const auto f = GridFunction::sample(h, 0, static_cast<std::size_t>(std::llround(t / h)) + 1,
                                        [](double x) { return x - (1.0 - std::exp(-x)); });
    const double grid = at(convolution_power(f, j), t);
    RngStream rng(derive_seed(kSeed, 0, StreamRole::monte_carlo));
    const auto mc = fj_expectation_mc(JointStepModel::exp_exp(1.0, 1.0), 1.0, j, t, n_mc, rng);
    const double z = std::abs(grid - mc.estimate) / mc.stderr_;
    return {z <= z_limit, "grid " + fmt("%.2f", grid) + ", MC " + fmt("%.2f", mc.estimate) + " +- " +
                              fmt("%.2f", mc.stderr_) + ", |z| " + fmt("%.2f", z)};
}

// 5. Lorden, linear and subadditive bounds on [0, 200].
Verdict ac5() {
    constexpr double h = 0.01;
    constexpr double T = 200.0;
    constexpr double tol = 1e-9;
    std::size_t total = 0, pairs = 0;
    std::string detail;
    for (const auto& m : {JointStepModel::exp_exp(1.0, 1.0), JointStepModel::exp_det(1.0, 0.5), JointStepModel::gem()}) {
        const auto r = check_bounds(build_tables(m, h, T, 1), tol);
        total += r.violations();
        pairs += r.pairs_checked;
        detail += m.id() + ": " + std::to_string(r.violations()) + " ";
    }
    return {total == 0, "violations " + detail + "over " + std::to_string(pairs) + " pairs"};
}

// 6. Elementary, Blackwell and key-renewal limits for V at t = 200.
Verdict ac6() {
    constexpr double h = 0.01;
    constexpr double t = 200.0;
    constexpr double tol_abs = 0.01;
    constexpr double tol_rel = 0.01;
    const auto tri = GridFunction::sample(h, 0, static_cast<std::size_t>(std::llround(1.0 / h)) + 1,
                                          [](double x) { return std::max(0.0, 1.0 - std::abs(2.0 * x - 1.0)); });
    constexpr double tri_integral = 0.5;
    double e_elem = 0.0, e_black = 0.0, e_key = 0.0;
    for (const auto& m : {JointStepModel::gem(), JointStepModel::exp_exp(1.0, 1.0), JointStepModel::exp_exp(1.0, 2.0),
                          JointStepModel::exp_det(1.0, 0.5), JointStepModel::uniform_det(0.0, 2.0, 0.5),
                          JointStepModel::pareto_det(2.5, 1.0, 0.5)}) {
        const auto tab = build_tables(m, h, t + 1.0, 1);
        const double inv_m = 1.0 / tab.m;
        e_elem = std::max(e_elem, std::abs(at(tab.V, t) / t - inv_m));
        e_black = std::max(e_black, std::abs(at(tab.V, t + 1.0) - at(tab.V, t) - inv_m));
        e_key = std::max(e_key, std::abs(convolve_dri(tri, tab.V, t) / (tri_integral * inv_m) - 1.0));
    }
    return {e_elem <= tol_abs && e_black <= tol_abs && e_key <= tol_rel,
            "elementary " + fmt("%.2e", e_elem) + ", Blackwell " + fmt("%.2e", e_black) + ", key renewal rel " +
                fmt("%.2e", e_key)};
}

// 7. exp-correction beats elementary at j = floor(t^0.55) and improves with t.
Verdict ac7() {
    constexpr double h = 0.01;
    const std::vector<double> ts{100.0, 150.0, 200.0};
    GenerationsConfig sched;
    sched.schedule_power = 0.55;
    bool ok = true;
    std::string detail;
    for (const auto& m : {JointStepModel::exp_det(1.0, 0.5), JointStepModel::exp_exp(1.0, 2.0),
                          JointStepModel::exp_exp(1.0, 0.5), JointStepModel::uniform_det(0.0, 2.0, 0.5)}) {
        const auto tab = build_tables(m, h, ts.back(), sched.j_at(ts.back()));
        std::vector<double> gaps;
        for (double t : ts) {
            const int j = sched.j_at(t);
            const double v = at(tab.generation(j), t);
            const double ge = std::abs(compare(v, predict_elementary(j, t, tab.m)).log_gap);
            const double gx = std::abs(compare(v, predict_exp_correction(j, t, tab.m, *tab.gamma0)).log_gap);
            ok = ok && gx < ge;
            gaps.push_back(gx);
            if (t == ts.back()) detail += m.id() + " " + fmt("%.3f", gx) + "/" + fmt("%.3f", ge) + " ";
        }
        ok = ok && gaps.back() <= gaps.front();
    }
    return {ok, "|gap| exp/elem at t=200: " + detail};
}

// 8. mean N_j(t) over 1e5 replicas against V_j(t).
Verdict ac8() {
    constexpr std::size_t replicas = 100'000;
    constexpr int jmax = 4;
    constexpr double z_limit = 3.0;
    constexpr double time_limit = 600.0;
    constexpr double h = 0.0025;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string where;
    for (const auto& m : {JointStepModel::gem(), JointStepModel::exp_exp(1.0, 1.0)}) {
        const auto tab = build_tables(m, h, 20.0, jmax);
        for (double t : {5.0, 10.0, 20.0}) {
            SimConfig cfg{m, t, jmax, replicas, kSeed};
            cfg.track_height = false;
            const auto res = simulate_ensemble(cfg);
            for (int j = 1; j <= jmax; ++j) {
                double s = 0.0, s2 = 0.0;
                for (std::size_t r = 0; r < replicas; ++r) {
                    const double x = static_cast<double>(res.count(r, j));
                    s += x;
                    s2 += x * x;
                }
                const double mean = s / replicas;
                const double se = std::sqrt((s2 / replicas - mean * mean) / (replicas - 1.0));
                const double z = std::abs(mean - at(tab.generation(j), t)) / se;
                if (z > worst) {
                    worst = z;
                    where = m.id() + " t=" + fmt("%g", t) + " j=" + std::to_string(j);
                }
            }
        }
    }
    const double wall = seconds_since(t0);
    return {worst <= z_limit && wall <= time_limit,
            "max |z| " + fmt("%.2f", worst) + " at " + where + "; " + fmt("%.1f", wall) + " s"};
}

// 9. H(t)/t near e for GEM at t = 50, and the height / leftmost-birth duality.
Verdict ac9() {
    constexpr double t = 50.0;
    constexpr std::size_t replicas = 10'000;
    constexpr double band = 0.15;
    constexpr std::uint64_t node_cap = 100'000'000;
    constexpr std::size_t dual_replicas = 100;
    const auto model = JointStepModel::gem();

    SimConfig cfg{model, t, 1, replicas, kSeed};
    cfg.max_nodes = node_cap;
    cfg.abort_on_truncation = true;
    const auto res = simulate_ensemble(cfg);
    std::string height;
    bool height_ok = false;
    if (res.any_truncated()) {
        height = "H(50) not computable: tree exceeded " + std::to_string(node_cap) + " nodes";
    } else {
        double s = 0.0;
        for (const auto& hh : res.heights) s += static_cast<double>(*hh);
        const double mean = s / replicas / t;
        height_ok = std::abs(mean / std::exp(1.0) - 1.0) <= band;
        height = "mean H/t " + fmt("%.4f", mean);
    }

    // duality on coupled trees at the largest t whose trees stay under the cap
    bool dual_ok = true;
    double dual_t = t;
    for (double tt : {t, 8.0}) {
        dual_t = tt;
        dual_ok = true;
        bool feasible = true;
        for (std::size_t r = 0; r < dual_replicas && feasible; ++r) {
            const auto key = replica_tree_key(kSeed, r);
            TreeOptions opt;
            opt.max_nodes = node_cap;
            const auto g = simulate_generations(model, tt, 1, key, opt);
            if (g.truncated) {
                feasible = false;
                break;
            }
            const auto H = static_cast<int>(*g.height);
            for (int n = 1; n <= H + 1; ++n) {
                const auto b = leftmost_birth(model, n, key, node_cap);
                if (b.truncated) {
                    feasible = false;
                    break;
                }
                dual_ok = dual_ok && ((H > n) == (b.value <= tt));
            }
        }
        if (feasible) break;
        dual_ok = false;
    }
    return {height_ok && dual_ok && dual_t == t,
            height + "; duality " + (dual_ok ? "exact" : "broken") + " on " + std::to_string(dual_replicas) +
                " coupled replicas at t=" + fmt("%g", dual_t)};
}

// 10. CLT statistic for GEM, t = 30, j = 3.
Verdict ac10() {
    constexpr double t = 30.0;
    constexpr int j = 3;
    constexpr std::size_t replicas = 100'000;
    constexpr double z_limit = 3.0;
    constexpr double target_var = 0.5;
    constexpr double var_band = 0.2;
    const auto model = JointStepModel::gem();
    SimConfig cfg{model, t, j, replicas, kSeed};
    cfg.track_height = false;
    const auto res = simulate_ensemble(cfg);
    const auto tab = build_tables(model, 0.005, t, j);
    const auto mr = moments(model);
    const auto z = clt_statistic(res, tab, j, t, *mr.s2, mr.m);
    double s = 0.0, s2 = 0.0;
    for (double x : z) {
        s += x;
        s2 += x * x;
    }
    const double n = static_cast<double>(z.size());
    const double mean = s / n;
    const double var = (s2 - n * mean * mean) / (n - 1.0);
    const double zmean = std::abs(mean) / std::sqrt(var / n);
    const bool ok = zmean <= z_limit && std::abs(var / target_var - 1.0) <= var_band;
    return {ok, "mean " + fmt("%.4f", mean) + " (|z| " + fmt("%.2f", zmean) + "), variance " + fmt("%.4f", var) +
                    ", band [" + fmt("%.2f", target_var * (1.0 - var_band)) + ", " +
                    fmt("%.2f", target_var * (1.0 + var_band)) + "]"};
}

// 11. V_j of ExpExp(1,1) inside the binomial envelopes.
Verdict ac11() {
    constexpr double h = 0.01;
    constexpr double T = 100.0;
    constexpr int jmax = 20;
    constexpr double alpha = 0.0;
    const auto tab = build_tables(JointStepModel::exp_exp(1.0, 1.0), h, T, jmax);
    std::size_t violations = 0, checked = 0;
    for (std::size_t k = 0; k < tab.V.size(); ++k) {
        const double t = tab.V.node(k);
        const auto env = wj_envelopes(1.0 / tab.m, *tab.cL, alpha, jmax, t);
        for (int j = 1; j <= jmax; ++j) {
            const double v = tab.generation(j)[k];
            ++checked;
            if (v < env.lower[static_cast<std::size_t>(j)] || v > env.upper[static_cast<std::size_t>(j)]) ++violations;
        }
    }
    return {violations == 0,
            std::to_string(violations) + " violations over " + std::to_string(checked) + " (node, j) pairs, C = " +
                fmt("%g", *tab.cL)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Verdict()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11};
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: acceptance [--only N]\n");
            return 2;
        }
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i) + 1 != only) continue;
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        std::printf("AC%zu %s %s\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
        if (!v.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
