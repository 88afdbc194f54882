#include "prwlab/renewal.hpp"

#include <algorithm>
#include <cmath>

#include "prwlab/error.hpp"

namespace prwlab {

const GridFunction& RenewalTables::generation(int j) const {
    if (j < 1 || static_cast<std::size_t>(j) > Vj.size()) {
        throw Error(ErrorKind::domain, "generation " + std::to_string(j) + " is not tabulated (jmax = " +
                                           std::to_string(Vj.size()) + ")");
    }
    return Vj[static_cast<std::size_t>(j - 1)];
}

GridFunction renewal_function(const GridFunction& F, StieltjesRule rule) {
    if (F.origin() != 0) throw Error(ErrorKind::domain, "renewal_function needs a grid starting at 0");
    if (F[0] > 0.0) {
        throw Error(ErrorKind::domain, "F(0) = " + format_double(F[0]) +
                                           " > 0: steps must be positive almost surely");
    }
    const std::size_t n = F.size();
    std::vector<double> a(n, 0.0), b(n, 0.0), atom(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double inc = F.increment(i);
        if (rule == StieltjesRule::right_point) {
            a[i] = inc;
            atom[i] = inc;
        } else {
            atom[i] = F.jump(i);
            a[i] = atom[i] + 0.5 * (inc - atom[i]);
            b[i] = 0.5 * (inc - atom[i]);
        }
    }
    bool has_atoms = false;
    for (std::size_t i = 1; i < n; ++i) has_atoms = has_atoms || atom[i] != 0.0;

    // Atomic part of the renewal measure: jU = delta_0 + jF * jU.
    std::vector<double> ju(n, 0.0);
    ju[0] = 1.0;
    if (has_atoms) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 1; i < n; ++i) {
            if (atom[i] != 0.0) idx.push_back(i);
        }
        for (std::size_t k = 1; k < n; ++k) {
            double s = 0.0;
            for (std::size_t i : idx) {
                if (i > k) break;
                s += atom[i] * ju[k - i];
            }
            ju[k] = s;
        }
    }

    std::vector<double> u(n, 0.0), ulm(n, 0.0);
    const double denom = 1.0 - b[n > 1 ? 1 : 0];
    for (std::size_t k = 0; k < n; ++k) {
        double s = 1.0;
        for (std::size_t i = 1; i <= k; ++i) s += a[i] * u[k - i];
        // left limits at k - i + 1 for i >= 2, i.e. nodes 1..k-1
        for (std::size_t i = 2; i <= k; ++i) s += b[i] * ulm[k - i + 1];
        if (k >= 1) s -= b[1] * ju[k];
        u[k] = k >= 1 ? s / denom : s;
        ulm[k] = u[k] - ju[k];
    }

    GridFunction U(F.step(), std::move(u));
    if (rule == StieltjesRule::atom_aware || has_atoms) U.set_jumps(std::move(ju));
    U.set_monotone_unchecked(U.is_nondecreasing());
    return U;
}

GridFunction perturbed_counting_mean(const GridFunction& U, const GridFunction& G, StieltjesRule rule) {
    return stieltjes_convolve(U, G, rule);
}

std::vector<GridFunction> iterate_generations(const GridFunction& V, int jmax, StieltjesRule rule) {
    return convolution_powers(V, jmax, rule);
}

double gamma0(const MomentReport& report) {
    if (!report.ex2) throw Error(ErrorKind::missing_moment, "gamma0 needs a finite E xi^2");
    if (!report.eeta) throw Error(ErrorKind::missing_moment, "gamma0 needs a finite E eta");
    return *report.ex2 / (2.0 * report.m * report.m) - *report.eeta / report.m;
}

PlateauReport plateau(const GridFunction& V, double m, double tolerance) {
    const std::size_t n = V.size();
    const std::size_t start = n - std::max<std::size_t>(1, n / 10);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = start; k < n; ++k) {
        const double d = V[k] - V.node(k) / m;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const double value = V[n - 1] - V.last_node() / m;
    const double osc = (hi - lo) / std::max(1.0, std::abs(value));
    return {value, osc, tolerance, osc < tolerance};
}

PlateauReport gamma0_empirical(const GridFunction& V, double m, double tolerance) {
    PlateauReport r = plateau(V, m, tolerance);
    if (!r.converged) {
        throw Error(ErrorKind::not_converged,
                    "V(t) - t/m has not settled: relative oscillation " + format_double(r.oscillation) +
                        " over the last 10% of the grid exceeds " + format_double(tolerance));
    }
    return r;
}

BoundReport check_bounds(const RenewalTables& tables, double tolerance) {
    if (!tables.c0 || !tables.cL) {
        throw Error(ErrorKind::missing_moment, "check_bounds needs c0 and cL (finite E xi^2 and E eta)");
    }
    BoundReport r;
    r.tolerance = tolerance;
    const GridFunction& U = tables.U;
    const GridFunction& V = tables.V;
    const double m = tables.m;
    const std::size_t n = std::min(U.size(), V.size());
    r.lorden_max_slack = -INFINITY;
    r.linear_max_slack = -INFINITY;
    r.subadditive_max_slack = -INFINITY;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = U.node(k);
        const double s1 = U[k] - t / m - *tables.c0;
        const double s2 = std::abs(V[k] - t / m) - *tables.cL;
        r.lorden_max_slack = std::max(r.lorden_max_slack, s1);
        r.linear_max_slack = std::max(r.linear_max_slack, s2);
        if (s1 > tolerance) ++r.lorden_violations;
        if (s2 > tolerance) ++r.linear_violations;
    }
    const double* v = V.values().data();
    for (std::size_t y = 0; y < n; ++y) {
        double worst = -INFINITY;
        std::size_t bad = 0;
        const double uy = U[y] + tolerance;
        for (std::size_t x = 0; x + y < n; ++x) {
            const double d = v[x + y] - v[x];
            worst = std::max(worst, d);
            bad += d > uy ? 1 : 0;
        }
        r.subadditive_max_slack = std::max(r.subadditive_max_slack, worst - U[y]);
        r.subadditive_violations += bad;
        r.pairs_checked += n - y;
    }
    return r;
}

RenewalTables build_tables(const JointStepModel& model, double h, double T, int jmax, StieltjesRule rule) {
    if (jmax < 1) throw Error(ErrorKind::domain, "jmax must be at least 1");
    if (!grid_aligned(model, h)) {
        throw Error(ErrorKind::grid_mismatch, "grid step " + format_double(h) + " does not align with the atoms of " +
                                                  model.id());
    }
    DiscretizedMarginals dm = discretize_cdf(model, h, T);
    RenewalTables t{model.id(), h, T, renewal_function(dm.xi_cdf, rule), dm.eta_cdf, {}, 0.0,
                    std::nullopt, std::nullopt, std::nullopt, dm.xi_tail_mass, dm.eta_tail_mass, {}};
    t.V = perturbed_counting_mean(t.U, dm.eta_cdf, rule);
    t.Vj = iterate_generations(t.V, jmax, rule);
    const MomentReport mr = moments(model);
    t.m = mr.m;
    if (mr.ex2 && mr.eeta) {
        t.gamma0 = gamma0(mr);
        t.c0 = *mr.ex2 / (mr.m * mr.m);
        t.cL = std::max(*t.c0, *mr.eeta / mr.m);
    }
    if (t.xi_tail_mass > 1e-12) {
        t.warnings.push_back("P{xi > T} = " + format_double(t.xi_tail_mass) + " exceeds 1e-12");
    }
    if (t.eta_tail_mass > 1e-12) {
        t.warnings.push_back("P{eta > T} = " + format_double(t.eta_tail_mass) + " exceeds 1e-12");
    }
    return t;
}

}  // namespace prwlab
