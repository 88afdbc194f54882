#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "prwlab/dist.hpp"
#include "prwlab/grid_function.hpp"

namespace prwlab {

struct RenewalTables {
    std::string model_id;
    double h = 0.0;
    double T = 0.0;
    GridFunction U;
    GridFunction V;
    std::vector<GridFunction> Vj;  ///< Vj[0] is V_1
    double m = 0.0;
    std::optional<double> gamma0;
    std::optional<double> c0;  ///< E xi^2 / m^2
    std::optional<double> cL;  ///< max(c0, E eta / m)
    double xi_tail_mass = 0.0;
    double eta_tail_mass = 0.0;
    std::vector<std::string> warnings;

    /// V_j for j >= 1.
    const GridFunction& generation(int j) const;
};

/// Solves U = 1 + F * U by forward marching. Requires F(0) = 0.
GridFunction renewal_function(const GridFunction& F,
                              StieltjesRule rule = StieltjesRule::atom_aware);

/// V = U * G.
GridFunction perturbed_counting_mean(const GridFunction& U, const GridFunction& G,
                                     StieltjesRule rule = StieltjesRule::atom_aware);

/// [V_1, ..., V_jmax] with V_1 = V and V_j = V_{j-1} * V.
std::vector<GridFunction> iterate_generations(const GridFunction& V, int jmax,
                                              StieltjesRule rule = StieltjesRule::atom_aware);

/// E xi^2 / (2 m^2) - E eta / m.
double gamma0(const MomentReport& report);

struct PlateauReport {
    double value;        ///< V(T) - T/m
    double oscillation;  ///< (max - min) over the last 10% of nodes, relative to max(1, |value|)
    double tolerance;
    bool converged;
};

/// Plateau diagnostic of V(t) - t/m without throwing.
PlateauReport plateau(const GridFunction& V, double m, double tolerance = 1e-3);

/// V(T) - T/m; throws not_converged when the plateau test fails.
PlateauReport gamma0_empirical(const GridFunction& V, double m, double tolerance = 1e-3);

struct BoundReport {
    double tolerance = 1e-9;
    double lorden_max_slack = 0.0;  ///< max of U(t) - t/m - c0
    std::size_t lorden_violations = 0;
    double linear_max_slack = 0.0;  ///< max of |V(t) - t/m| - cL
    std::size_t linear_violations = 0;
    double subadditive_max_slack = 0.0;  ///< max of V(x+y) - V(x) - U(y)
    std::size_t subadditive_violations = 0;
    std::size_t pairs_checked = 0;

    std::size_t violations() const noexcept {
        return lorden_violations + linear_violations + subadditive_violations;
    }
};

/// Checks the three inequalities at every node and every node pair (x, y)
/// with x + y inside the grid. Needs c0 and cL.
BoundReport check_bounds(const RenewalTables& tables, double tolerance = 1e-9);

/// Discretizes the model and builds U, V and V_1..V_jmax on {0, h, ..., T}.
/// Point masses must sit on grid nodes.
RenewalTables build_tables(const JointStepModel& model, double h, double T, int jmax,
                           StieltjesRule rule = StieltjesRule::atom_aware);

}  // namespace prwlab
