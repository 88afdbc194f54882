#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prwlab/grid_function.hpp"
#include "prwlab/rng.hpp"

namespace prwlab {

/// Parametric families for the step pair (xi, eta). `Det` components are
/// point masses; `GEM` is (|log W|, |log(1 - W)|) with W uniform on [0, 1].
enum class Family { gem, exp_exp, det_det, exp_det, pareto_det, uniform_det };

enum class Coupling { independent, comonotone, gem_coupled };

std::string_view to_string(Family family) noexcept;
std::string_view to_string(Coupling coupling) noexcept;
Family parse_family(std::string_view name);
Coupling parse_coupling(std::string_view name);

/// Named parameter, in the canonical order of its family.
struct ModelParam {
    std::string name;
    double value;

    friend bool operator==(const ModelParam&, const ModelParam&) = default;
};

/// Joint law of the step pair. Immutable after construction; every factory
/// validates its parameters.
///
/// Parameter names per family:
///   GEM         (none)
///   ExpExp      lambda_xi, lambda_eta      rates of the exponential marginals
///   DetDet      c_xi, c_eta                point masses
///   ExpDet      lambda_xi, c_eta
///   ParetoDet   r, b, c_eta                P{xi > x} = b x^-r for x >= b^(1/r)
///   UniformDet  a_xi, b_xi, c_eta          xi uniform on [a_xi, b_xi]
class JointStepModel {
public:
    static JointStepModel gem();
    static JointStepModel exp_exp(double lambda_xi, double lambda_eta,
                                  Coupling coupling = Coupling::independent);
    static JointStepModel det_det(double c_xi, double c_eta);
    static JointStepModel exp_det(double lambda_xi, double c_eta);
    static JointStepModel pareto_det(double r, double b, double c_eta);
    static JointStepModel uniform_det(double a_xi, double b_xi, double c_eta);

    /// Builds a model from named parameters; unknown or missing names are
    /// validation errors naming the key.
    static JointStepModel from_params(Family family, const std::vector<ModelParam>& params,
                                      std::optional<Coupling> coupling = std::nullopt);

    Family family() const noexcept { return family_; }
    Coupling coupling() const noexcept { return coupling_; }
    std::vector<ModelParam> params() const;

    /// Human-readable id such as "ExpDet(1, 0.5)".
    std::string id() const;

    /// Law of (c xi, c eta). Not defined for GEM, whose parameters are fixed.
    JointStepModel scaled(double c) const;

    /// Point-mass locations of xi and eta that a grid must resolve exactly.
    std::vector<double> atoms() const;

    /// Raw parameters (meaning depends on family).
    double p0() const noexcept { return p_[0]; }
    double p1() const noexcept { return p_[1]; }
    double p2() const noexcept { return p_[2]; }

    friend bool operator==(const JointStepModel&, const JointStepModel&) = default;

private:
    JointStepModel(Family family, Coupling coupling, double a, double b, double c)
        : family_(family), coupling_(coupling), p_{a, b, c} {}

    Family family_;
    Coupling coupling_;
    double p_[3];
};

struct MomentReport {
    double m = 0.0;  ///< E xi
    std::optional<double> ex2;
    std::optional<double> ex3;
    std::optional<double> eeta;
    std::optional<double> eeta2;
    std::optional<double> s2;  ///< Var xi
    bool lattice = false;
    std::optional<double> lattice_span;
};

struct StepPair {
    double xi;
    double eta;
};

struct LaplaceValues {
    double phi_xi;            ///< E exp(-s xi)
    double phi_eta;           ///< E exp(-s eta)
    double one_minus_phi_xi;  ///< 1 - phi_xi without cancellation
    double log_phi_eta;       ///< log phi_eta without underflow
};

struct DiscretizedMarginals {
    GridFunction xi_cdf;
    GridFunction eta_cdf;
    double xi_tail_mass;   ///< P{xi > T}
    double eta_tail_mass;  ///< P{eta > T}
};

/// Maps two independent uniforms on (0, 1) to a step pair honoring the
/// model's coupling. GEM and comonotone pairs use only `u`.
StepPair pair_from_uniforms(const JointStepModel& model, double u, double v);

StepPair sample_pair(const JointStepModel& model, RngStream& rng);

MomentReport moments(const JointStepModel& model);

/// Analytic Laplace transforms at s > 0.
LaplaceValues laplace(const JointStepModel& model, double s);

double xi_cdf(const JointStepModel& model, double x);
double eta_cdf(const JointStepModel& model, double x);

/// Integral of P{xi > y} over [0, x].
double integrated_tail(const JointStepModel& model, double x);

/// Exact node evaluation of both marginal CDFs on {0, h, ..., T}. Point masses
/// are recorded as jumps at the first node at or beyond their location.
DiscretizedMarginals discretize_cdf(const JointStepModel& model, double h, double T);

/// True when every point mass of the model lies on a node of the step-h grid.
bool grid_aligned(const JointStepModel& model, double h);

/// Draw from the density P{xi > x} / m on (0, inf). Pareto models are not
/// supported.
double sample_stationary_overshoot(const JointStepModel& model, RngStream& rng);

}  // namespace prwlab
