#include "prwlab/dist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "prwlab/error.hpp"

namespace prwlab {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string short_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(ErrorKind::validation,
                    std::string(name) + " must be a positive real, got " + short_double(x));
    }
}

struct ParamSpec {
    Family family;
    std::vector<const char*> names;
};

const std::vector<ParamSpec>& param_table() {
    static const std::vector<ParamSpec> table = {
        {Family::gem, {}},
        {Family::exp_exp, {"lambda_xi", "lambda_eta"}},
        {Family::det_det, {"c_xi", "c_eta"}},
        {Family::exp_det, {"lambda_xi", "c_eta"}},
        {Family::pareto_det, {"r", "b", "c_eta"}},
        {Family::uniform_det, {"a_xi", "b_xi", "c_eta"}},
    };
    return table;
}

const std::vector<const char*>& names_of(Family f) {
    for (const auto& spec : param_table()) {
        if (spec.family == f) return spec.names;
    }
    throw Error(ErrorKind::validation, "unknown family");
}

double pareto_xm(const JointStepModel& m) { return std::pow(m.p1(), 1.0 / m.p0()); }

// Upper incomplete gamma for any real a and y > 0, by upward recursion to a
// nonnegative order followed by the downward three-term relation.
double upper_gamma_any(double a, double y) {
    int n = 0;
    while (a + n < 0.0) ++n;
    double top = a + n;
    double g;
    if (top == 0.0) {
        g = boost::math::expint(1, y);
    } else {
        g = boost::math::tgamma(top, y);
    }
    for (int i = n - 1; i >= 0; --i) {
        const double ai = a + i;
        g = (g - std::pow(y, ai) * std::exp(-y)) / ai;
    }
    return g;
}

struct Transform {
    double phi;
    double one_minus;
    double log_phi;
};

Transform exp_transform(double lambda, double s) {
    return {lambda / (lambda + s), s / (lambda + s), -std::log1p(s / lambda)};
}

Transform det_transform(double c, double s) {
    return {std::exp(-s * c), -std::expm1(-s * c), -s * c};
}

Transform uniform_transform(double a, double b, double s) {
    const double d = b - a;
    const double sd = s * d;
    double g;            // (1 - e^{-sd}) / (sd)
    double one_minus_g;  // 1 - g
    if (sd < 1e-4) {
        g = 1.0 - sd / 2.0 + sd * sd / 6.0 - sd * sd * sd / 24.0;
        one_minus_g = sd / 2.0 - sd * sd / 6.0 + sd * sd * sd / 24.0;
    } else {
        g = -std::expm1(-sd) / sd;
        one_minus_g = 1.0 - g;
    }
    const double ea = std::exp(-s * a);
    const double phi = ea * g;
    const double one_minus = -std::expm1(-s * a) + ea * one_minus_g;
    return {phi, one_minus, -s * a + std::log(g)};
}

Transform pareto_transform(double r, double xm, double s) {
    const double y = s * xm;
    if (y > 700.0) return {0.0, 1.0, -std::numeric_limits<double>::infinity()};
    // 1 - E e^{-s xi} = s * int_0^inf e^{-sx} P{xi > x} dx
    //                = (1 - e^{-y}) + y^r Gamma(1 - r, y), a sum of positive terms.
    const double one_minus = -std::expm1(-y) + std::pow(y, r) * upper_gamma_any(1.0 - r, y);
    const double phi = r * std::pow(y, r) * upper_gamma_any(-r, y);
    return {phi, one_minus, std::log(phi)};
}

Transform xi_transform(const JointStepModel& m, double s) {
    switch (m.family()) {
        case Family::gem: return exp_transform(1.0, s);
        case Family::exp_exp:
        case Family::exp_det: return exp_transform(m.p0(), s);
        case Family::det_det: return det_transform(m.p0(), s);
        case Family::pareto_det: return pareto_transform(m.p0(), pareto_xm(m), s);
        case Family::uniform_det: return uniform_transform(m.p0(), m.p1(), s);
    }
    throw Error(ErrorKind::validation, "unknown family");
}

Transform eta_transform(const JointStepModel& m, double s) {
    switch (m.family()) {
        case Family::gem: return exp_transform(1.0, s);
        case Family::exp_exp: return exp_transform(m.p1(), s);
        case Family::det_det:
        case Family::exp_det: return det_transform(m.p1(), s);
        case Family::pareto_det:
        case Family::uniform_det: return det_transform(m.p2(), s);
    }
    throw Error(ErrorKind::validation, "unknown family");
}

double eta_point(const JointStepModel& m) {
    switch (m.family()) {
        case Family::det_det:
        case Family::exp_det: return m.p1();
        case Family::pareto_det:
        case Family::uniform_det: return m.p2();
        default: return std::nan("");
    }
}

bool eta_is_point(const JointStepModel& m) { return !std::isnan(eta_point(m)); }

// P{xi > x} for the diffuse families.
double xi_survival(const JointStepModel& m, double x) {
    if (x < 0.0) return 1.0;
    switch (m.family()) {
        case Family::gem: return std::exp(-x);
        case Family::exp_exp:
        case Family::exp_det: return std::exp(-m.p0() * x);
        case Family::det_det: return x < m.p0() ? 1.0 : 0.0;
        case Family::pareto_det: {
            const double xm = pareto_xm(m);
            return x < xm ? 1.0 : m.p1() * std::pow(x, -m.p0());
        }
        case Family::uniform_det: {
            const double a = m.p0(), b = m.p1();
            if (x <= a) return 1.0;
            if (x >= b) return 0.0;
            return (b - x) / (b - a);
        }
    }
    return 0.0;
}

std::size_t atom_node(double c, double h) {
    return static_cast<std::size_t>(std::ceil(c / h - 1e-9));
}

}  // namespace

std::string_view to_string(Family family) noexcept {
    switch (family) {
        case Family::gem: return "GEM";
        case Family::exp_exp: return "ExpExp";
        case Family::det_det: return "DetDet";
        case Family::exp_det: return "ExpDet";
        case Family::pareto_det: return "ParetoDet";
        case Family::uniform_det: return "UniformDet";
    }
    return "unknown";
}

std::string_view to_string(Coupling coupling) noexcept {
    switch (coupling) {
        case Coupling::independent: return "independent";
        case Coupling::comonotone: return "comonotone";
        case Coupling::gem_coupled: return "gem-coupled";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    const std::string key = lower(name);
    for (const auto& spec : param_table()) {
        if (lower(to_string(spec.family)) == key) return spec.family;
    }
    throw Error(ErrorKind::validation, "model.family: unknown family '" + std::string(name) + "'");
}

Coupling parse_coupling(std::string_view name) {
    std::string key = lower(name);
    std::replace(key.begin(), key.end(), '_', '-');
    for (Coupling c : {Coupling::independent, Coupling::comonotone, Coupling::gem_coupled}) {
        if (key == to_string(c)) return c;
    }
    throw Error(ErrorKind::validation, "model.coupling: unknown coupling '" + std::string(name) + "'");
}

JointStepModel JointStepModel::gem() {
    return JointStepModel(Family::gem, Coupling::gem_coupled, 0.0, 0.0, 0.0);
}

JointStepModel JointStepModel::exp_exp(double lambda_xi, double lambda_eta, Coupling coupling) {
    require_positive(lambda_xi, "lambda_xi");
    require_positive(lambda_eta, "lambda_eta");
    if (coupling == Coupling::gem_coupled) {
        throw Error(ErrorKind::validation, "model.coupling: gem-coupled is reserved for GEM");
    }
    return JointStepModel(Family::exp_exp, coupling, lambda_xi, lambda_eta, 0.0);
}

JointStepModel JointStepModel::det_det(double c_xi, double c_eta) {
    require_positive(c_xi, "c_xi");
    require_positive(c_eta, "c_eta");
    return JointStepModel(Family::det_det, Coupling::independent, c_xi, c_eta, 0.0);
}

JointStepModel JointStepModel::exp_det(double lambda_xi, double c_eta) {
    require_positive(lambda_xi, "lambda_xi");
    require_positive(c_eta, "c_eta");
    return JointStepModel(Family::exp_det, Coupling::independent, lambda_xi, c_eta, 0.0);
}

JointStepModel JointStepModel::pareto_det(double r, double b, double c_eta) {
    require_positive(r, "r");
    require_positive(b, "b");
    require_positive(c_eta, "c_eta");
    if (r <= 1.0) throw Error(ErrorKind::validation, "r must exceed 1 for a finite mean");
    return JointStepModel(Family::pareto_det, Coupling::independent, r, b, c_eta);
}

JointStepModel JointStepModel::uniform_det(double a_xi, double b_xi, double c_eta) {
    if (!(a_xi >= 0.0) || !std::isfinite(a_xi)) {
        throw Error(ErrorKind::validation, "a_xi must be nonnegative");
    }
    require_positive(b_xi, "b_xi");
    require_positive(c_eta, "c_eta");
    if (!(b_xi > a_xi)) throw Error(ErrorKind::validation, "b_xi must exceed a_xi");
    return JointStepModel(Family::uniform_det, Coupling::independent, a_xi, b_xi, c_eta);
}

JointStepModel JointStepModel::from_params(Family family, const std::vector<ModelParam>& params,
                                           std::optional<Coupling> coupling) {
    const auto& names = names_of(family);
    for (const auto& p : params) {
        if (std::find_if(names.begin(), names.end(), [&](const char* n) { return p.name == n; }) ==
            names.end()) {
            throw Error(ErrorKind::validation, "model.params." + p.name + ": unknown parameter for " +
                                                   std::string(to_string(family)));
        }
    }
    double v[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = std::find_if(params.begin(), params.end(),
                               [&](const ModelParam& p) { return p.name == names[i]; });
        if (it == params.end()) {
            throw Error(ErrorKind::validation,
                        std::string("model.params.") + names[i] + ": missing parameter");
        }
        v[i] = it->value;
    }
    auto wrap = [&](auto&& make) {
        try {
            return make();
        } catch (const Error& e) {
            throw Error(ErrorKind::validation, std::string("model.params: ") + e.what());
        }
    };
    if (family == Family::gem) {
        if (coupling && *coupling != Coupling::gem_coupled) {
            throw Error(ErrorKind::validation, "model.coupling: GEM is always gem-coupled");
        }
        return gem();
    }
    if (coupling && *coupling == Coupling::gem_coupled) {
        throw Error(ErrorKind::validation, "model.coupling: gem-coupled is reserved for GEM");
    }
    switch (family) {
        case Family::exp_exp:
            return wrap([&] { return exp_exp(v[0], v[1], coupling.value_or(Coupling::independent)); });
        case Family::det_det: return wrap([&] { return det_det(v[0], v[1]); });
        case Family::exp_det: return wrap([&] { return exp_det(v[0], v[1]); });
        case Family::pareto_det: return wrap([&] { return pareto_det(v[0], v[1], v[2]); });
        case Family::uniform_det: return wrap([&] { return uniform_det(v[0], v[1], v[2]); });
        default: break;
    }
    throw Error(ErrorKind::validation, "unknown family");
}

std::vector<ModelParam> JointStepModel::params() const {
    const auto& names = names_of(family_);
    std::vector<ModelParam> out;
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back({names[i], p_[i]});
    return out;
}

std::string JointStepModel::id() const {
    std::string s(to_string(family_));
    const auto ps = params();
    if (ps.empty()) return s;
    s += '(';
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) s += ", ";
        s += short_double(ps[i].value);
    }
    if (coupling_ == Coupling::comonotone) s += ", comonotone";
    s += ')';
    return s;
}

JointStepModel JointStepModel::scaled(double c) const {
    require_positive(c, "scale");
    switch (family_) {
        case Family::gem:
            throw Error(ErrorKind::unsupported, "GEM has no scaled variant inside its family");
        case Family::exp_exp: return exp_exp(p_[0] / c, p_[1] / c, coupling_);
        case Family::det_det: return det_det(c * p_[0], c * p_[1]);
        case Family::exp_det: return exp_det(p_[0] / c, c * p_[1]);
        case Family::pareto_det: return pareto_det(p_[0], p_[1] * std::pow(c, p_[0]), c * p_[2]);
        case Family::uniform_det: return uniform_det(c * p_[0], c * p_[1], c * p_[2]);
    }
    throw Error(ErrorKind::validation, "unknown family");
}

std::vector<double> JointStepModel::atoms() const {
    switch (family_) {
        case Family::det_det: return {p_[0], p_[1]};
        case Family::exp_det: return {p_[1]};
        case Family::pareto_det:
        case Family::uniform_det: return {p_[2]};
        default: return {};
    }
}

StepPair pair_from_uniforms(const JointStepModel& model, double u, double v) {
    switch (model.family()) {
        case Family::gem: return {-std::log(u), -std::log1p(-u)};
        case Family::exp_exp: {
            const double w = model.coupling() == Coupling::comonotone ? u : v;
            return {-std::log(u) / model.p0(), -std::log(w) / model.p1()};
        }
        case Family::det_det: return {model.p0(), model.p1()};
        case Family::exp_det: return {-std::log(u) / model.p0(), model.p1()};
        case Family::pareto_det: return {pareto_xm(model) * std::pow(u, -1.0 / model.p0()), model.p2()};
        case Family::uniform_det:
            return {model.p0() + (model.p1() - model.p0()) * u, model.p2()};
    }
    return {0.0, 0.0};
}

StepPair sample_pair(const JointStepModel& model, RngStream& rng) {
    switch (model.family()) {
        case Family::det_det: return {model.p0(), model.p1()};
        case Family::exp_exp:
            if (model.coupling() == Coupling::independent) {
                const double u = rng.uniform();
                return pair_from_uniforms(model, u, rng.uniform());
            }
            [[fallthrough]];
        default: return pair_from_uniforms(model, rng.uniform(), 0.5);
    }
}

MomentReport moments(const JointStepModel& model) {
    MomentReport r;
    const double a = model.p0(), b = model.p1(), c = model.p2();
    auto exp_moments = [&](double lambda) {
        r.m = 1.0 / lambda;
        r.ex2 = 2.0 / (lambda * lambda);
        r.ex3 = 6.0 / (lambda * lambda * lambda);
    };
    auto eta_exp = [&](double lambda) {
        r.eeta = 1.0 / lambda;
        r.eeta2 = 2.0 / (lambda * lambda);
    };
    auto eta_det = [&](double ce) {
        r.eeta = ce;
        r.eeta2 = ce * ce;
    };
    switch (model.family()) {
        case Family::gem:
            exp_moments(1.0);
            eta_exp(1.0);
            break;
        case Family::exp_exp:
            exp_moments(a);
            eta_exp(b);
            break;
        case Family::det_det:
            r.m = a;
            r.ex2 = a * a;
            r.ex3 = a * a * a;
            eta_det(b);
            r.lattice = true;
            r.lattice_span = a;
            break;
        case Family::exp_det:
            exp_moments(a);
            eta_det(b);
            break;
        case Family::pareto_det: {
            const double xm = pareto_xm(model);
            r.m = xm * a / (a - 1.0);
            if (a > 2.0) r.ex2 = xm * xm * a / (a - 2.0);
            if (a > 3.0) r.ex3 = xm * xm * xm * a / (a - 3.0);
            eta_det(c);
            break;
        }
        case Family::uniform_det:
            r.m = 0.5 * (a + b);
            r.ex2 = (a * a + a * b + b * b) / 3.0;
            r.ex3 = (a + b) * (a * a + b * b) / 4.0;
            eta_det(c);
            break;
    }
    if (r.ex2) r.s2 = std::max(0.0, *r.ex2 - r.m * r.m);
    return r;
}

LaplaceValues laplace(const JointStepModel& model, double s) {
    if (!(s > 0.0)) {
        throw Error(ErrorKind::domain, "Laplace argument must be positive, got " + short_double(s));
    }
    const Transform x = xi_transform(model, s);
    const Transform e = eta_transform(model, s);
    return {x.phi, e.phi, x.one_minus, e.log_phi};
}

double xi_cdf(const JointStepModel& model, double x) {
    if (x < 0.0) return 0.0;
    switch (model.family()) {
        case Family::gem: return 1.0 - std::exp(-x);
        case Family::exp_exp:
        case Family::exp_det: return 1.0 - std::exp(-model.p0() * x);
        default: return 1.0 - xi_survival(model, x);
    }
}

double eta_cdf(const JointStepModel& model, double x) {
    if (x < 0.0) return 0.0;
    switch (model.family()) {
        case Family::gem: return 1.0 - std::exp(-x);
        case Family::exp_exp: return 1.0 - std::exp(-model.p1() * x);
        default: return x >= eta_point(model) ? 1.0 : 0.0;
    }
}

double integrated_tail(const JointStepModel& model, double x) {
    if (x <= 0.0) return 0.0;
    const double a = model.p0(), b = model.p1();
    switch (model.family()) {
        case Family::gem: return -std::expm1(-x);
        case Family::exp_exp:
        case Family::exp_det: return -std::expm1(-a * x) / a;
        case Family::det_det: return std::min(x, a);
        case Family::pareto_det: {
            const double xm = pareto_xm(model);
            if (x <= xm) return x;
            return xm + b * (std::pow(x, 1.0 - a) - std::pow(xm, 1.0 - a)) / (1.0 - a);
        }
        case Family::uniform_det: {
            if (x <= a) return x;
            if (x >= b) return 0.5 * (a + b);
            const double d = b - a;
            return a + (d * d - (b - x) * (b - x)) / (2.0 * d);
        }
    }
    return 0.0;
}

DiscretizedMarginals discretize_cdf(const JointStepModel& model, double h, double T) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw Error(ErrorKind::domain, "grid step h must be positive, got " + short_double(h));
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw Error(ErrorKind::domain, "horizon T must be positive, got " + short_double(T));
    }
    if (T < h) throw Error(ErrorKind::domain, "horizon T must be at least h");
    const auto n = static_cast<std::size_t>(std::floor(T / h + 1e-9)) + 1;

    auto build = [&](bool xi) {
        std::vector<double> vals(n), jumps(n, 0.0);
        const bool point = xi ? model.family() == Family::det_det
                              : eta_is_point(model);
        if (point) {
            const double c = xi ? model.p0() : eta_point(model);
            const std::size_t k0 = atom_node(c, h);
            for (std::size_t k = 0; k < n; ++k) vals[k] = k >= k0 ? 1.0 : 0.0;
            if (k0 < n) jumps[k0] = 1.0;
        } else {
            for (std::size_t k = 0; k < n; ++k) {
                const double x = static_cast<double>(k) * h;
                vals[k] = xi ? xi_cdf(model, x) : eta_cdf(model, x);
            }
        }
        GridFunction g(h, std::move(vals));
        g.set_jumps(std::move(jumps));
        g.mark_monotone();
        return g;
    };

    GridFunction F = build(true);
    GridFunction G = build(false);
    const double xi_tail = 1.0 - F[n - 1];
    const double eta_tail = 1.0 - G[n - 1];
    double xi_tail_exact = xi_tail, eta_tail_exact = eta_tail;
    const double tl = F.last_node();
    switch (model.family()) {
        case Family::gem: xi_tail_exact = eta_tail_exact = std::exp(-tl); break;
        case Family::exp_exp:
            xi_tail_exact = std::exp(-model.p0() * tl);
            eta_tail_exact = std::exp(-model.p1() * tl);
            break;
        case Family::exp_det: xi_tail_exact = std::exp(-model.p0() * tl); break;
        case Family::pareto_det: xi_tail_exact = xi_survival(model, tl); break;
        default: break;
    }
    return {std::move(F), std::move(G), xi_tail_exact, eta_tail_exact};
}

bool grid_aligned(const JointStepModel& model, double h) {
    for (double c : model.atoms()) {
        const double x = c / h;
        if (std::abs(x - std::round(x)) > 1e-9 * std::max(1.0, x)) return false;
    }
    return true;
}

double sample_stationary_overshoot(const JointStepModel& model, RngStream& rng) {
    const double w = rng.uniform();
    switch (model.family()) {
        case Family::gem: return -std::log(w);
        case Family::exp_exp:
        case Family::exp_det: return -std::log(w) / model.p0();
        case Family::det_det: return model.p0() * (1.0 - w);
        case Family::uniform_det: {
            const double a = model.p0(), b = model.p1();
            const double m = 0.5 * (a + b);
            const double x = w * m;
            if (x <= a) return x;
            const double d = b - a;
            return b - std::sqrt(std::max(0.0, d * d - 2.0 * d * (x - a)));
        }
        case Family::pareto_det:
            throw Error(ErrorKind::unsupported,
                        "stationary overshoot sampling is not implemented for ParetoDet");
    }
    throw Error(ErrorKind::unsupported, "unknown family");
}

}  // namespace prwlab
