#include "prwlab/asymp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prwlab/error.hpp"

namespace prwlab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_elementary(int j, double t, double m) {
    return j * std::log(t / m) - std::lgamma(j + 1.0);
}

void require_t(double t) {
    if (!(t > 0.0)) throw Error(ErrorKind::domain, "predictors need t > 0");
}

}  // namespace

std::string_view to_string(PredictionLabel label) noexcept {
    switch (label) {
        case PredictionLabel::elementary: return "elementary";
        case PredictionLabel::exp_correction: return "exp_correction";
        case PredictionLabel::second_order: return "second_order";
        case PredictionLabel::third_order: return "third_order";
        case PredictionLabel::ell_power: return "ell_power";
        case PredictionLabel::key_renewal: return "key_renewal";
        case PredictionLabel::blackwell: return "blackwell";
    }
    return "unknown";
}

PredictionLabel parse_label(std::string_view name) {
    for (auto l : {PredictionLabel::elementary, PredictionLabel::exp_correction,
                   PredictionLabel::second_order, PredictionLabel::third_order, PredictionLabel::ell_power,
                   PredictionLabel::key_renewal, PredictionLabel::blackwell}) {
        if (name == to_string(l)) return l;
    }
    throw Error(ErrorKind::validation, "unknown predictor label '" + std::string(name) + "'");
}

double Prediction::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_value); }

Prediction predict_elementary(int j, double t, double m) {
    require_t(t);
    return {log_elementary(j, t, m), 1, PredictionLabel::elementary, {{"j", j}, {"t", t}, {"m", m}}};
}

Prediction predict_exp_correction(int j, double t, double m, double gamma0) {
    require_t(t);
    const double log_v = log_elementary(j, t, m) + gamma0 * m * j * static_cast<double>(j) / t;
    return {log_v, 1, PredictionLabel::exp_correction, {{"j", j}, {"t", t}, {"m", m}, {"gamma0", gamma0}}};
}

Prediction predict_second_order(int j, double t, double m, double gamma0) {
    require_t(t);
    // second term / first term = gamma0 m j^2 / t
    const double r = gamma0 * m * j * static_cast<double>(j) / t;
    Prediction p{log_elementary(j, t, m), 1, PredictionLabel::second_order,
                 {{"j", j}, {"t", t}, {"m", m}, {"gamma0", gamma0}}};
    if (r > -1.0) {
        p.log_value += std::log1p(r);
    } else if (r == -1.0) {
        p.sign = 0;
        p.log_value = neg_inf;
    } else {
        p.sign = -1;
        p.log_value += std::log(-1.0 - r);
    }
    return p;
}

Prediction predict_third_order(int j, double t, double a, double gamma0, double gamma1) {
    require_t(t);
    const double jd = j;
    const double log_v = jd * std::log(a * t) + gamma0 * jd * jd / t +
                         (gamma1 / 2.0 - gamma0 * gamma0) * jd * jd * jd / (t * t);
    return {log_v, 1, PredictionLabel::third_order,
            {{"j", j}, {"t", t}, {"a", a}, {"gamma0", gamma0}, {"gamma1", gamma1}}};
}

double log_ell_conv_power(double a, double gamma0, int j, double t) {
    if (j < 0) throw Error(ErrorKind::domain, "ell power needs j >= 0");
    if (j == 0) return t >= 0.0 ? 0.0 : neg_inf;
    const double x = a * t + gamma0 * j;
    if (x <= 0.0) return neg_inf;
    return j * std::log(x) - std::lgamma(j + 1.0);
}

double ell_conv_power(double a, double gamma0, int j, double t) {
    const double l = log_ell_conv_power(a, gamma0, j, t);
    return l == neg_inf ? 0.0 : std::exp(l);
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

Envelopes wj_envelopes(double a, double C, double alpha, int jmax, double t) {
    if (!(a > 0.0)) throw Error(ErrorKind::domain, "envelopes need a > 0");
    if (!(C >= 1.0)) throw Error(ErrorKind::domain, "envelopes need C >= 1");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorKind::domain, "envelopes need alpha in [0, 1)");
    if (t < 0.0) throw Error(ErrorKind::domain, "envelopes need t >= 0");
    Envelopes e;
    e.lower.assign(static_cast<std::size_t>(jmax) + 1, 0.0);
    e.upper.assign(static_cast<std::size_t>(jmax) + 1, 0.0);
    e.lower[0] = e.upper[0] = 1.0;
    const double log_t = t > 0.0 ? std::log(t) : neg_inf;
    const double log_t1 = std::log(t + 1.0);
    for (int j = 1; j <= jmax; ++j) {
        const double lead = t > 0.0 ? j * (std::log(a) + log_t) - std::lgamma(j + 1.0) : neg_inf;
        double rest = neg_inf;
        for (int i = 0; i < j; ++i) {
            const double term = log_binomial(j, i) + i * std::log(a) + (j - i) * std::log(C) +
                                (alpha * (j - i) + i) * log_t1 - std::lgamma(i + 1.0);
            rest = log_add(rest, term);
        }
        e.upper[static_cast<std::size_t>(j)] = std::exp(log_add(lead, rest));
        e.lower[static_cast<std::size_t>(j)] = lead > rest ? -std::exp(lead) * std::expm1(rest - lead) : 0.0;
    }
    return e;
}

McEstimate fj_expectation_mc(const JointStepModel& ladder, double a, int j, double t, std::size_t n,
                             RngStream& rng) {
    if (j < 1) throw Error(ErrorKind::domain, "fj_expectation_mc needs j >= 1");
    if (n < 2) throw Error(ErrorKind::domain, "fj_expectation_mc needs n >= 2");
    const double at = a * t;
    // values are exp(j log(at - S) - log j!), rescaled by their maximum (at)^j / j!
    const double log_scale = j * std::log(at) - std::lgamma(j + 1.0);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (int i = 0; i < j; ++i) s += sample_pair(ladder, rng).xi;
        const double x = at - s;
        const double y = x > 0.0 ? std::exp(j * std::log(x) - std::lgamma(j + 1.0) - log_scale) : 0.0;
        const double d = y - mean;
        mean += d / static_cast<double>(r + 1);
        m2 += d * (y - mean);
    }
    const double var = m2 / static_cast<double>(n - 1);
    const double scale = std::exp(log_scale);
    return {mean * scale, std::sqrt(var / static_cast<double>(n)) * scale};
}

double predict_key_renewal(double integral_f, double m, double v_prev_at_t) {
    return integral_f / m * v_prev_at_t;
}

Prediction predict_key_renewal_log(int j, double t, double integral_f, double m, double v_prev_at_t) {
    const double v = predict_key_renewal(integral_f, m, v_prev_at_t);
    Prediction p{v > 0.0 ? std::log(v) : neg_inf, v > 0.0 ? 1 : 0, PredictionLabel::key_renewal,
                 {{"j", j}, {"t", t}, {"m", m}, {"integral_f", integral_f}}};
    return p;
}

Prediction predict_blackwell(int j, double t, double h, double m, double v_prev_at_t) {
    Prediction p = predict_key_renewal_log(j, t, h, m, v_prev_at_t);
    p.label = PredictionLabel::blackwell;
    p.inputs.erase("integral_f");
    p.inputs["h"] = h;
    return p;
}

RatioRecord compare(double table_value, const Prediction& prediction) {
    if (!(table_value > 0.0)) {
        throw Error(ErrorKind::domain, "compare needs a positive table value");
    }
    if (prediction.sign <= 0) {
        throw Error(ErrorKind::domain, "compare needs a positive prediction");
    }
    const double gap = std::log(table_value) - prediction.log_value;
    return {std::exp(gap), gap};
}

}  // namespace prwlab
