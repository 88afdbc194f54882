#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "prwlab/dist.hpp"
#include "prwlab/rng.hpp"

namespace prwlab {

enum class PredictionLabel {
    elementary,
    exp_correction,
    second_order,
    third_order,
    ell_power,
    key_renewal,
    blackwell,
};

std::string_view to_string(PredictionLabel label) noexcept;
PredictionLabel parse_label(std::string_view name);

/// Asymptotic predictor stored as sign * exp(log_value).
struct Prediction {
    double log_value;
    int sign = 1;  ///< -1 or 0 only for second-order predictions with negative gamma0
    PredictionLabel label;
    std::map<std::string, double> inputs;

    double value() const;
};

/// t^j / (m^j j!).
Prediction predict_elementary(int j, double t, double m);

/// t^j / (m^j j!) * exp(gamma0 m j^2 / t).
Prediction predict_exp_correction(int j, double t, double m, double gamma0);

/// t^j / (j! m^j) + gamma0 j t^(j-1) / ((j-1)! m^(j-1)).
Prediction predict_second_order(int j, double t, double m, double gamma0);

/// (a t)^j exp(gamma0 j^2 / t + (gamma1 / 2 - gamma0^2) j^3 / t^2), a predictor
/// of E (a t - S_j)_+^j with no factorial.
Prediction predict_third_order(int j, double t, double a, double gamma0, double gamma1);

/// (a t + gamma0 j)_+^j / j!; j = 0 gives the unit step at 0.
double ell_conv_power(double a, double gamma0, int j, double t);
/// Natural log of ell_conv_power (-inf where it vanishes).
double log_ell_conv_power(double a, double gamma0, int j, double t);

struct Envelopes {
    std::vector<double> lower;  ///< index j = 0..jmax
    std::vector<double> upper;
};

/// Explicit binomial-sum bounds on W_j^- and W_j^+:
///   upper_j = a^j t^j / j! + sum_{i<j} C(j,i) a^i C^(j-i) (t+1)^(alpha(j-i)+i) / i!
///   lower_j = (a^j t^j / j! - same sum)_+
/// and both equal 1 at j = 0.
Envelopes wj_envelopes(double a, double C, double alpha, int jmax, double t);

struct McEstimate {
    double estimate;
    double stderr_;
};

/// Monte Carlo mean of (a t - S_j)_+^j / j! where S_j is a sum of j copies of
/// the model's xi (the ladder step).
McEstimate fj_expectation_mc(const JointStepModel& ladder, double a, int j, double t, std::size_t n,
                             RngStream& rng);

/// (integral_f / m) * v_prev_at_t.
double predict_key_renewal(double integral_f, double m, double v_prev_at_t);

/// Key-renewal predictor for (f * V_j)(t) given V_{j-1}(t), as a Prediction.
Prediction predict_key_renewal_log(int j, double t, double integral_f, double m, double v_prev_at_t);

/// Blackwell predictor (h / m) V_{j-1}(t) for V_j(t + h) - V_j(t).
Prediction predict_blackwell(int j, double t, double h, double m, double v_prev_at_t);

struct RatioRecord {
    double ratio;
    double log_gap;
};

RatioRecord compare(double table_value, const Prediction& prediction);

/// log C(n, k) via lgamma.
double log_binomial(int n, int k);

}  // namespace prwlab
