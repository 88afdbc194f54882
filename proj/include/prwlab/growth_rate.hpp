#pragma once

#include "prwlab/dist.hpp"

namespace prwlab {

struct MuResult {
    double value;       ///< mu(z)
    double log_value;   ///< log mu(z), finite even when mu underflows
    double minimizer;   ///< s attaining the infimum (within the search range)
    bool unimodal;      ///< false when the coarse scan saw several local minima
};

/// mu(z) = inf_{s > 0} e^{zs} E e^{-s eta} / (1 - E e^{-s xi}), with s
/// searched on [1e-6, 1e6] in log scale: a 64-point scan followed by
/// golden-section refinement.
MuResult mu_detail(const JointStepModel& model, double z);

double mu(const JointStepModel& model, double z);

struct GammaResult {
    double gamma;
    double mu_at_gamma;
    double inner_minimizer_s;
    double bracket_lo;  ///< mu(lo) < 1
    double bracket_hi;  ///< mu(hi) >= 1
    int iterations;
    bool unimodal;
};

/// gamma = sup{z > 0 : mu(z) < 1} by bisection after geometric bracketing
/// from z = 1.
GammaResult gamma_rate(const JointStepModel& model, double tolerance = 1e-8);

}  // namespace prwlab
