#include "prwlab/growth_rate.hpp"

#include <array>
#include <cmath>

#include "prwlab/error.hpp"

namespace prwlab {

namespace {

constexpr double log_s_lo = -13.815510557964274;  // log 1e-6
constexpr double log_s_hi = 13.815510557964274;

double objective(const JointStepModel& model, double z, double x) {
    const double s = std::exp(x);
    const LaplaceValues lv = laplace(model, s);
    return z * s + lv.log_phi_eta - std::log(lv.one_minus_phi_xi);
}

}  // namespace

MuResult mu_detail(const JointStepModel& model, double z) {
    if (!(z > 0.0)) throw Error(ErrorKind::domain, "mu needs z > 0");
    constexpr int n = 64;
    std::array<double, n> xs{}, fs{};
    int best = 0;
    for (int i = 0; i < n; ++i) {
        xs[i] = log_s_lo + (log_s_hi - log_s_lo) * i / (n - 1);
        fs[i] = objective(model, z, xs[i]);
        if (fs[i] < fs[best]) best = i;
    }
    int minima = 0;
    for (int i = 1; i + 1 < n; ++i) {
        if (fs[i] < fs[i - 1] && fs[i] < fs[i + 1]) ++minima;
    }

    double a = xs[best > 0 ? best - 1 : 0];
    double b = xs[best + 1 < n ? best + 1 : n - 1];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = objective(model, z, c);
    double fd = objective(model, z, d);
    while (b - a > 1e-10 * std::max(1.0, std::abs(a))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = objective(model, z, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = objective(model, z, d);
        }
    }
    double x = 0.5 * (a + b);
    double f = objective(model, z, x);
    if (fs[best] < f) {
        x = xs[best];
        f = fs[best];
    }
    return {std::exp(f), f, std::exp(x), minima <= 1};
}

double mu(const JointStepModel& model, double z) { return mu_detail(model, z).value; }

GammaResult gamma_rate(const JointStepModel& model, double tolerance) {
    if (!(tolerance > 0.0)) throw Error(ErrorKind::domain, "gamma_rate needs a positive tolerance");
    double lo = 1.0, hi = 1.0;
    int it = 0;
    if (mu_detail(model, 1.0).log_value < 0.0) {
        while (mu_detail(model, hi).log_value < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++it > 200) {
                throw Error(ErrorKind::bracket_failure, "mu(z) stays below 1 up to z = 2^200 for " + model.id());
            }
        }
    } else {
        while (mu_detail(model, lo).log_value >= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (++it > 200) {
                throw Error(ErrorKind::bracket_failure, "mu(z) stays above 1 down to z = 2^-200 for " + model.id());
            }
        }
    }
    const double blo = lo, bhi = hi;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mu_detail(model, mid).log_value < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++it;
    }
    const double g = 0.5 * (lo + hi);
    const MuResult at = mu_detail(model, g);
    return {g, at.value, at.minimizer, blo, bhi, it, at.unimodal};
}

}  // namespace prwlab
