#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "prwlab/dist.hpp"
#include "prwlab/error.hpp"

using namespace prwlab;

namespace {

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

std::vector<JointStepModel> all_families() {
    return {JointStepModel::gem(),
            JointStepModel::exp_exp(1.0, 2.0),
            JointStepModel::exp_exp(0.5, 1.5, Coupling::comonotone),
            JointStepModel::det_det(1.0, 0.5),
            JointStepModel::exp_det(1.0, 0.5),
            JointStepModel::pareto_det(2.5, 1.0, 1.0),
            JointStepModel::pareto_det(1.5, 2.0, 0.3),
            JointStepModel::uniform_det(0.0, 2.0, 0.5),
            JointStepModel::uniform_det(0.5, 1.5, 0.25)};
}

}  // namespace

TEST_SUITE("dist") {

TEST_CASE("degenerate pair is returned verbatim") {
    RngStream rng(7);
    const auto p = sample_pair(JointStepModel::det_det(1.0, 0.5), rng);
    CHECK(p.xi == 1.0);
    CHECK(p.eta == 0.5);
}

TEST_CASE("GEM pair at W = 1/2") {
    const auto p = pair_from_uniforms(JointStepModel::gem(), 0.5, 0.9);
    CHECK(p.xi == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(p.eta == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("GEM coordinates come from one uniform") {
    RngStream rng(derive_seed(3, 0, StreamRole::sampling));
    for (int i = 0; i < 1000; ++i) {
        const auto p = sample_pair(JointStepModel::gem(), rng);
        CHECK(std::exp(-p.xi) + std::exp(-p.eta) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ExpExp(1,1) sample mean within 3 sigma") {
    RngStream rng(derive_seed(11, 0, StreamRole::sampling));
    const auto model = JointStepModel::exp_exp(1.0, 1.0);
    const int n = 1'000'000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sample_pair(model, rng).xi;
    CHECK(std::abs(s / n - 1.0) <= 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("draws are strictly positive") {
    RngStream rng(5);
    for (const auto& m : all_families()) {
        for (int i = 0; i < 20000; ++i) {
            const auto p = sample_pair(m, rng);
            REQUIRE(p.xi > 0.0);
            REQUIRE(p.eta > 0.0);
        }
    }
}

TEST_CASE("analytic moments") {
    const auto g = moments(JointStepModel::gem());
    CHECK(g.m == 1.0);
    CHECK(*g.s2 == 1.0);
    CHECK(*g.eeta == 1.0);
    CHECK_FALSE(g.lattice);

    const auto d = moments(JointStepModel::det_det(1.0, 1.0));
    CHECK(d.m == 1.0);
    CHECK(*d.ex2 == 1.0);
    CHECK(*d.s2 == 0.0);
    CHECK(d.lattice);
    CHECK(*d.lattice_span == 1.0);

    const auto p = moments(JointStepModel::pareto_det(1.5, 1.0, 1.0));
    CHECK_FALSE(p.ex2.has_value());
    CHECK_FALSE(p.s2.has_value());
    CHECK(p.m == doctest::Approx(3.0));
}

TEST_CASE("moments match quadrature of the tail") {
    // E xi^k = k int_0^inf x^{k-1} P{xi > x} dx
    for (const auto& model : {JointStepModel::uniform_det(0.5, 1.5, 0.25), JointStepModel::pareto_det(4.5, 2.0, 1.0)}) {
        const double hi = 400.0;
        auto tail = [&](double x) { return 1.0 - xi_cdf(model, x); };
        const double m = simpson(tail, 0.0, hi, 400000);
        const double e2 = simpson([&](double x) { return 2.0 * x * tail(x); }, 0.0, hi, 400000);
        const double e3 = simpson([&](double x) { return 3.0 * x * x * tail(x); }, 0.0, hi, 400000);
        const auto r = moments(model);
        CHECK(r.m == doctest::Approx(m).epsilon(1e-5));
        CHECK(*r.ex2 == doctest::Approx(e2).epsilon(1e-5));
        CHECK(*r.ex3 == doctest::Approx(e3).epsilon(1e-4));
    }
}

TEST_CASE("Laplace transforms in closed form") {
    const auto e = laplace(JointStepModel::exp_exp(1.0, 1.0), 1.0);
    CHECK(e.phi_xi == doctest::Approx(0.5));
    CHECK(e.phi_eta == doctest::Approx(0.5));

    const double c = 0.7, s = 1.3;
    const auto d = laplace(JointStepModel::det_det(c, c), s);
    CHECK(d.phi_xi == doctest::Approx(std::exp(-s * c)));
    CHECK(d.phi_eta == doctest::Approx(std::exp(-s * c)));
    CHECK(d.one_minus_phi_xi == doctest::Approx(1.0 - std::exp(-s * c)));

    const auto u = laplace(JointStepModel::uniform_det(0.5, 2.0, 1.0), 0.8);
    CHECK(u.phi_xi == doctest::Approx((std::exp(-0.4) - std::exp(-1.6)) / (0.8 * 1.5)).epsilon(1e-13));
}

TEST_CASE("GEM Laplace transform against an integral over W") {
    for (double s : {1.0, 2.5}) {
        const double xi = simpson([&](double w) { return std::pow(w, s); }, 0.0, 1.0, 200000);
        const double eta = simpson([&](double w) { return std::pow(1.0 - w, s); }, 0.0, 1.0, 200000);
        const auto l = laplace(JointStepModel::gem(), s);
        CHECK(l.phi_xi == doctest::Approx(xi).epsilon(1e-9));
        CHECK(l.phi_eta == doctest::Approx(eta).epsilon(1e-9));
    }
    CHECK(laplace(JointStepModel::gem(), 1.0).phi_xi == doctest::Approx(0.5));
}

TEST_CASE("Pareto Laplace transform against quadrature") {
    // xi = xm U^{-1/r} with U uniform
    for (double r : {1.5, 2.0, 3.7}) {
        const auto model = JointStepModel::pareto_det(r, 1.3, 1.0);
        const double xm = std::pow(1.3, 1.0 / r);
        for (double s : {0.05, 0.7, 4.0}) {
            const double oracle = simpson(
                [&](double u) { return u <= 0.0 ? 0.0 : std::exp(-s * xm * std::pow(u, -1.0 / r)); }, 0.0, 1.0,
                400000);
            const auto l = laplace(model, s);
            CHECK(l.phi_xi == doctest::Approx(oracle).epsilon(1e-7));
            CHECK(l.one_minus_phi_xi == doctest::Approx(1.0 - oracle).epsilon(1e-7));
        }
    }
}

TEST_CASE("Laplace transforms lie in (0,1) and decrease in s") {
    for (const auto& m : all_families()) {
        double px = 1.0, pe = 1.0;
        for (double s = 0.01; s < 50.0; s *= 1.5) {
            const auto l = laplace(m, s);
            CHECK(l.phi_xi > 0.0);
            CHECK(l.phi_xi < 1.0);
            CHECK(l.phi_eta > 0.0);
            CHECK(l.phi_eta < 1.0);
            CHECK(l.phi_xi < px);
            CHECK(l.phi_eta < pe);
            CHECK(l.one_minus_phi_xi == doctest::Approx(1.0 - l.phi_xi).epsilon(1e-9));
            px = l.phi_xi;
            pe = l.phi_eta;
        }
    }
}

TEST_CASE("Laplace rejects nonpositive s") {
    CHECK_THROWS_AS(laplace(JointStepModel::gem(), 0.0), Error);
    try {
        laplace(JointStepModel::gem(), -1.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("point masses land on the right nodes") {
    const auto d = discretize_cdf(JointStepModel::det_det(1.0, 0.5), 0.25, 2.0);
    REQUIRE(d.xi_cdf.size() == 9);
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(d.xi_cdf[k] == (k >= 4 ? 1.0 : 0.0));
        CHECK(d.eta_cdf[k] == (k >= 2 ? 1.0 : 0.0));
    }
    CHECK(d.xi_cdf.jump(4) == 1.0);
    CHECK(d.eta_cdf.jump(2) == 1.0);
    CHECK(d.xi_tail_mass == 0.0);
}

TEST_CASE("exponential CDF is evaluated exactly at nodes") {
    const auto d = discretize_cdf(JointStepModel::exp_exp(1.0, 1.0), 1e-3, 10.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < d.xi_cdf.size(); ++k) {
        const double x = static_cast<double>(k) * 1e-3;
        worst = std::max(worst, std::abs(d.xi_cdf[k] - (1.0 - std::exp(-x))));
    }
    CHECK(worst == 0.0);
    CHECK(d.xi_tail_mass == doctest::Approx(std::exp(-10.0)));
}

TEST_CASE("discretized CDFs are monotone and start at zero") {
    for (const auto& m : all_families()) {
        const auto d = discretize_cdf(m, 0.05, 20.0);
        CHECK(d.xi_cdf[0] == 0.0);
        CHECK(d.eta_cdf[0] == 0.0);
        CHECK(d.xi_cdf.is_nondecreasing());
        CHECK(d.eta_cdf.is_nondecreasing());
        CHECK(d.xi_cdf.values().back() <= 1.0);
        CHECK(d.xi_cdf.values().back() + d.xi_tail_mass == doctest::Approx(1.0));
    }
}

TEST_CASE("discretize_cdf rejects bad grids") {
    CHECK_THROWS_AS(discretize_cdf(JointStepModel::gem(), 0.0, 1.0), Error);
    CHECK_THROWS_AS(discretize_cdf(JointStepModel::gem(), 0.1, -1.0), Error);
}

TEST_CASE("empirical moments agree with analytic ones") {
    const int n = 1'000'000;
    for (const auto& m : all_families()) {
        const auto r = moments(m);
        if (!r.s2 || !r.eeta2) continue;
        RngStream rng(derive_seed(99, 0, StreamRole::sampling));
        double sx = 0.0, se = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto p = sample_pair(m, rng);
            sx += p.xi;
            se += p.eta;
        }
        const double var_eta = *r.eeta2 - *r.eeta * *r.eeta;
        CAPTURE(m.id());
        CHECK(std::abs(sx / n - r.m) <= 4.0 * std::sqrt(*r.s2 / n) + 1e-12);
        CHECK(std::abs(se / n - *r.eeta) <= 4.0 * std::sqrt(var_eta / n) + 1e-12);
    }
}

TEST_CASE("stationary overshoot: ExpExp is Exp(1) again") {
    const auto model = JointStepModel::exp_exp(1.0, 3.0);
    RngStream rng(derive_seed(4, 0, StreamRole::overshoot));
    const int n = 1'000'000;
    std::vector<double> x(n);
    for (auto& v : x) v = sample_stationary_overshoot(model, rng);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(static_cast<double>(n)));
    std::sort(x.begin(), x.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double f = 1.0 - std::exp(-x[i]);
        ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    CHECK(ks < 0.002);
}

TEST_CASE("stationary overshoot: DetDet is uniform below c_xi") {
    const auto model = JointStepModel::det_det(1.0, 0.5);
    RngStream rng(derive_seed(5, 0, StreamRole::overshoot));
    const int n = 200000;
    std::vector<double> x(n);
    for (auto& v : x) {
        v = sample_stationary_overshoot(model, rng);
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
    std::sort(x.begin(), x.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) ks = std::max(ks, std::abs(x[i] - (i + 0.5) / n));
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("stationary overshoot: UniformDet matches its tail density") {
    // E S* = E xi^2 / (2m), E S*^2 = E xi^3 / (3m)
    const auto model = JointStepModel::uniform_det(0.5, 2.5, 1.0);
    const auto r = moments(model);
    const double mean = *r.ex2 / (2.0 * r.m);
    const double var = *r.ex3 / (3.0 * r.m) - mean * mean;
    RngStream rng(derive_seed(6, 0, StreamRole::overshoot));
    const int n = 1'000'000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sample_stationary_overshoot(model, rng);
    CHECK(std::abs(s / n - mean) <= 4.0 * std::sqrt(var / n));
}

TEST_CASE("stationary overshoot is not available for Pareto") {
    RngStream rng(1);
    try {
        sample_stationary_overshoot(JointStepModel::pareto_det(1.5, 1.0, 1.0), rng);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unsupported);
    }
}

TEST_CASE("integrated tail against quadrature") {
    for (double x : {0.3, 1.0, 2.2, 7.0}) {
        CHECK(integrated_tail(JointStepModel::det_det(1.0, 0.5), x) == doctest::Approx(std::min(x, 1.0)));
    }
    for (const auto& m : all_families()) {
        if (m.family() == Family::det_det) continue;
        for (double x : {0.3, 1.0, 2.2, 7.0}) {
            const double q = simpson([&](double y) { return 1.0 - xi_cdf(m, y); }, 0.0, x, 200000);
            CAPTURE(m.id());
            CHECK(integrated_tail(m, x) == doctest::Approx(q).epsilon(1e-6));
        }
    }
}

TEST_CASE("parameter validation names the key") {
    try {
        JointStepModel::from_params(Family::exp_exp, {{"lambda_xi", 1.0}});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
        CHECK(std::string(e.what()).find("lambda_eta") != std::string::npos);
    }
    CHECK_THROWS_AS(JointStepModel::from_params(Family::det_det, {{"c_xi", 1.0}, {"c_eta", -1.0}}), Error);
    CHECK_THROWS_AS(JointStepModel::from_params(Family::gem, {{"bogus", 1.0}}), Error);
    CHECK_THROWS_AS(JointStepModel::pareto_det(0.9, 1.0, 1.0), Error);
    CHECK_THROWS_AS(JointStepModel::uniform_det(2.0, 1.0, 1.0), Error);
    CHECK(parse_family("expdet") == Family::exp_det);
    CHECK(parse_coupling("gem_coupled") == Coupling::gem_coupled);
    CHECK_THROWS_AS(parse_family("Weibull"), Error);
}

TEST_CASE("scaling multiplies both coordinates") {
    const auto m = JointStepModel::uniform_det(0.5, 1.5, 0.25);
    const auto s = m.scaled(2.0);
    CHECK(moments(s).m == doctest::Approx(2.0 * moments(m).m));
    CHECK(*moments(s).eeta == doctest::Approx(2.0 * *moments(m).eeta));
    const auto p = JointStepModel::pareto_det(2.5, 1.0, 1.0).scaled(0.5);
    CHECK(moments(p).m == doctest::Approx(0.5 * moments(JointStepModel::pareto_det(2.5, 1.0, 1.0)).m));
    CHECK_THROWS_AS(JointStepModel::gem().scaled(2.0), Error);
}

TEST_CASE("model ids") {
    CHECK(JointStepModel::exp_det(1.0, 0.5).id() == "ExpDet(1, 0.5)");
    CHECK(JointStepModel::gem().id() == "GEM");
    CHECK(grid_aligned(JointStepModel::det_det(1.0, 0.5), 0.25));
    CHECK_FALSE(grid_aligned(JointStepModel::det_det(1.0, 1.0), 0.3));
}

}  // TEST_SUITE
