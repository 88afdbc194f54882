#include "prwlab/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "prwlab/error.hpp"

namespace prwlab {

namespace {

void require_same_step(const GridFunction& a, const GridFunction& b) {
    if (std::abs(a.step() - b.step()) > 1e-12 * std::max(a.step(), b.step())) {
        throw Error(ErrorKind::grid_mismatch, "grid steps differ: " + format_double(a.step()) +
                                                  " vs " + format_double(b.step()));
    }
}

// Split v's increments into the weight on u(k - i) and on the left limit
// u((k - i + 1)-).
void quadrature_weights(const GridFunction& v, std::size_t n, StieltjesRule rule,
                        std::vector<double>& a, std::vector<double>& b) {
    a.assign(n, 0.0);
    b.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double inc = v.increment(i);
        if (rule == StieltjesRule::right_point || i == 0) {
            a[i] = inc;
            continue;
        }
        const double atom = v.jump(i);
        const double diffuse = inc - atom;
        a[i] = atom + 0.5 * diffuse;
        b[i] = 0.5 * diffuse;
    }
}

}  // namespace

GridFunction::GridFunction(double step, std::vector<double> values, std::int64_t origin,
                           double below)
    : step_(step), values_(std::move(values)), origin_(origin), below_(below) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
        throw Error(ErrorKind::domain, "grid step must be positive, got " + format_double(step));
    }
    if (values_.empty()) throw Error(ErrorKind::domain, "grid function needs at least one node");
}

GridFunction GridFunction::heaviside(double step, std::size_t count, std::int64_t origin) {
    if (origin > 0) throw Error(ErrorKind::domain, "heaviside grid must contain 0");
    std::vector<double> v(count, 0.0);
    const auto zero = static_cast<std::size_t>(-origin);
    if (zero >= count) throw Error(ErrorKind::domain, "heaviside grid must contain 0");
    std::fill(v.begin() + static_cast<std::ptrdiff_t>(zero), v.end(), 1.0);
    std::vector<double> jumps(count, 0.0);
    jumps[zero] = 1.0;
    GridFunction g(step, std::move(v), origin);
    g.set_jumps(std::move(jumps));
    g.monotone_ = true;
    return g;
}

GridFunction& GridFunction::set_jumps(std::vector<double> jumps) {
    if (jumps.size() != values_.size()) {
        throw Error(ErrorKind::domain, "jump vector length differs from value vector");
    }
    jumps_ = std::move(jumps);
    return *this;
}

std::optional<std::size_t> GridFunction::try_index_of(double t) const noexcept {
    const double x = t / step_ - static_cast<double>(origin_);
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) return std::nullopt;
    if (r < 0.0 || r > static_cast<double>(values_.size() - 1)) return std::nullopt;
    return static_cast<std::size_t>(r);
}

std::size_t GridFunction::index_of(double t) const {
    if (auto k = try_index_of(t)) return *k;
    throw Error(ErrorKind::domain, "point " + format_double(t) + " is not a node of the grid [" +
                                       format_double(first_node()) + ", " +
                                       format_double(last_node()) + "] with step " +
                                       format_double(step_));
}

double GridFunction::eval(double x) const noexcept {
    const double pos = x / step_ - static_cast<double>(origin_);
    if (pos < -1e-9) return below_;
    const double last = static_cast<double>(values_.size() - 1);
    if (pos >= last - 1e-9) return values_.back();
    double kf = std::floor(pos + 1e-9);
    if (kf < 0.0) kf = 0.0;
    const auto k = static_cast<std::size_t>(kf);
    const double frac = std::max(0.0, pos - kf);
    if (frac < 1e-9) return values_[k];
    return values_[k] + frac * (left_limit(k + 1) - values_[k]);
}

bool GridFunction::is_nondecreasing() const noexcept {
    if (values_[0] < below_) return false;
    for (std::size_t k = 1; k < values_.size(); ++k) {
        if (values_[k] < values_[k - 1]) return false;
    }
    return true;
}

GridFunction& GridFunction::mark_monotone() {
    if (!is_nondecreasing()) throw Error(ErrorKind::domain, "function is not nondecreasing");
    monotone_ = true;
    return *this;
}

void GridFunction::write_csv(std::ostream& out) const {
    out << "t,value\n";
    for (std::size_t k = 0; k < values_.size(); ++k) {
        out << format_double(node(k)) << ',' << format_double(values_[k]) << '\n';
    }
}

bool operator==(const GridFunction& a, const GridFunction& b) {
    if (a.step_ != b.step_ || a.origin_ != b.origin_ || a.below_ != b.below_ ||
        a.values_ != b.values_) {
        return false;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.jump(k) != b.jump(k)) return false;
    }
    return true;
}

GridFunction stieltjes_convolve(const GridFunction& u, const GridFunction& v, StieltjesRule rule) {
    require_same_step(u, v);
    if (u.below() != 0.0) {
        throw Error(ErrorKind::domain, "left factor must vanish below its first node");
    }
    const std::size_t n = std::min(u.size(), v.size());

    std::vector<double> a, b;
    quadrature_weights(v, n, rule, a, b);

    std::vector<double> ulm(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) ulm[k] = u.left_limit(k);

    std::vector<double> w(n, 0.0);
    const double* uv = u.values().data();
    for (std::size_t i = 0; i < n; ++i) {
        const double ai = a[i];
        const double bi = b[i];
        if (ai == 0.0 && bi == 0.0) continue;
        double* wp = w.data() + i;
        const std::size_t len = n - i;
        if (bi == 0.0) {
            for (std::size_t k = 0; k < len; ++k) wp[k] += ai * uv[k];
        } else {
            const double* lp = ulm.data() + 1;
            for (std::size_t k = 0; k < len; ++k) wp[k] += ai * uv[k] + bi * lp[k];
        }
    }

    // Atoms of the result come only from atom * atom.
    std::vector<std::size_t> u_atoms, v_atoms;
    for (std::size_t k = 0; k < n; ++k) {
        if (u.jump(k) != 0.0) u_atoms.push_back(k);
        if (v.jump(k) != 0.0) v_atoms.push_back(k);
    }
    std::vector<double> jw(n, 0.0);
    for (std::size_t i : v_atoms) {
        for (std::size_t k : u_atoms) {
            if (i + k >= n) break;
            jw[i + k] += u.jump(k) * v.jump(i);
        }
    }

    GridFunction out(u.step(), std::move(w), u.origin() + v.origin());
    out.set_jumps(std::move(jw));
    out.set_monotone_unchecked(u.monotone() && v.monotone());
    return out;
}

GridFunction convolution_power(const GridFunction& v, int j, StieltjesRule rule) {
    if (j < 0) throw Error(ErrorKind::domain, "convolution power must be nonnegative");
    if (j == 0) return GridFunction::heaviside(v.step(), v.size(), std::min<std::int64_t>(0, v.origin()));
    GridFunction acc = v;
    for (int i = 2; i <= j; ++i) acc = stieltjes_convolve(acc, v, rule);
    return acc;
}

std::vector<GridFunction> convolution_powers(const GridFunction& v, int jmax, StieltjesRule rule) {
    if (jmax < 1) throw Error(ErrorKind::domain, "jmax must be at least 1");
    std::vector<GridFunction> out;
    out.reserve(static_cast<std::size_t>(jmax));
    out.push_back(v);
    for (int i = 2; i <= jmax; ++i) out.push_back(stieltjes_convolve(out.back(), v, rule));
    return out;
}

double total_variation(const GridFunction& u, double lo, double hi) {
    if (hi < lo) throw Error(ErrorKind::domain, "total_variation needs lo <= hi");
    const std::size_t khi = u.index_of(hi);
    // lo below the grid takes in the increment at the first node
    const bool from_below = lo < u.first_node() - 1e-9 * u.step();
    const std::size_t kstart = from_below ? 0 : u.index_of(lo) + 1;
    double tv = 0.0;
    for (std::size_t k = kstart; k <= khi; ++k) {
        const double atom = u.jump(k);
        const double diffuse = u.increment(k) - atom;
        tv += std::abs(atom) + std::abs(diffuse);
    }
    return tv;
}

double convolve_dri(const GridFunction& f, const GridFunction& v, double t, StieltjesRule rule) {
    require_same_step(f, v);
    if (f.origin() != 0) throw Error(ErrorKind::domain, "dRi surrogate must start at 0");
    if (v.origin() != 0) throw Error(ErrorKind::domain, "integrator grid must start at 0");
    const std::size_t k = v.index_of(t);
    auto fval = [&](std::size_t idx) { return idx < f.size() ? f[idx] : 0.0; };
    auto flm = [&](std::size_t idx) { return idx < f.size() ? f.left_limit(idx) : 0.0; };
    double sum = 0.0;
    const std::size_t nv = v.size();
    for (std::size_t i = 0; i <= k && i < nv; ++i) {
        const double inc = v.increment(i);
        if (rule == StieltjesRule::right_point || i == 0) {
            sum += fval(k - i) * inc;
        } else {
            const double atom = v.jump(i);
            const double diffuse = inc - atom;
            sum += atom * fval(k - i) + 0.5 * diffuse * (fval(k - i) + flm(k - i + 1));
        }
    }
    return sum;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace prwlab
