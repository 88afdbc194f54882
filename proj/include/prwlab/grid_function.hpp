#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prwlab {

/// Quadrature used for Lebesgue-Stieltjes sums on a grid.
///
/// `right_point` pairs each increment of the integrator with the integrand at
/// the increment's node: w(kh) = sum_i u((k - i)h) dv(ih). It is exact for
/// lattice measures on an aligned grid and first order otherwise.
///
/// `atom_aware` splits every increment into its recorded jump (treated as
/// above) and its diffuse remainder, which is integrated with the trapezoid
/// rule using the left limit of the integrand at the far end of the cell.
/// It agrees with `right_point` on purely atomic integrators and is second
/// order on absolutely continuous ones.
enum class StieltjesRule { atom_aware, right_point };

/// A right-continuous function of locally bounded variation sampled at
/// nodes t_k = (origin + k) h, k = 0..size-1. Below the first node the
/// function equals `below` (normally 0).
///
/// `jumps` optionally records the atomic part of each increment. When empty,
/// the increment at node 0 is an atom and all others are diffuse.
class GridFunction {
public:
    GridFunction(double step, std::vector<double> values, std::int64_t origin = 0,
                 double below = 0.0);

    /// Samples f at the nodes of [origin h, (origin + count - 1) h].
    template <class F>
    static GridFunction sample(double step, std::int64_t origin, std::size_t count, F&& f) {
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k) {
            v[k] = f((static_cast<double>(origin) + static_cast<double>(k)) * step);
        }
        return GridFunction(step, std::move(v), origin);
    }

    /// Unit mass at 0: the zeroth convolution power of any function.
    static GridFunction heaviside(double step, std::size_t count, std::int64_t origin = 0);

    double step() const noexcept { return step_; }
    std::int64_t origin() const noexcept { return origin_; }
    double below() const noexcept { return below_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    double node(std::size_t k) const noexcept {
        return (static_cast<double>(origin_) + static_cast<double>(k)) * step_;
    }
    double first_node() const noexcept { return node(0); }
    double last_node() const noexcept { return node(size() - 1); }

    /// Value increment at node k (relative to `below` for k = 0).
    double increment(std::size_t k) const noexcept {
        return k == 0 ? values_[0] - below_ : values_[k] - values_[k - 1];
    }
    /// Atomic part of the increment at node k.
    double jump(std::size_t k) const noexcept {
        if (!jumps_.empty()) return jumps_[k];
        return k == 0 ? values_[0] - below_ : 0.0;
    }
    /// Limit from the left at node k.
    double left_limit(std::size_t k) const noexcept { return values_[k] - jump(k); }

    bool has_explicit_jumps() const noexcept { return !jumps_.empty(); }
    std::span<const double> explicit_jumps() const noexcept { return jumps_; }

    /// Records the atomic part of each increment. Sizes must match.
    GridFunction& set_jumps(std::vector<double> jumps);

    /// Node index of t; throws a domain error if t is not (within 1e-9 h) a
    /// node of this grid.
    std::size_t index_of(double t) const;
    std::optional<std::size_t> try_index_of(double t) const noexcept;

    /// Value at an arbitrary point: `below` before the first node, linear
    /// between a node and the left limit at the next node, and the last value
    /// beyond the grid.
    double eval(double x) const noexcept;

    bool monotone() const noexcept { return monotone_; }
    /// Flags the function as nondecreasing (from `below` onward); throws if
    /// it is not.
    GridFunction& mark_monotone();
    bool is_nondecreasing() const noexcept;

    GridFunction& set_monotone_unchecked(bool flag) noexcept {
        monotone_ = flag;
        return *this;
    }

    /// CSV with header `t,value`, one row per node, 17 significant digits.
    void write_csv(std::ostream& out) const;

    friend bool operator==(const GridFunction& a, const GridFunction& b);

private:
    double step_;
    std::vector<double> values_;
    std::int64_t origin_;
    double below_;
    std::vector<double> jumps_;
    bool monotone_ = false;
};

/// w(t) = integral of u(t - y) dv(y) on the common grid. The result starts at
/// the sum of the two origins and has the length of the shorter input.
/// Requires u to vanish below its first node.
GridFunction stieltjes_convolve(const GridFunction& u, const GridFunction& v,
                                StieltjesRule rule = StieltjesRule::atom_aware);

/// v^{*(j)} by left fold; j = 0 gives the unit step at 0.
GridFunction convolution_power(const GridFunction& v, int j,
                               StieltjesRule rule = StieltjesRule::atom_aware);

/// [v^{*(1)}, ..., v^{*(jmax)}], keeping every intermediate of the fold.
std::vector<GridFunction> convolution_powers(const GridFunction& v, int jmax,
                                             StieltjesRule rule = StieltjesRule::atom_aware);

/// Total variation over the nodes in (lo, hi]. Recorded jumps are counted
/// separately from the diffuse part of their cell. A lo below the first node
/// includes the increment at the first node.
double total_variation(const GridFunction& u, double lo, double hi);

/// Integral of f(t - y) dv(y) over [0, t]. f must start at 0 and is taken
/// as 0 beyond its last node; t must be a node of v.
double convolve_dri(const GridFunction& f, const GridFunction& v, double t,
                    StieltjesRule rule = StieltjesRule::atom_aware);

std::string format_double(double x);

}  // namespace prwlab
