#pragma once

// Picard iteration of the projected mild-solution map phi_n on a grid that is
// uniform on each evolution/impulse subinterval and has nodes at every s_k and
// sigma_k. Node values follow the left-limit convention.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/noise.hpp"
#include "fgsim/operator_families.hpp"
#include "fgsim/problem.hpp"
#include "fgsim/spectral_space.hpp"

namespace fgsim {

/// One subinterval of the grid. Node `first` is its left endpoint, owned by
/// the previous segment (except node 0); nodes first+1..last belong to it.
struct Segment {
    enum class Kind { evolution, impulse };
    Kind kind = Kind::evolution;
    std::size_t k = 0;     // evolution: 0..q, impulse: 1..q
    std::size_t first = 0;
    std::size_t last = 0;
    double h = 0.0;

    std::size_t steps() const { return last - first; }
};

struct TimeGrid {
    std::vector<double> nodes;
    std::vector<Segment> segments; // evolution 0, impulse 1, evolution 1, ...
    std::size_t steps_per_interval = 0;

    std::size_t size() const { return nodes.size(); }

    static TimeGrid build(const ImpulseSchedule& schedule, std::size_t steps_per_interval)
    {
        schedule.validate();
        if (steps_per_interval < 1) throw ParameterError("time grid: steps_per_interval must be >= 1");
        TimeGrid g;
        g.steps_per_interval = steps_per_interval;
        g.nodes.push_back(0.0);
        auto add = [&](Segment::Kind kind, std::size_t k, double a, double b) {
            Segment seg;
            seg.kind = kind;
            seg.k = k;
            seg.first = g.nodes.size() - 1;
            seg.h = (b - a) / static_cast<double>(steps_per_interval);
            for (std::size_t i = 1; i < steps_per_interval; ++i) g.nodes.push_back(a + seg.h * static_cast<double>(i));
            g.nodes.push_back(b); // breakpoints exactly
            seg.last = g.nodes.size() - 1;
            g.segments.push_back(seg);
        };
        for (std::size_t k = 0; k <= schedule.q(); ++k) {
            if (k > 0) add(Segment::Kind::impulse, k, schedule.s_points[k - 1], schedule.sigma_points[k - 1]);
            add(Segment::Kind::evolution, k, schedule.evolution_start(k), schedule.evolution_end(k));
        }
        return g;
    }
};

/// Per-mode tables of C_a(mh), S_a(mh) and the product-quadrature weights of
/// int P_a(s - r) f(r) dr for piecewise-linear f, for each distinct evolution
/// step size of a grid.
///
/// For the cell with lag m (u = s - r in [mh, (m+1)h]) the weights follow from
/// the exact moments I0 = int p(u) du and I1 = int u p(u) du:
///   far node  (r = s - (m+1)h): (I1 - mh I0)/h
///   near node (r = s - mh):     I0 - far
class Propagator {
public:
    struct Table {
        double h = 0.0;
        std::size_t steps = 0;
        std::size_t modes = 0;
        std::vector<double> cosine, sine; // [(steps+1) x modes], lag-major
        std::vector<double> near, far;    // [steps x modes]
    };

    Propagator(const FamilyParams& fp, const TimeGrid& grid) : alpha_(fp.alpha), lambdas_(fp.spectrum.lambdas)
    {
        fp.validate();
        for (const auto& seg : grid.segments) {
            if (seg.kind != Segment::Kind::evolution) continue;
            const auto key = std::make_pair(seg.h, seg.steps());
            if (!tables_.count(key)) tables_.emplace(key, make_table(seg.h, seg.steps()));
        }
    }

    const Table& table(const Segment& seg) const
    {
        auto it = tables_.find(std::make_pair(seg.h, seg.steps()));
        if (it == tables_.end()) throw ShapeError("propagator was built for a different grid");
        return it->second;
    }

    std::size_t modes() const { return lambdas_.size(); }
    double alpha() const { return alpha_; }

private:
    Table make_table(double h, std::size_t steps) const
    {
        const std::size_t nm = lambdas_.size();
        Table t;
        t.h = h;
        t.steps = steps;
        t.modes = nm;
        t.cosine.resize((steps + 1) * nm);
        t.sine.resize((steps + 1) * nm);
        t.near.resize(steps * nm);
        t.far.resize(steps * nm);
        std::vector<double> g0((steps + 1) * nm), g1((steps + 1) * nm);
        const double a = alpha_;
        for (std::size_t j = 0; j < nm; ++j) {
            const double lam = lambdas_[j];
            for (std::size_t m = 0; m <= steps; ++m) {
                const double s = h * static_cast<double>(m);
                t.cosine[m * nm + j] = kernels::cosine(a, lam, s);
                t.sine[m * nm + j] = kernels::sine(a, lam, s);
                g0[m * nm + j] = kernels::rl_moment0(a, lam, s);
                g1[m * nm + j] = kernels::rl_moment1(a, lam, s);
            }
            for (std::size_t m = 0; m < steps; ++m) {
                const double i0 = g0[(m + 1) * nm + j] - g0[m * nm + j];
                const double i1 = g1[(m + 1) * nm + j] - g1[m * nm + j];
                const double far = (i1 - h * static_cast<double>(m) * i0) / h;
                t.far[m * nm + j] = far;
                t.near[m * nm + j] = i0 - far;
            }
        }
        return t;
    }

    double alpha_;
    std::vector<double> lambdas_;
    std::map<std::pair<double, std::size_t>, Table> tables_;
};

struct PathSolution {
    TimeGrid grid;
    std::vector<SpectralVector> states;
    std::vector<SpectralVector> derivative_states; // h_k^2 values on impulse nodes, empty elsewhere
    std::size_t galerkin_n = 0;
    std::uint64_t sample_seed = 0;

    std::size_t iterations = 0;
    std::vector<double> history;   // sup-node H_beta norm of successive iterate differences
    bool converged = false;
    bool flagged = false;          // not converged and not certified by D < 1
    bool left_ball = false;        // some iterate had a node outside B_R
    double max_beta_norm = 0.0;    // of the final iterate
};

struct PicardConfig {
    double tol = 1e-10;
    std::size_t max_iter = 100;
    std::optional<double> D;       // contraction constant from the ledger, if known
    std::optional<double> R;       // ball radius from the ledger, if known

    void validate() const
    {
        if (!(tol > 0.0)) throw ParameterError("picard: tol must be positive");
        if (max_iter < 1) throw ParameterError("picard: max_iter must be >= 1");
    }
};

namespace detail {

inline void check_solver_inputs(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener, const TimeGrid& grid)
{
    if (n > spec.modes()) throw ParameterError("Galerkin dimension exceeds the number of modes");
    if (wiener.grid.size() != grid.size()) throw ShapeError("Wiener path and time grid differ in length");
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (wiener.grid[i] != grid.nodes[i]) throw ShapeError("Wiener path was sampled on a different grid");
    if (wiener.modes != spec.cov.modes()) throw ShapeError("Wiener path and covariance differ in mode count");
}

inline SpectralVector eval_impulse(const ImpulseMap& h, std::size_t k, double s, const SpectralVector& y,
                                   std::size_t modes)
{
    if (!h) return SpectralVector::zeros(modes);
    SpectralVector out = h(k, s, y);
    if (out.size() != modes) throw ShapeError("impulse map returned the wrong number of coefficients");
    return out;
}

/// Stochastic convolution Z(t_i) = sum_{l < i} a(t_i - t_l) N_n(t_l, y_l) dW_l.
inline std::vector<SpectralVector> stochastic_convolution(std::size_t n, const ProblemSpec& spec,
                                                          const WienerPath& wiener, const TimeGrid& grid,
                                                          const std::vector<SpectralVector>& y)
{
    const std::size_t nodes = grid.size(), modes = spec.modes(), nm = wiener.modes;
    std::vector<SpectralVector> Z(nodes, SpectralVector::zeros(modes));
    if (!spec.nonlin.N || nm == 0) return Z;
    // contribution of step l, before the kernel weight
    std::vector<std::vector<double>> inc(nodes - 1, std::vector<double>(nm));
    for (std::size_t l = 0; l + 1 < nodes; ++l) {
        const std::vector<double> v = spec.nonlin.N(grid.nodes[l], project(y[l], n));
        if (v.size() != nm) throw ShapeError("noise map returned the wrong number of coefficients");
        for (std::size_t j = 0; j < nm; ++j) inc[l][j] = v[j] * wiener.increment(l, j);
    }
    const Kernel& a = spec.nonlin.a;
    if (a.kind == Kernel::Kind::exponential) {
        for (std::size_t i = 0; i + 1 < nodes; ++i) {
            const double decay = std::exp(-a.rate * (grid.nodes[i + 1] - grid.nodes[i]));
            for (std::size_t j = 0; j < nm; ++j) Z[i + 1][j] = decay * (Z[i][j] + a.amplitude * inc[i][j]);
        }
    } else {
        for (std::size_t i = 1; i < nodes; ++i)
            for (std::size_t l = 0; l < i; ++l) {
                const double w = a(grid.nodes[i] - grid.nodes[l]);
                for (std::size_t j = 0; j < nm; ++j) Z[i][j] += w * inc[l][j];
            }
    }
    return Z;
}

/// One evaluation of phi_n. With forcing = false the integral terms are
/// dropped and impulses read their left limits from the output itself, which
/// yields the homogeneous evolution used as the initial iterate.
inline PathSolution evaluate_phi(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener,
                                 const TimeGrid& grid, const Propagator& prop, const std::vector<SpectralVector>* y,
                                 bool forcing)
{
    const std::size_t nodes = grid.size(), modes = spec.modes();
    PathSolution out;
    out.grid = grid;
    out.galerkin_n = n;
    out.sample_seed = wiener.seed;
    out.states.assign(nodes, SpectralVector::zeros(modes));
    out.derivative_states.assign(nodes, SpectralVector());

    std::vector<SpectralVector> f;
    if (forcing) {
        f = stochastic_convolution(n, spec, wiener, grid, *y);
        if (spec.nonlin.K)
            for (std::size_t i = 0; i < nodes; ++i) {
                const SpectralVector kv = spec.nonlin.K(grid.nodes[i], project((*y)[i], n));
                if (kv.size() != modes) throw ShapeError("K returned the wrong number of coefficients");
                f[i] += kv;
            }
    }
    const auto& src = forcing ? *y : out.states;

    out.states[0] = spec.y0;
    for (const auto& seg : grid.segments) {
        if (seg.kind == Segment::Kind::impulse) {
            const SpectralVector left = project(src[seg.first], n); // y(s_k^-)
            for (std::size_t i = seg.first + 1; i <= seg.last; ++i) {
                out.states[i] = eval_impulse(spec.nonlin.h1, seg.k, grid.nodes[i], left, modes);
                out.derivative_states[i] = eval_impulse(spec.nonlin.h2, seg.k, grid.nodes[i], left, modes);
            }
            continue;
        }
        SpectralVector u = spec.y0, w = spec.z0;
        if (seg.k > 0) {
            const Segment& imp = grid.segments[2 * seg.k - 1];
            const SpectralVector left = project(src[imp.first], n);
            const double sigma = grid.nodes[seg.first];
            u = eval_impulse(spec.nonlin.h1, seg.k, sigma, left, modes);
            w = eval_impulse(spec.nonlin.h2, seg.k, sigma, left, modes);
        }
        const auto& tab = prop.table(seg);
        for (std::size_t li = 1; li <= seg.steps(); ++li) {
            SpectralVector& o = out.states[seg.first + li];
            for (std::size_t j = 0; j < modes; ++j)
                o[j] = tab.cosine[li * modes + j] * u[j] + tab.sine[li * modes + j] * w[j];
            if (!forcing) continue;
            for (std::size_t c = 0; c < li; ++c) {
                const std::size_t m = li - c - 1;
                const double* nr = &tab.near[m * modes];
                const double* fr = &tab.far[m * modes];
                const auto& fn = f[seg.first + c + 1].coeffs;
                const auto& ff = f[seg.first + c].coeffs;
                for (std::size_t j = 0; j < modes; ++j) o[j] += nr[j] * fn[j] + fr[j] * ff[j];
            }
        }
    }
    return out;
}

inline double sup_beta_distance(const ProblemSpec& spec, const std::vector<SpectralVector>& a,
                                const std::vector<SpectralVector>& b)
{
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        best = std::max(best, h_beta_norm_sq(spec.spectrum, a[i] - b[i], {spec.beta}));
    return std::sqrt(best);
}

} // namespace detail

/// One application of phi_n to the path y (see evaluate_phi for the pieces):
/// C_a y0 + S_a z0 + int P_a [K_n + Z] on (0, s_1]; h_{k,n}^1 on impulse
/// intervals; the relaunch from h^1, h^2 at sigma_k on later evolution intervals.
inline PathSolution apply_phi(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener, const TimeGrid& grid,
                              const Propagator& prop, const PathSolution& y)
{
    detail::check_solver_inputs(n, spec, wiener, grid);
    if (y.states.size() != grid.size()) throw ShapeError("apply_phi: path and grid differ in length");
    return detail::evaluate_phi(n, spec, wiener, grid, prop, &y.states, true);
}

inline PathSolution apply_phi(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener, const TimeGrid& grid,
                              const PathSolution& y)
{
    return apply_phi(n, spec, wiener, grid, Propagator(spec.family(), grid), y);
}

/// C_a y0 + S_a z0 continued through the impulses.
inline PathSolution homogeneous_evolution(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener,
                                          const TimeGrid& grid, const Propagator& prop)
{
    detail::check_solver_inputs(n, spec, wiener, grid);
    return detail::evaluate_phi(n, spec, wiener, grid, prop, nullptr, false);
}

inline PathSolution solve(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener, const TimeGrid& grid,
                          const PicardConfig& cfg, const Propagator& prop)
{
    cfg.validate();
    detail::check_solver_inputs(n, spec, wiener, grid);
    PathSolution cur = homogeneous_evolution(n, spec, wiener, grid, prop);
    std::vector<double> history;
    bool left_ball = false;
    auto outside_ball = [&](const PathSolution& p) {
        if (!cfg.R) return false;
        for (const auto& v : p.states)
            if (std::sqrt(h_beta_norm_sq(spec.spectrum, v, {spec.beta})) > *cfg.R) return true;
        return false;
    };
    left_ball = outside_ball(cur);
    bool converged = false;
    std::size_t it = 0;
    while (it < cfg.max_iter) {
        PathSolution next = detail::evaluate_phi(n, spec, wiener, grid, prop, &cur.states, true);
        ++it;
        const double d = detail::sup_beta_distance(spec, next.states, cur.states);
        history.push_back(d);
        cur = std::move(next);
        left_ball = left_ball || outside_ball(cur);
        if (!std::isfinite(d)) break;
        if (d <= cfg.tol) {
            converged = true;
            break;
        }
    }
    if (!converged && cfg.D && *cfg.D < 1.0)
        throw ConvergenceError("Picard iteration did not reach tol " + std::to_string(cfg.tol) + " in " +
                               std::to_string(cfg.max_iter) + " iterations although D = " + std::to_string(*cfg.D) +
                               " < 1");
    cur.iterations = it;
    cur.history = std::move(history);
    cur.converged = converged;
    cur.flagged = !converged;
    cur.left_ball = left_ball;
    for (const auto& v : cur.states)
        cur.max_beta_norm = std::max(cur.max_beta_norm, std::sqrt(h_beta_norm_sq(spec.spectrum, v, {spec.beta})));
    return cur;
}

inline PathSolution solve(std::size_t n, const ProblemSpec& spec, const WienerPath& wiener, const TimeGrid& grid,
                          const PicardConfig& cfg)
{
    return solve(n, spec, wiener, grid, cfg, Propagator(spec.family(), grid));
}

/// sup over nodes of ||sol - phi_n(sol)||_beta.
inline double residual_check(const PathSolution& sol, const ProblemSpec& spec, const WienerPath& wiener,
                             const TimeGrid& grid, const Propagator& prop)
{
    const PathSolution img = apply_phi(sol.galerkin_n, spec, wiener, grid, prop, sol);
    return detail::sup_beta_distance(spec, img.states, sol.states);
}

inline double residual_check(const PathSolution& sol, const ProblemSpec& spec, const WienerPath& wiener,
                             const TimeGrid& grid)
{
    return residual_check(sol, spec, wiener, grid, Propagator(spec.family(), grid));
}

/// Faedo-Galerkin output P^n y_n, node by node.
inline PathSolution fg_project(const PathSolution& sol, std::size_t n)
{
    PathSolution out = sol;
    for (auto& v : out.states) v = project(v, n);
    for (auto& v : out.derivative_states)
        if (v.size()) v = project(v, n);
    return out;
}

/// Coefficient series eta_j^n(t_i) = <ybar_n(t_i), psi_j> for one mode.
inline std::vector<double> coefficient_series(const PathSolution& sol, std::size_t j)
{
    std::vector<double> out;
    out.reserve(sol.states.size());
    for (const auto& v : sol.states) out.push_back(v.coeffs.at(j));
    return out;
}

namespace detail {

inline std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// CSV with '#' metadata lines, then time,mode_0..mode_{columns-1}.
inline void write_solution_csv(std::ostream& os, const PathSolution& sol, const ProblemSpec& spec,
                               std::size_t columns)
{
    columns = std::min(columns, spec.modes());
    os << "# problem=" << spec.name << "\n";
    os << "# alpha=" << detail::fmt17(spec.alpha) << "\n";
    os << "# beta=" << detail::fmt17(spec.beta) << "\n";
    os << "# n=" << sol.galerkin_n << "\n";
    os << "# seed=" << sol.sample_seed << "\n";
    os << "# steps_per_interval=" << sol.grid.steps_per_interval << "\n";
    os << "# nodes=" << sol.grid.size() << "\n";
    os << "# picard_iterations=" << sol.iterations << "\n";
    os << "# converged=" << (sol.converged ? 1 : 0) << "\n";
    os << "time";
    for (std::size_t j = 0; j < columns; ++j) os << ",mode_" << j;
    os << "\n";
    for (std::size_t i = 0; i < sol.states.size(); ++i) {
        os << detail::fmt17(sol.grid.nodes[i]);
        for (std::size_t j = 0; j < columns; ++j) os << ',' << detail::fmt17(sol.states[i][j]);
        os << "\n";
    }
}

} // namespace fgsim
