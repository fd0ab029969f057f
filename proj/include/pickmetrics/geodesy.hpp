#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace pickmetrics {

/// A parametrized curve [a, b] -> disc (dim 1) or ball. `derivative`, when set,
/// returns the velocity vector; otherwise central differences are used.
struct Curve {
    std::function<BallPoint(double)> param;
    double a = 0.0;
    double b = 1.0;
    bool smooth = true;
    std::function<std::vector<cplx>(double)> derivative{};
};

inline Curve constant_curve(const BallPoint& p) {
    return {[p](double) { return p; }, 0.0, 1.0, true,
            [n = p.dim()](double) { return std::vector<cplx>(n, cplx{}); }};
}

/// t -> t e^{i phase} for t in [r0, r1].
inline Curve radial_segment(double r0, double r1, double phase = 0.0) {
    require(r0 < r1, "radial_segment: need r0 < r1");
    const cplx dir = std::polar(1.0, phase);
    return {[dir](double t) { return BallPoint(DiscPoint(t * dir)); }, r0, r1, true,
            [dir](double) { return std::vector<cplx>{dir}; }};
}

/// theta -> r e^{i theta} for theta in [theta0, theta1].
inline Curve circle_arc(double r, double theta0, double theta1) {
    require(theta0 < theta1, "circle_arc: need theta0 < theta1");
    return {[r](double th) { return BallPoint(DiscPoint(std::polar(r, th))); }, theta0, theta1, true,
            [r](double th) { return std::vector<cplx>{cplx(0.0, 1.0) * std::polar(r, th)}; }};
}

/// Straight segment z -> w in the ball, t in [0, 1].
inline Curve line_segment(const BallPoint& z, const BallPoint& w) {
    if (z.dim() != w.dim()) throw DimensionError("line_segment: dimension mismatch");
    return {[z, w](double t) {
                std::vector<cplx> c(z.dim());
                for (std::size_t j = 0; j < z.dim(); ++j) c[j] = (1.0 - t) * z[j] + t * w[j];
                return BallPoint(std::move(c));
            },
            0.0, 1.0, true,
            [z, w](double) {
                std::vector<cplx> c(z.dim());
                for (std::size_t j = 0; j < z.dim(); ++j) c[j] = w[j] - z[j];
                return c;
            }};
}

struct LengthResult {
    double value = 0.0;
    int refinement_depth = 0;
    bool converged = false;
    double estimate_gap = 0.0;   // change at the last refinement
    std::vector<double> levels;  // polyline sum at 1, 2, 4, ... segments
};

/// Partition-supremum length by dyadic refinement. Stops once the increment
/// stays below `tol` on two consecutive refinements, or at `max_depth`
/// (2^max_depth segments). Every recorded level is a lower bound for the length.
inline LengthResult polyline_length(const MetricId& metric, const Curve& c, double tol, int max_depth = 20) {
    require(tol > 0.0, "polyline_length: tol must be positive");
    require(max_depth >= 1 && max_depth <= 26, "polyline_length: max_depth out of range [1, 26]");
    require(c.a < c.b, "polyline_length: need a < b");

    auto sample = [&](double t) {
        BallPoint p = c.param(t);
        if (p.dim() != metric.dim()) throw DimensionError("polyline_length: curve dimension does not match metric");
        return p;
    };
    auto checked = [](double d) {
        if (!std::isfinite(d)) throw DomainError("polyline_length: non-finite metric value");
        return d;
    };

    std::vector<BallPoint> pts{sample(c.a), sample(c.b)};
    LengthResult res;
    res.levels.push_back(checked(distance(metric, pts[0], pts[1])));
    int quiet = 0;
    for (int depth = 1; depth <= max_depth; ++depth) {
        const std::size_t segs = pts.size() - 1;
        const double h = (c.b - c.a) / static_cast<double>(2 * segs);
        std::vector<BallPoint> mids(segs);
        std::vector<double> seg_len(2 * segs);
        parallel_for(segs, [&](std::size_t i) {
            mids[i] = sample(c.a + static_cast<double>(2 * i + 1) * h);
            seg_len[2 * i] = checked(distance(metric, pts[i], mids[i]));
            seg_len[2 * i + 1] = checked(distance(metric, mids[i], pts[i + 1]));
        });
        double total = 0.0;
        for (double s : seg_len) total += s;

        std::vector<BallPoint> next;
        next.reserve(2 * segs + 1);
        for (std::size_t i = 0; i < segs; ++i) {
            next.push_back(std::move(pts[i]));
            next.push_back(std::move(mids[i]));
        }
        next.push_back(std::move(pts.back()));
        pts = std::move(next);

        res.estimate_gap = total - res.levels.back();
        res.levels.push_back(total);
        res.refinement_depth = depth;
        quiet = std::abs(res.estimate_gap) < tol ? quiet + 1 : 0;
        if (quiet >= 2) {
            res.converged = true;
            break;
        }
    }
    res.value = res.levels.back();
    return res;
}

namespace detail {

/// log(1/(1-q)) - q without cancellation for small q.
inline double log_excess(double q, double one_minus_q) {
    if (q < 0.5) {
        double sum = 0.0, power = q * q;
        for (int k = 2; k < 400; ++k) {
            const double term = power / k;
            sum += term;
            if (term <= 1e-18 * sum) break;
            power *= q;
        }
        return sum;
    }
    return -std::log(one_minus_q) - q;
}

/// Taylor coefficients of g in q = |z|^2: g = N(q) / (D(q)^2 (1 - q)^2) with
/// N = sum q^k / (k + 2) and D = sum q^k / (k + 1). Four terms give order |z|^6.
inline const PowerSeries& g_taylor() {
    static const PowerSeries series = [] {
        const PowerSeries num{1.0 / 2, 1.0 / 3, 1.0 / 4, 1.0 / 5};
        const PowerSeries den{1.0, 1.0 / 2, 1.0 / 3, 1.0 / 4};
        const PowerSeries one_minus_sq{1.0, -2.0, 1.0, 0.0};
        return series_multiply(num, series_reciprocal(series_multiply(series_multiply(den, den), one_minus_sq)));
    }();
    return series;
}

/// Density g as a function of q = |z|^2 with the exact complement 1 - q.
inline double g_from(double q, double one_minus_q) {
    if (q < 1e-6) return g_taylor().evaluate(q);
    const double L = q < 0.5 ? -std::log1p(-q) : -std::log(one_minus_q);
    return log_excess(q, one_minus_q) / (L * L * one_minus_q * one_minus_q);
}

} // namespace detail

/// Conformal density of the Dirichlet metric: lengths are integrals of g^{1/2} |dz|.
/// Closed form for |z| >= 1e-3, Taylor series below; g(0) = 1/2.
inline double g_density(const DiscPoint& z) {
    const double q = z.norm2();
    return detail::g_from(q, 1.0 - q);
}

namespace detail {

inline std::vector<cplx> velocity(const Curve& c, double t) {
    if (c.derivative) return c.derivative(t);
    const double h = std::max(1e-6, 1e-8 / std::abs(c.b - c.a));
    const BallPoint p0 = c.param(t);
    std::vector<cplx> v(p0.dim());
    if (t - h >= c.a && t + h <= c.b) {
        const BallPoint pm = c.param(t - h), pp = c.param(t + h);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = (pp[j] - pm[j]) / (2.0 * h);
    } else {
        // second-order one-sided difference at the ends
        const double s = (t - h < c.a) ? h : -h;
        const BallPoint p1 = c.param(t + s), p2 = c.param(t + 2.0 * s);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = (-3.0 * p0[j] + 4.0 * p1[j] - p2[j]) / (2.0 * s);
    }
    return v;
}

} // namespace detail

/// Dirichlet-metric length of a smooth disc curve: integral of g(c(t))^{1/2} |c'(t)|.
inline double riemannian_length_dirichlet(const Curve& c, double tol) {
    if (!c.smooth) throw PreconditionError("riemannian_length_dirichlet: curve is not flagged smooth");
    require(tol > 0.0, "riemannian_length_dirichlet: tol must be positive");
    auto integrand = [&](double t) {
        const DiscPoint z = c.param(t).as_disc();
        const auto v = detail::velocity(c, t);
        return std::sqrt(g_density(z)) * std::abs(v.at(0));
    };
    return quadrature::integrate(integrand, c.a, c.b, tol, "riemannian_length_dirichlet");
}

/// Dirichlet length of [0, r] given the complement u = 1 - r in (0, 1].
/// Above r = 0.99 the tail is integrated in s = -log(1 - t), where the
/// integrand is smooth and the node count grows like log(1/u).
inline double radial_length_complement(double u, double tol) {
    require(u > 0.0 && u <= 1.0, "radial_length: need 0 <= r < 1");
    require(tol > 0.0, "radial_length: tol must be positive");
    auto plain = [](double t) { return std::sqrt(detail::g_from(t * t, (1.0 - t) * (1.0 + t))); };
    constexpr double kSplitComplement = 0.01;
    if (u >= kSplitComplement) {
        if (u == 1.0) return 0.0;
        return quadrature::integrate(plain, 0.0, 1.0 - u, tol, "radial_length");
    }
    const double head = quadrature::integrate(plain, 0.0, 1.0 - kSplitComplement, 0.5 * tol, "radial_length");
    // With e = 1 - t and 1 - q = e (2 - e), the Jacobian e cancels against
    // 1/(1 - q), which keeps the integrand finite down to the smallest u.
    auto tail = [](double s) {
        const double e = std::exp(-s);
        const double t = 1.0 - e;
        const double L = s - std::log(2.0 - e);  // log 1/(1 - q), q = t^2 > 0.98
        return std::sqrt(L - t * t) / (L * (2.0 - e));
    };
    return head + quadrature::integrate(tail, -std::log(kSplitComplement), -std::log(u), 0.5 * tol, "radial_length");
}

inline double radial_length(double r, double tol) {
    require(r >= 0.0 && r < 1.0, "radial_length: need 0 <= r < 1");
    return radial_length_complement(1.0 - r, tol);
}

/// radial_length / (log 1/u)^{1/2}, the quantity bounded by M.
inline double radial_length_ratio(double u, double tol = 1e-10) {
    require(u > 0.0 && u < 1.0, "radial_length_ratio: need 0 < r < 1");
    return radial_length_complement(u, tol) / std::sqrt(-std::log(u));
}

/// Empirical constant M with radial_length(r) <= M (log 1/(1-r))^{1/2}:
/// the largest ratio over the grid plus a 5% margin. Grid entries are
/// complements u = 1 - r.
inline double estimate_M_complements(std::span<const double> complements) {
    require(!complements.empty(), "estimate_M: grid must be nonempty");
    double best = 0.0;
    for (double u : complements) best = std::max(best, radial_length_ratio(u));
    return 1.05 * best;
}

inline double estimate_M(std::span<const double> radii) {
    std::vector<double> u;
    u.reserve(radii.size());
    for (double r : radii) {
        require(r > 0.0 && r < 1.0, "estimate_M: radii must lie in (0,1)");
        u.push_back(1.0 - r);
    }
    return estimate_M_complements(u);
}

/// Default grid for M: u = 10^{-k/4}, k = 1..48 (r up to 1 - 1e-12).
inline std::vector<double> default_M_grid() {
    std::vector<double> u;
    for (int k = 1; k <= 48; ++k) u.push_back(std::pow(10.0, -k / 4.0));
    return u;
}

} // namespace pickmetrics
