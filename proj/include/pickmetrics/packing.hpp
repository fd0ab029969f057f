#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geodesy.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "parallel.hpp"

namespace pickmetrics {

/// Largest separation a circle lattice can reach asymptotically: sqrt(3/4).
inline constexpr double kCircleLimit = 0.86602540378443864676;

/// A finite point set with a recomputed separation certificate.
struct SeparatedSet {
    std::vector<BallPoint> points;
    double eps = 0.0;
    MetricId metric{};
    double min_pairwise = std::numeric_limits<double>::infinity();
    bool full_certificate = true;  // false: prefix + adjacent + sampled pairs only

    std::size_t size() const { return points.size(); }
};

/// Minimum pairwise distance, O(n^2) when n <= full_limit. Larger sets get the
/// full check on the first full_limit points, every adjacent pair, and 20n
/// pseudo-random pairs from a fixed seed.
inline std::pair<double, bool> min_pairwise_distance(std::span<const BallPoint> pts, const MetricId& metric,
                                                     std::size_t full_limit = 2000) {
    const std::size_t n = pts.size();
    if (n < 2) return {std::numeric_limits<double>::infinity(), true};
    const std::size_t m = std::min(n, full_limit);
    std::vector<double> row_min(m, std::numeric_limits<double>::infinity());
    parallel_for(m, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < m; ++j) row_min[i] = std::min(row_min[i], distance(metric, pts[i], pts[j]));
    });
    double best = *std::min_element(row_min.begin(), row_min.end());
    if (m == n) return {best, true};

    std::vector<double> adj(n - 1);
    parallel_for(n - 1, [&](std::size_t i) { adj[i] = distance(metric, pts[i], pts[i + 1]); });
    best = std::min(best, *std::min_element(adj.begin(), adj.end()));

    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t s = 0; s < 20 * n; ++s) {
        const std::size_t i = pick(rng), j = pick(rng);
        if (i != j) best = std::min(best, distance(metric, pts[i], pts[j]));
    }
    return {best, false};
}

/// Builds a SeparatedSet, throwing SeparationError when the certificate fails.
inline SeparatedSet certify_separated(std::vector<BallPoint> points, const MetricId& metric, double eps,
                                      std::size_t full_limit = 2000) {
    require(eps > 0.0, "certify_separated: eps must be positive");
    const auto [mind, full] = min_pairwise_distance(points, metric, full_limit);
    if (mind < eps)
        throw SeparationError("certify_separated: minimum pairwise distance " + std::to_string(mind) +
                              " is below eps " + std::to_string(eps));
    return {std::move(points), eps, metric, mind, full};
}

/// delta(r e^{i theta}, r) with theta = sqrt(u), r = 1 - u, evaluated from the
/// complement u so radii within 1e-15 of the circle stay accurate:
///   1 - delta^2 = |log(1 - r^2 e^{i theta})|^2 / log(1 - r^2)^2.
inline double circle_gap_distance(double u) {
    require(u > 0.0 && u <= 1.0, "circle_gap_distance: need 0 <= r < 1");
    const double r = 1.0 - u;
    const double r2 = r * r;
    const double theta = std::sqrt(u);
    const double one_minus_r2 = u * (2.0 - u);
    if (r == 0.0) return 0.0;
    const double half = std::sin(0.5 * theta);
    const double re = one_minus_r2 + 2.0 * r2 * half * half;  // 1 - r^2 cos(theta)
    const double im = -r2 * std::sin(theta);
    const cplx lg(0.5 * std::log(re * re + im * im), std::atan2(im, re));
    const double den = std::log(one_minus_r2);
    const double v = 1.0 - std::norm(lg) / (den * den);
    return std::sqrt(std::max(0.0, v));
}

struct CircleSample {
    double u;
    double r;
    double value;
};

/// delta(r e^{i theta(r)}, r) for each complement u = 1 - r; tends to sqrt(3/4).
inline std::vector<CircleSample> circle_asymptotic(std::span<const double> complements) {
    std::vector<CircleSample> out;
    for (double u : complements) {
        require(u > 0.0 && u < 1.0, "circle_asymptotic: radii must lie in (0,1)");
        out.push_back({u, 1.0 - u, circle_gap_distance(u)});
    }
    return out;
}

/// Largest grid complement u_0 (grid u = 10^{-k/8}, down to 1e-20) such that the
/// lattice spacing is eps-separated at every grid point u <= u_0. Empirical sweep;
/// nothing is extrapolated past the grid.
inline std::optional<double> circle_lattice_threshold(double eps) {
    std::optional<double> found;
    for (int k = 160; k >= 1; --k) {
        const double u = std::pow(10.0, -k / 8.0);
        if (circle_gap_distance(u) >= eps) found = u;
        else break;
    }
    return found;
}

/// True when t -> delta(r e^{it}, r) is non-decreasing on [0, pi] at the sample
/// points, up to 1e-12.
inline bool circle_monotonicity_check(double r, int n_samples) {
    require(r > 0.0 && r < 1.0, "circle_monotonicity_check: need 0 < r < 1");
    require(n_samples >= 2, "circle_monotonicity_check: need at least two samples");
    const DiscPoint base(r);
    double prev = -1.0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = std::numbers::pi * i / (n_samples - 1);
        const double v = dirichlet_metric(DiscPoint(std::polar(r, t)), base);
        if (v < prev - 1e-12) return false;
        prev = std::max(prev, v);
    }
    return true;
}

struct CircleLattice {
    SeparatedSet set;
    double adjacent_min;  // smallest distance between consecutive lattice points
};

/// D(r) = {r e^{i k theta}}, theta = sqrt(1 - r), k = 0..floor(pi/theta), on
/// the Dirichlet metric. Separation is checked on every adjacent pair and
/// certified pairwise (full up to full_limit points, see min_pairwise_distance).
inline CircleLattice circle_lattice_complement(double u, double eps, std::size_t full_limit = 2000) {
    require(u > 0.0 && u < 1.0, "circle_lattice: need 0 < r < 1");
    require(eps > 0.0, "circle_lattice: eps must be positive");
    if (eps >= kCircleLimit) throw PreconditionError("circle_lattice: eps must be < sqrt(3/4)");
    const double r = 1.0 - u;
    const double theta = std::sqrt(u);
    const double count = std::floor(std::numbers::pi / theta);
    require(count <= 5e6, "circle_lattice: lattice too large (> 5e6 points)");
    const std::size_t N = static_cast<std::size_t>(count);

    std::vector<BallPoint> pts;
    pts.reserve(N + 1);
    for (std::size_t k = 0; k <= N; ++k) pts.emplace_back(DiscPoint(std::polar(r, static_cast<double>(k) * theta)));

    const MetricId metric = MetricId::kernel_delta(KernelSpec::dirichlet());
    double adjacent = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        adjacent = std::min(adjacent, dirichlet_metric(pts[k].as_disc(), pts[k + 1].as_disc()));
    if (adjacent < eps)
        throw SeparationError("circle_lattice: adjacent spacing " + std::to_string(adjacent) + " < eps at u = " +
                              std::to_string(u) + " (radius below the separation threshold)");
    return {certify_separated(std::move(pts), metric, eps, full_limit), adjacent};
}

inline CircleLattice circle_lattice(double r, double eps, std::size_t full_limit = 2000) {
    require(r > 0.0 && r < 1.0, "circle_lattice: need 0 < r < 1");
    return circle_lattice_complement(1.0 - r, eps, full_limit);
}

/// First-fit greedy selection in input order. The result is eps-separated and
/// maximal in the input: every rejected point is within eps of a kept one.
/// Input order is part of the contract.
inline SeparatedSet greedy_separated(std::span<const BallPoint> points, const MetricId& metric, double eps) {
    require(eps > 0.0, "greedy_separated: eps must be positive");
    SeparatedSet out;
    out.eps = eps;
    out.metric = metric;
    for (const BallPoint& p : points) {
        double nearest = std::numeric_limits<double>::infinity();
        bool keep = true;
        for (const BallPoint& q : out.points) {
            const double dist = distance(metric, p, q);
            if (dist < eps) {
                keep = false;
                break;
            }
            nearest = std::min(nearest, dist);
        }
        if (keep) {
            out.min_pairwise = std::min(out.min_pairwise, nearest);
            out.points.push_back(p);
        }
    }
    return out;
}

/// Upper bound (2/eps + 1)^{2d} / (1 - r^2)^d on eps-separated subsets of the
/// closed ball {||z|| <= r} in C^d under rho.
inline double duren_weir_bound(int d, double r, double eps) {
    require(d >= 1, "duren_weir_bound: d must be >= 1");
    require(r >= 0.0 && r < 1.0, "duren_weir_bound: need 0 <= r < 1");
    require(eps > 0.0, "duren_weir_bound: eps must be positive");
    return std::pow(2.0 / eps + 1.0, 2.0 * d) / std::pow((1.0 - r) * (1.0 + r), d);
}

/// Uniform sample from the Euclidean ball of radius r in C^d (= R^{2d}).
inline BallPoint uniform_ball_point(std::mt19937_64& rng, int d, double r) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    std::vector<cplx> c(static_cast<std::size_t>(d));
    double n2 = 0.0;
    for (auto& x : c) {
        x = cplx(gauss(rng), gauss(rng));
        n2 += std::norm(x);
    }
    const double radius = r * std::pow(unif(rng), 1.0 / (2.0 * d));
    const double scale = radius / std::sqrt(n2);
    for (auto& x : c) x *= scale;
    return BallPoint(std::move(c));
}

/// 1 - exp(-C (log 1/(1-|z|))^{1/2}): how fast a Lipschitz image of the disc
/// may approach the sphere.
inline double slow_growth_envelope(double C, double z_abs) {
    require(C > 0.0, "slow_growth_envelope: C must be positive");
    require(z_abs >= 0.0 && z_abs < 1.0, "slow_growth_envelope: need 0 <= |z| < 1");
    return -std::expm1(-C * std::sqrt(-std::log1p(-z_abs)));
}

struct EnvelopeThreshold {
    double r0;
    double u0;  // 1 - r0, kept separately since r0 rounds to 1 quickly
};

/// r0 = 1 - exp(-(C/alpha)^2): beyond it the envelope is <= 1 - (1 - |z|)^alpha.
inline EnvelopeThreshold envelope_threshold(double alpha, double C) {
    require(alpha > 0.0 && C > 0.0, "envelope_threshold: alpha and C must be positive");
    const double x = C / alpha;
    const double u0 = std::exp(-x * x);
    return {1.0 - u0, u0};
}

struct Distortion {
    double lip_upper;
    double lip_lower;
};

/// Sample-level Lipschitz constants: max and min over pairs of dst/src distance.
inline Distortion distortion_estimate(std::span<const std::pair<BallPoint, BallPoint>> samples, const MetricId& src,
                                      const MetricId& dst) {
    require(samples.size() >= 2, "distortion_estimate: need at least two samples");
    Distortion out{0.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double ds = distance(src, samples[i].first, samples[j].first);
            if (ds <= 0.0) throw PreconditionError("distortion_estimate: duplicate source points");
            const double ratio = distance(dst, samples[i].second, samples[j].second) / ds;
            out.lip_upper = std::max(out.lip_upper, ratio);
            out.lip_lower = std::min(out.lip_lower, ratio);
        }
    }
    return out;
}

struct ObstructionRow {
    double u;      // 1 - r
    double r;      // display only
    double lower;  // 1 / sqrt(u): separated points on the circle C_r
    double upper;  // packing bound for the image ball B_{s(r)}
    bool crossed;  // lower > upper
};

struct ObstructionReport {
    int d = 1;
    double L = 1.0, m = 1.0, eps = 0.8;
    double alpha = 1.0 / 3.0;
    double M = 0.0;                        // empirical radial-length constant
    EnvelopeThreshold envelope{};          // with C = 2 L M
    std::optional<double> lattice_u0;      // circle-lattice separation threshold
    std::vector<ObstructionRow> rows;      // sorted by r ascending
    std::optional<double> r_star_u;        // complement of the first crossing radius

    std::optional<double> r_star() const {
        if (!r_star_u) return std::nullopt;
        return 1.0 - *r_star_u;
    }
};

/// Grid u = 10^{-1}, ..., 10^{-k_max}, built from the exponent directly.
inline std::vector<double> log_grid(int k_max) {
    require(k_max >= 1 && k_max <= 300, "log_grid: k_max must lie in [1, 300]");
    std::vector<double> u;
    for (int k = 1; k <= k_max; ++k) u.push_back(std::pow(10.0, -k));
    return u;
}

/// Compares the separated-point count forced on the circle C_r,
///   lower(r) = (1 - r)^{-1/2},
/// with the packing bound on the ball the image of C_r must stay inside,
///   upper(r) = (2/(m eps) + 1)^{2d} / (1 - s(r)^2)^d,  s(r) = 1 - (1 - r)^{1/(2d+1)}.
/// All radii are carried as complements u = 1 - r.
inline ObstructionReport obstruction_report(int d, double L, double m, double eps, std::span<const double> u_grid,
                                            std::optional<double> M = std::nullopt) {
    require(d >= 1, "obstruction_report: d must be >= 1");
    require(m > 0.0 && L >= m, "obstruction_report: need L >= m > 0");
    require(eps > 0.0, "obstruction_report: eps must be positive");
    if (eps >= kCircleLimit) throw PreconditionError("obstruction_report: eps must be < sqrt(3/4)");
    require(!u_grid.empty(), "obstruction_report: empty grid");

    ObstructionReport rep;
    rep.d = d;
    rep.L = L;
    rep.m = m;
    rep.eps = eps;
    rep.alpha = 1.0 / (2.0 * d + 1.0);
    rep.M = M ? *M : estimate_M_complements(default_M_grid());
    rep.envelope = envelope_threshold(rep.alpha, 2.0 * L * rep.M);
    rep.lattice_u0 = circle_lattice_threshold(eps);

    std::vector<double> grid(u_grid.begin(), u_grid.end());
    for (double u : grid) require(u > 0.0 && u < 1.0, "obstruction_report: grid radii must lie in (0,1)");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    if (!rep.lattice_u0 || grid.back() > *rep.lattice_u0)
        throw PreconditionError("obstruction_report: grid lies below the circle-lattice threshold for eps");

    const double packing_const = std::pow(2.0 / (m * eps) + 1.0, 2.0 * d);
    rep.rows.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const double u = grid[i];
        const double v = std::pow(u, rep.alpha);  // 1 - s(r)
        const double lower = 1.0 / std::sqrt(u);
        const double upper = packing_const / std::pow(v * (2.0 - v), d);
        rep.rows[i] = {u, 1.0 - u, lower, upper, lower > upper};
    });
    for (const auto& row : rep.rows) {
        if (row.crossed) {
            rep.r_star_u = row.u;
            break;
        }
    }
    return rep;
}

struct Slopes {
    double lower;
    double upper;
};

/// d log(bound) / d log(u) between the last two rows.
inline Slopes final_decade_slopes(const ObstructionReport& rep) {
    require(rep.rows.size() >= 2, "final_decade_slopes: need two rows");
    const auto& a = rep.rows[rep.rows.size() - 2];
    const auto& b = rep.rows.back();
    const double dl = std::log(b.u) - std::log(a.u);
    return {(std::log(b.lower) - std::log(a.lower)) / dl, (std::log(b.upper) - std::log(a.upper)) / dl};
}

/// CSV `u,r_display,lower,upper,crossed` with u in scientific notation.
inline void write_obstruction_csv(std::ostream& os, const ObstructionReport& rep) {
    os << "u,r_display,lower,upper,crossed\n";
    char buf[256];
    for (const auto& row : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.16e,%.17g,%.17g,%.17g,%s\n", row.u, row.r, row.lower, row.upper,
                      row.crossed ? "true" : "false");
        os << buf;
    }
}

/// CSV `re,im` (dimension 1) or `re_1,im_1,...,re_d,im_d`, one point per row.
inline void write_points_csv(std::ostream& os, std::span<const BallPoint> pts) {
    const std::size_t dim = pts.empty() ? 1 : pts.front().dim();
    if (dim == 1) {
        os << "re,im\n";
    } else {
        for (std::size_t j = 1; j <= dim; ++j) os << (j > 1 ? "," : "") << "re_" << j << ",im_" << j;
        os << '\n';
    }
    char buf[96];
    for (const BallPoint& p : pts) {
        for (std::size_t j = 0; j < dim; ++j) {
            std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", j ? "," : "", p[j].real(), p[j].imag());
            os << buf;
        }
        os << '\n';
    }
}

} // namespace pickmetrics
