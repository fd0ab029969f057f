#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "quadrature.hpp"

namespace pickmetrics {

/// Coefficients c_n >= 0 of 1 - 1/k(x) for the Dirichlet kernel profile
/// k(x) = log(1/(1-x))/x, i.e. the absolute Gregory coefficients.
/// Entry n lives at index n - 1.
struct CoeffTable {
    enum class Method { Recursion, KluyverIntegral, Asymptotic };

    int n_max = 0;
    std::vector<double> values;
    Method method = Method::Recursion;
    std::vector<double> err;
    std::vector<int> clamped;  // n with a rounding-negative value set to 0

    double c(int n) const {
        if (n < 1 || n > n_max) throw PreconditionError("CoeffTable: index out of range");
        return values[static_cast<std::size_t>(n - 1)];
    }

    std::vector<double> partial_sums() const {
        std::vector<double> s(values.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s[i] = acc += values[i];
        return s;
    }
};

inline const char* method_name(CoeffTable::Method m) {
    switch (m) {
        case CoeffTable::Method::Recursion: return "recursion";
        case CoeffTable::Method::KluyverIntegral: return "integral";
        case CoeffTable::Method::Asymptotic: return "asymptotic";
    }
    return "?";
}

namespace detail {

inline void clamp_coefficients(CoeffTable& t) {
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        double& v = t.values[i];
        if (v >= 0.0) continue;
        if (v > -1e-15) {
            v = 0.0;
            t.clamped.push_back(static_cast<int>(i + 1));
        } else {
            throw ConvergenceError("coefficient c_" + std::to_string(i + 1) + " is negative beyond rounding");
        }
    }
}

} // namespace detail

/// c_1..c_{n_max} by reciprocating the Taylor series of the kernel profile.
/// O(n_max^2); this is the reference table for moderate n.
inline CoeffTable gregory_recursion(int n_max) {
    require(n_max >= 1, "gregory_recursion: n_max must be >= 1");
    const std::size_t order = static_cast<std::size_t>(n_max) + 1;
    const PowerSeries k = dirichlet_kernel_series(order);
    const PowerSeries inv = series_reciprocal(k);
    const std::vector<double> bounds = reciprocal_error_bounds(k, inv);

    CoeffTable t;
    t.n_max = n_max;
    t.method = CoeffTable::Method::Recursion;
    t.values.resize(static_cast<std::size_t>(n_max));
    t.err.resize(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        t.values[n - 1] = -inv[n];
        t.err[n - 1] = bounds[n];
    }
    detail::clamp_coefficients(t);
    return t;
}

namespace detail {

/// Integrand t * prod_{j=1}^{n-1} (j - t)/j / n, with every factor <= 1.
inline double kluyver_integrand(int n, double t) {
    double prod = t / n;
    for (int j = 1; j < n; ++j) prod *= (j - t) / j;
    return prod;
}

} // namespace detail

struct IntegralValue {
    double value;
    double error;
};

/// c_n = (1/n!) * integral_0^1 t (1-t)(2-t)...(n-1-t) dt by adaptive Simpson.
/// The Gamma-function form of the integrand is never evaluated.
inline IntegralValue gregory_integral_estimate(int n, double tol) {
    require(n >= 1, "gregory_integral: n must be >= 1");
    require(tol > 0.0, "gregory_integral: tol must be positive");
    auto r = quadrature::adaptive_simpson([n](double t) { return detail::kluyver_integrand(n, t); }, 0.0, 1.0, tol);
    if (!r.converged) throw ConvergenceError("gregory_integral: quadrature did not converge for n = " + std::to_string(n));
    return {r.value, r.error};
}

inline double gregory_integral(int n, double tol) { return gregory_integral_estimate(n, tol).value; }

/// The whole table c_1..c_{n_max} from the integral, using a fixed composite
/// Gauss-Legendre rule and updating prod (j - t)/j incrementally in n, so the
/// cost is O(n_max * nodes). `err` is the difference against a rule with
/// half as many panels.
inline CoeffTable gregory_integral_table(int n_max, int panels = 8, int order = 16) {
    require(n_max >= 1, "gregory_integral_table: n_max must be >= 1");
    require(panels >= 2 && order >= 2, "gregory_integral_table: rule too small");
    const quadrature::GaussLegendre gl(order);
    const auto fine = gl.composite(0.0, 1.0, panels);
    const auto coarse = gl.composite(0.0, 1.0, panels / 2);

    struct Node {
        double t, w, prod;
    };
    auto make_nodes = [](const auto& rule) {
        std::vector<Node> nodes;
        for (const auto& [x, w] : rule) nodes.push_back({x, w, x});  // prod starts at t (n = 1)
        return nodes;
    };
    std::vector<Node> nf = make_nodes(fine), nc = make_nodes(coarse);

    CoeffTable t;
    t.n_max = n_max;
    t.method = CoeffTable::Method::KluyverIntegral;
    t.values.resize(static_cast<std::size_t>(n_max));
    t.err.resize(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        double sf = 0.0, sc = 0.0;
        for (auto& nd : nf) sf += nd.w * nd.prod;
        for (auto& nd : nc) sc += nd.w * nd.prod;
        t.values[n - 1] = sf / n;
        t.err[n - 1] = std::abs(sf - sc) / n;
        for (auto& nd : nf) nd.prod *= (n - nd.t) / n;
        for (auto& nd : nc) nd.prod *= (n - nd.t) / n;
    }
    detail::clamp_coefficients(t);
    return t;
}

namespace detail {

/// integral_0^1 t^k a^{-t-1} dt for k in {1, 2}, a >= 1, in closed form
/// (integration by parts with L = log a); a power series in L when L < 1.
inline double power_moment(int k, double a) {
    const double L = std::log(a);
    if (L < 1.0) {
        double sum = 0.0, term = 1.0;  // (-L)^m / m!
        for (int m = 0; m < 60; ++m) {
            sum += term / (m + k + 1);
            term *= -L / (m + 1);
            if (std::abs(term) < 1e-18) break;
        }
        return sum / a;
    }
    const double e = std::exp(-L);
    if (k == 1) return (1.0 - e * (1.0 + L)) / (L * L) / a;
    return (2.0 - e * (L * L + 2.0 * L + 2.0)) / (L * L * L) / a;
}

} // namespace detail

struct WendelSandwich {
    // integral_0^1 t(1-t)(n+1)^{-t-1} dt <= integral_0^1 t (n+1)^{-t-1} / Gamma(1-t) dt <= integral_0^1 t (n+1)^{-t-1} dt
    double integrand_lower;
    double integrand_upper;
    // The same bounds with the Gamma ratio controlled by Wendel's inequality at
    // x = n - t, s = t, which brackets c_n itself:
    //   integral t(1-t) n^{-t-1} dt <= c_n <= n/(n-1) * integral t n^{-t-1} dt   (n >= 2)
    double coeff_lower;
    double coeff_upper;
};

inline WendelSandwich wendel_sandwich(int n) {
    require(n >= 1, "wendel_sandwich: n must be >= 1");
    const double a = n + 1.0;
    WendelSandwich s{};
    s.integrand_upper = detail::power_moment(1, a);
    s.integrand_lower = s.integrand_upper - detail::power_moment(2, a);
    const double m1 = detail::power_moment(1, n);
    s.coeff_lower = m1 - detail::power_moment(2, n);
    s.coeff_upper = n == 1 ? 0.5 : m1 * n / (n - 1.0);
    return s;
}

/// integral_0^1 t (n+1)^{-t-1} / Gamma(1-t) dt, the leading-order proxy for c_n.
inline double gregory_proxy_integral(int n, double tol) {
    const double L = std::log(n + 1.0);
    auto f = [L](double t) { return t * std::exp(-(t + 1.0) * L) / std::tgamma(1.0 - t); };
    return quadrature::integrate(f, 0.0, 1.0, tol, "gregory_proxy_integral");
}

struct AsymptoticRow {
    long long n;
    double c_n;
    double ratio;  // c_n * n * log(n)^2, tends to 1
};

/// Ratios c_n n log(n)^2. Uses the recursion table for n <= 10^4 and the
/// Kluyver integral beyond.
inline std::vector<AsymptoticRow> asymptotic_check(std::span<const long long> n_list) {
    constexpr long long kRecursionLimit = 10000;
    long long rec_max = 0;
    for (long long n : n_list) {
        require(n >= 2, "asymptotic_check: entries must be >= 2");
        require(n <= 100'000'000, "asymptotic_check: n too large");
        if (n <= kRecursionLimit) rec_max = std::max(rec_max, n);
    }
    CoeffTable table;
    if (rec_max > 0) table = gregory_recursion(static_cast<int>(rec_max));
    std::vector<AsymptoticRow> rows;
    for (long long n : n_list) {
        const double ln = std::log(static_cast<double>(n));
        const double scale = static_cast<double>(n) * ln * ln;
        double c;
        if (n <= kRecursionLimit) {
            c = table.c(static_cast<int>(n));
        } else {
            c = gregory_integral(static_cast<int>(n), 1e-10 / scale);
        }
        rows.push_back({n, c, c * scale});
    }
    return rows;
}

/// Truncation b_N(z) = (sqrt(c_n) z^n)_{n=1..N} of the ball embedding.
struct EmbeddingVector {
    DiscPoint z;
    int N = 0;
    std::vector<cplx> coords;
    double tail = 0.0;  // >= sum_{n>N} c_n |z|^{2n}

    double norm2() const {
        double s = 0.0;
        for (const cplx& c : coords) s += std::norm(c);
        return s;
    }
    BallPoint as_ball() const { return BallPoint(coords); }
};

/// Builds b_N(z). The tail bound uses c_n <= 1/n (the c_n decrease and sum to
/// at most 1), giving sum_{n>N} c_n q^n <= q^{N+1} / ((N+1)(1-q)); not sharp.
inline EmbeddingVector embed(const DiscPoint& z, int N, const CoeffTable& table) {
    require(N >= 1, "embed: N must be >= 1");
    if (N > table.n_max) throw PreconditionError("embed: N exceeds the coefficient table");
    EmbeddingVector e;
    e.z = z;
    e.N = N;
    e.coords.resize(static_cast<std::size_t>(N));
    cplx power = z.value();
    for (int n = 1; n <= N; ++n) {
        e.coords[n - 1] = std::sqrt(table.c(n)) * power;
        power *= z.value();
    }
    const double q = z.norm2();
    e.tail = q == 0.0 ? 0.0 : std::pow(q, N + 1) / ((N + 1.0) * (1.0 - q));
    return e;
}

/// |k(z,w) - 1/(1 - <b_N(z), b_N(w)>)|.
inline double reconstruction_error(const DiscPoint& z, const DiscPoint& w, int N, const CoeffTable& table) {
    const EmbeddingVector bz = embed(z, N, table), bw = embed(w, N, table);
    cplx s{};
    for (int n = 0; n < N; ++n) s += bz.coords[n] * std::conj(bw.coords[n]);
    const cplx k = kernel_eval(KernelSpec::dirichlet(), z, w);
    return std::abs(k - 1.0 / (1.0 - s));
}

/// Propagated bound for reconstruction_error: with T = (tail_z tail_w)^{1/2}
/// bounding the omitted inner-product terms and B bounding |<b(z), b(w)>|,
///   |1/(1-S) - 1/(1-S_N)| <= T / ((1 - B)(1 - B_N)),
/// plus a rounding allowance for the N-term sum and the kernel evaluation.
inline double reconstruction_bound(const DiscPoint& z, const DiscPoint& w, int N, const CoeffTable& table) {
    const EmbeddingVector bz = embed(z, N, table), bw = embed(w, N, table);
    const double nz = bz.norm2(), nw = bw.norm2();
    const double T = std::sqrt(bz.tail * bw.tail);
    const double BN = std::sqrt(nz * nw);
    const double B = std::min(std::sqrt((nz + bz.tail) * (nw + bw.tail)), 1.0);
    const double k = std::abs(kernel_eval(KernelSpec::dirichlet(), z, w));
    const double table_err = [&] {
        double s = 0.0;
        for (int n = 1; n <= N; ++n) s += table.err[n - 1] * std::pow(std::sqrt(z.norm2() * w.norm2()), n);
        return s;
    }();
    const double rounding = (N + 8.0) * std::numeric_limits<double>::epsilon() * std::max(1.0, k * k);
    if (B >= 1.0) return std::numeric_limits<double>::infinity();
    return (T + table_err) / ((1.0 - B) * (1.0 - BN)) + rounding;
}

/// |delta_{H^2_N}(b_N(z), b_N(w)) - delta_D(z, w)|; zero for the exact embedding.
inline double embedding_isometry_gap(const DiscPoint& z, const DiscPoint& w, int N, const CoeffTable& table) {
    const BallPoint bz = embed(z, N, table).as_ball(), bw = embed(w, N, table).as_ball();
    return std::abs(delta_from_kernel(KernelSpec::drury_arveson(N), bz, bw) - dirichlet_metric(z, w));
}

/// G points spread over the disc of the given radius: radius * i/(G-1) at angle
/// 2 pi i / G + 0.3, i = 0..G-1 (the first is the origin).
inline std::vector<DiscPoint> embedding_grid(int G, double radius) {
    require(G >= 2, "embedding_grid: need G >= 2");
    require(radius > 0.0 && radius < 1.0, "embedding_grid: radius must lie in (0,1)");
    std::vector<DiscPoint> pts;
    for (int i = 0; i < G; ++i)
        pts.emplace_back(std::polar(radius * i / (G - 1.0), 2.0 * std::numbers::pi * i / G + 0.3));
    return pts;
}

/// CSV with header `n,c_n,method,err`, 17 significant digits.
inline void write_coeff_csv(std::ostream& os, std::span<const CoeffTable* const> tables) {
    os << "n,c_n,method,err\n";
    if (tables.empty()) return;
    const int n_max = tables.front()->n_max;
    char buf[128];
    for (int n = 1; n <= n_max; ++n) {
        for (const CoeffTable* t : tables) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%s,%.17g\n", n, t->c(n), method_name(t->method), t->err[n - 1]);
            os << buf;
        }
    }
}

inline void write_coeff_csv(std::ostream& os, const CoeffTable& table) {
    const CoeffTable* p = &table;
    write_coeff_csv(os, std::span<const CoeffTable* const>(&p, 1));
}

} // namespace pickmetrics
