#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pickmetrics::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;     // sum of |S2 - S1| / 15 over accepted panels
    bool converged = true;  // false if some panel hit the depth cap
    std::size_t evaluations = 0;
};

namespace detail {

template <typename F>
struct SimpsonState {
    F& f;
    int max_depth;
    Result result;
};

template <typename F>
void simpson_panel(SimpsonState<F>& st, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    st.result.evaluations += 2;
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    const double diff = both - whole;
    if (!std::isfinite(both)) {
        st.result.converged = false;
        st.result.value += both;
        return;
    }
    // The floor keeps the recursion from chasing rounding noise: the panel
    // sums themselves, and node placement, which is only exact to ulp(x).
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double fscale = (std::abs(fa) + 4.0 * std::abs(fm) + std::abs(fb)) / 6.0;
    const double floor = 16.0 * eps * (std::abs(both) + std::max(std::abs(a), std::abs(b)) * fscale);
    if (std::abs(diff) <= std::max(15.0 * tol, floor) || lm <= a || rm >= b) {
        st.result.value += both + diff / 15.0;
        st.result.error += std::abs(diff) / 15.0;
        return;
    }
    if (depth >= st.max_depth) {
        st.result.converged = false;
        st.result.value += both + diff / 15.0;
        st.result.error += std::abs(diff) / 15.0;
        return;
    }
    simpson_panel(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
    simpson_panel(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace detail

/// Adaptive Simpson with Richardson correction to absolute tolerance `tol`.
/// The interval is pre-split into `initial_panels` equal pieces so that
/// integrands with narrow features are not missed by the first estimate.
template <typename F>
Result adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40,
                        int initial_panels = 8) {
    require(tol > 0.0, "adaptive_simpson: tol must be positive");
    require(initial_panels >= 1, "adaptive_simpson: need at least one panel");
    detail::SimpsonState<F> st{f, max_depth, {}};
    if (a == b) return st.result;
    const double step = (b - a) / initial_panels;
    double x0 = a;
    double f0 = f(x0);
    st.result.evaluations += 1;
    for (int k = 0; k < initial_panels; ++k) {
        const double x1 = (k + 1 == initial_panels) ? b : a + (k + 1) * step;
        const double xm = 0.5 * (x0 + x1);
        const double fm = f(xm);
        const double f1 = f(x1);
        st.result.evaluations += 2;
        const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        detail::simpson_panel(st, x0, x1, f0, fm, f1, whole, tol / initial_panels, 0);
        x0 = x1;
        f0 = f1;
    }
    return st.result;
}

/// Same as adaptive_simpson but throws ConvergenceError when a panel hits the cap.
template <typename F>
double integrate(F&& f, double a, double b, double tol, const char* who = "integrate") {
    Result r = adaptive_simpson(std::forward<F>(f), a, b, tol);
    if (!r.converged) throw ConvergenceError(std::string(who) + ": adaptive quadrature did not converge");
    return r.value;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n) : nodes(n), weights(n) {
        require(n >= 1, "GaussLegendre: order must be positive");
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    /// Composite rule: `panels` equal panels on [a, b], returns (x, w) pairs.
    std::vector<std::pair<double, double>> composite(double a, double b, int panels) const {
        std::vector<std::pair<double, double>> out;
        out.reserve(nodes.size() * panels);
        const double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * h;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                out.emplace_back(lo + 0.5 * h * (nodes[i] + 1.0), 0.5 * h * weights[i]);
        }
        return out;
    }
};

} // namespace pickmetrics::quadrature
