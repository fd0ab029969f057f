#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace pickmetrics {

using cplx = std::complex<double>;

/// A point of the open unit disc.
class DiscPoint {
public:
    DiscPoint() = default;
    DiscPoint(cplx value) : value_(value) { validate(); }  // NOLINT: implicit by intent
    DiscPoint(double re, double im = 0.0) : DiscPoint(cplx(re, im)) {}

    cplx value() const { return value_; }
    double abs() const { return std::abs(value_); }
    double norm2() const { return std::norm(value_); }

    friend bool operator==(const DiscPoint&, const DiscPoint&) = default;

private:
    void validate() const {
        if (!std::isfinite(value_.real()) || !std::isfinite(value_.imag()))
            throw DomainError("DiscPoint: non-finite coordinate");
        if (std::norm(value_) >= 1.0) throw DomainError("DiscPoint: |z| must be < 1");
    }

    cplx value_{0.0, 0.0};
};

/// A point of the open unit ball in C^d.
class BallPoint {
public:
    BallPoint() : coords_(1, cplx{}) {}
    explicit BallPoint(std::vector<cplx> coords) : coords_(std::move(coords)) { validate(); }
    BallPoint(std::initializer_list<cplx> coords) : coords_(coords) { validate(); }
    BallPoint(const DiscPoint& z) : coords_{z.value()} {}  // NOLINT: disc embeds as d = 1

    static BallPoint origin(std::size_t dim) { return BallPoint(std::vector<cplx>(dim, cplx{})); }

    std::size_t dim() const { return coords_.size(); }
    std::span<const cplx> coords() const { return coords_; }
    cplx operator[](std::size_t i) const { return coords_[i]; }

    double norm2() const {
        double s = 0.0;
        for (const cplx& c : coords_) s += std::norm(c);
        return s;
    }

    DiscPoint as_disc() const {
        if (dim() != 1) throw DimensionError("BallPoint: expected a disc point (dim 1)");
        return DiscPoint(coords_[0]);
    }

    friend bool operator==(const BallPoint&, const BallPoint&) = default;

private:
    void validate() const {
        if (coords_.empty()) throw DimensionError("BallPoint: dimension must be positive");
        for (const cplx& c : coords_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw DomainError("BallPoint: non-finite coordinate");
        if (norm2() >= 1.0) throw DomainError("BallPoint: norm must be < 1");
    }

    std::vector<cplx> coords_;
};

/// <z, w> = sum z_j conj(w_j).
inline cplx inner(const BallPoint& z, const BallPoint& w) {
    if (z.dim() != w.dim()) throw DimensionError("inner: dimension mismatch");
    cplx s{};
    for (std::size_t j = 0; j < z.dim(); ++j) s += z[j] * std::conj(w[j]);
    return s;
}

/// Which reproducing kernel. Every supported kernel is a function of the
/// inner product s = <z, w> alone.
struct KernelSpec {
    enum class Kind { Hardy, Dirichlet, WeightedDirichlet, DruryArveson };

    Kind kind = Kind::Dirichlet;
    double a = 0.0;  // WeightedDirichlet only
    int d = 1;       // DruryArveson only

    static KernelSpec hardy() { return {Kind::Hardy, 0.0, 1}; }
    static KernelSpec dirichlet() { return {Kind::Dirichlet, 0.0, 1}; }
    static KernelSpec weighted_dirichlet(double a) {
        require(a > 0.0 && a < 1.0, "WeightedDirichlet: a must lie in (0,1)");
        return {Kind::WeightedDirichlet, a, 1};
    }
    static KernelSpec drury_arveson(int d) {
        require(d >= 1, "DruryArveson: d must be >= 1");
        return {Kind::DruryArveson, 0.0, d};
    }

    bool on_disc() const { return kind != Kind::DruryArveson; }
    std::size_t dim() const { return on_disc() ? 1 : static_cast<std::size_t>(d); }

    std::string name() const {
        switch (kind) {
            case Kind::Hardy: return "hardy";
            case Kind::Dirichlet: return "dirichlet";
            case Kind::WeightedDirichlet: return "weighted(" + std::to_string(a) + ")";
            case Kind::DruryArveson: return "drury-arveson(" + std::to_string(d) + ")";
        }
        return "?";
    }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

namespace detail {

/// log(1 - x) for |x| < 1. Small |x| goes through log1p on |1-x|^2 - 1 = |x|^2 - 2 Re x
/// so the result keeps full relative accuracy as x -> 0; near x = 1 the
/// subtraction 1 - x is exact.
inline cplx log_one_minus(cplx x) {
    if (std::abs(x) < 0.5) {
        const double t = std::norm(x) - 2.0 * x.real();
        return {0.5 * std::log1p(t), std::atan2(-x.imag(), 1.0 - x.real())};
    }
    return std::log(cplx(1.0 - x.real(), -x.imag()));
}

/// Kernel profile k(s) as a function of s = <z, w>.
inline cplx kernel_profile(const KernelSpec& spec, cplx s) {
    switch (spec.kind) {
        case KernelSpec::Kind::Hardy:
        case KernelSpec::Kind::DruryArveson: return 1.0 / (1.0 - s);
        case KernelSpec::Kind::Dirichlet: {
            if (std::abs(s) < 1e-8) return 1.0 + s / 2.0 + s * s / 3.0;
            return -log_one_minus(s) / s;
        }
        case KernelSpec::Kind::WeightedDirichlet: return std::exp(-spec.a * log_one_minus(s));
    }
    return {};
}

/// Diagonal profile at q = |z|^2, with 1 - q supplied separately so callers that
/// know the complement exactly can pass it in.
inline double kernel_profile_diag(const KernelSpec& spec, double q, double one_minus_q) {
    switch (spec.kind) {
        case KernelSpec::Kind::Hardy:
        case KernelSpec::Kind::DruryArveson: return 1.0 / one_minus_q;
        case KernelSpec::Kind::Dirichlet: {
            if (q == 0.0) return 1.0;
            const double log_c = q < 0.5 ? std::log1p(-q) : std::log(one_minus_q);
            return -log_c / q;
        }
        case KernelSpec::Kind::WeightedDirichlet: {
            const double log_c = q < 0.5 ? std::log1p(-q) : std::log(one_minus_q);
            return std::exp(-spec.a * log_c);
        }
    }
    return 0.0;
}

inline void check_domain(const KernelSpec& spec, const BallPoint& z) {
    if (spec.on_disc()) {
        if (z.dim() != 1) throw DimensionError("kernel: disc kernels take points of dimension 1");
    } else if (z.dim() != spec.dim()) {
        throw DimensionError("kernel: point dimension does not match Drury-Arveson d");
    }
}

} // namespace detail

/// k(z, w). Dirichlet's removable singularity at z conj(w) = 0 takes the series value 1.
inline cplx kernel_eval(const KernelSpec& spec, const BallPoint& z, const BallPoint& w) {
    detail::check_domain(spec, z);
    detail::check_domain(spec, w);
    return detail::kernel_profile(spec, inner(z, w));
}

/// k(z, z) > 0, evaluated without cancellation in 1 - |z|^2 for small |z|.
inline double kernel_diag(const KernelSpec& spec, const BallPoint& z) {
    detail::check_domain(spec, z);
    const double q = z.norm2();
    return detail::kernel_profile_diag(spec, q, 1.0 - q);
}

/// Truncated real power series sum_{n < N} coeffs[n] x^n.
class PowerSeries {
public:
    PowerSeries() = default;
    explicit PowerSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}
    PowerSeries(std::initializer_list<double> coeffs) : coeffs_(coeffs) {}

    std::size_t order() const { return coeffs_.size(); }
    std::span<const double> coeffs() const { return coeffs_; }
    double operator[](std::size_t n) const { return coeffs_[n]; }

    template <typename T>
    T evaluate(T x) const {
        T acc{};
        for (std::size_t n = coeffs_.size(); n-- > 0;) acc = acc * x + coeffs_[n];
        return acc;
    }

private:
    std::vector<double> coeffs_;
};

/// Product truncated to the shorter order.
inline PowerSeries series_multiply(const PowerSeries& p, const PowerSeries& q) {
    const std::size_t n = std::min(p.order(), q.order());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n; ++j) out[i + j] += p[i] * q[j];
    return PowerSeries(std::move(out));
}

/// q with p * q = 1 + O(x^N):  q_0 = 1/p_0,  q_n = -(1/p_0) sum_{j=1..n} p_j q_{n-j}.
inline PowerSeries series_reciprocal(const PowerSeries& p) {
    require(p.order() >= 1, "series_reciprocal: empty series");
    if (p[0] == 0.0) throw PreconditionError("series_reciprocal: zero constant term");
    const std::size_t n = p.order();
    std::vector<double> q(n, 0.0);
    const double inv = 1.0 / p[0];
    q[0] = inv;
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += p[j] * q[k - j];
        q[k] = -inv * s;
    }
    return PowerSeries(std::move(q));
}

/// First-order forward-error bound for q = series_reciprocal(p). Step k commits a
/// local error eta_k <= (k + 1) u / |p_0| * sum_{j=1..k} |p_j q_{k-j}|; the recursion
/// propagates it as p * e = p_0 * eta, i.e. e = p_0 * (eta convolved with q).
inline std::vector<double> reciprocal_error_bounds(const PowerSeries& p, const PowerSeries& q) {
    const double u = std::numeric_limits<double>::epsilon() / 2.0;
    const std::size_t n = std::min(p.order(), q.order());
    std::vector<double> local(n, 0.0), err(n, 0.0);
    if (n == 0) return err;
    local[0] = u * std::abs(q[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += std::abs(p[j] * q[k - j]);
        local[k] = (k + 1) * u * s / std::abs(p[0]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t m = 0; m <= k; ++m) s += std::abs(q[k - m]) * local[m];
        err[k] = std::abs(p[0]) * s;
    }
    return err;
}

/// Taylor coefficients 1/(n+1) of the Dirichlet kernel profile log(1/(1-x))/x.
inline PowerSeries dirichlet_kernel_series(std::size_t order) {
    std::vector<double> c(order);
    for (std::size_t n = 0; n < order; ++n) c[n] = 1.0 / static_cast<double>(n + 1);
    return PowerSeries(std::move(c));
}

} // namespace pickmetrics
