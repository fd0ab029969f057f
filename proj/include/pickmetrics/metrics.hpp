#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernel.hpp"

namespace pickmetrics {

/// Identity of a metric on the disc or ball.
struct MetricId {
    enum class Kind { KernelDelta, Pseudohyperbolic, Bergman };

    Kind kind = Kind::Pseudohyperbolic;
    KernelSpec kernel{};  // KernelDelta only
    int d = 1;            // Pseudohyperbolic / Bergman only

    static MetricId kernel_delta(const KernelSpec& spec) { return {Kind::KernelDelta, spec, static_cast<int>(spec.dim())}; }
    static MetricId pseudohyperbolic(int d) {
        require(d >= 1, "MetricId: d must be >= 1");
        return {Kind::Pseudohyperbolic, KernelSpec::drury_arveson(d), d};
    }
    static MetricId bergman(int d) {
        require(d >= 1, "MetricId: d must be >= 1");
        return {Kind::Bergman, KernelSpec::drury_arveson(d), d};
    }

    std::size_t dim() const { return kind == Kind::KernelDelta ? kernel.dim() : static_cast<std::size_t>(d); }

    std::string name() const {
        switch (kind) {
            case Kind::KernelDelta: return "delta[" + kernel.name() + "]";
            case Kind::Pseudohyperbolic: return "rho[" + std::to_string(d) + "]";
            case Kind::Bergman: return "beta[" + std::to_string(d) + "]";
        }
        return "?";
    }
};

namespace detail {

// 1 - |k(z,w)|^2 / (k(z,z) k(w,w)) dips below zero only by rounding.
inline double clamp_metric_square(double v, const char* who) {
    if (v >= 0.0) return std::min(v, 1.0);
    if (v >= -1e-14) return 0.0;
    throw std::domain_error(std::string(who) + ": kernel values are inconsistent (1 - |k|^2/kk < -1e-14)");
}

} // namespace detail

/// delta_H(z, w) = (1 - |k(z,w)|^2 / (k(z,z) k(w,w)))^{1/2}.
inline double delta_from_kernel(const KernelSpec& spec, const BallPoint& z, const BallPoint& w) {
    const cplx kzw = kernel_eval(spec, z, w);
    if (z == w) return 0.0;
    const double kzz = kernel_diag(spec, z);
    const double kww = kernel_diag(spec, w);
    const double v = 1.0 - std::norm(kzw) / (kzz * kww);
    return std::sqrt(detail::clamp_metric_square(v, "delta_from_kernel"));
}

/// The ball automorphism phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>),
/// an involution exchanging a and 0.
class MoebiusMap {
public:
    explicit MoebiusMap(BallPoint center)
        : center_(std::move(center)), a2_(center_.norm2()), s_(std::sqrt(1.0 - a2_)) {}

    const BallPoint& center() const { return center_; }
    double s() const { return s_; }

    /// ||phi_a(z)||^2, evaluated without building the image vector.
    double image_norm2(const BallPoint& z) const {
        const cplx za = inner(z, center_);
        const cplx denom = 1.0 - za;
        const cplx proj = a2_ > 0.0 ? za / a2_ : cplx{};
        double acc = 0.0;
        for (std::size_t j = 0; j < z.dim(); ++j) {
            const cplx pz = proj * center_[j];
            acc += std::norm(center_[j] - pz - s_ * (z[j] - pz));
        }
        return acc / std::norm(denom);
    }

    BallPoint apply(const BallPoint& z) const {
        const cplx za = inner(z, center_);
        const cplx denom = 1.0 - za;
        const cplx proj = a2_ > 0.0 ? za / a2_ : cplx{};
        std::vector<cplx> out(z.dim());
        for (std::size_t j = 0; j < z.dim(); ++j) {
            const cplx pz = proj * center_[j];
            out[j] = (center_[j] - pz - s_ * (z[j] - pz)) / denom;
        }
        // Rounding can push an image of a near-boundary point onto the sphere.
        double n2 = 0.0;
        for (const cplx& c : out) n2 += std::norm(c);
        if (n2 >= 1.0) {
            const double scale = std::nextafter(1.0, 0.0) / std::sqrt(n2);
            for (cplx& c : out) c *= scale;
        }
        return BallPoint(std::move(out));
    }

private:
    BallPoint center_;
    double a2_;
    double s_;
};

inline BallPoint moebius_apply(const MoebiusMap& m, const BallPoint& z) {
    if (m.center().dim() != z.dim()) throw DimensionError("moebius_apply: dimension mismatch");
    return m.apply(z);
}

/// rho(z, w) = ||phi_w(z)||.
inline double pseudohyperbolic(const BallPoint& z, const BallPoint& w) {
    if (z.dim() != w.dim()) throw DimensionError("pseudohyperbolic: dimension mismatch");
    if (z == w) return 0.0;
    return std::min(1.0, std::sqrt(MoebiusMap(w).image_norm2(z)));
}

/// Poincare-Bergman metric atanh(rho).
inline double bergman(const BallPoint& z, const BallPoint& w) {
    const double rho = pseudohyperbolic(z, w);
    if (rho >= 1.0) throw std::overflow_error("bergman: rho rounds to 1, points are not resolvable");
    return std::atanh(rho);
}

/// Closed-form Dirichlet-space metric. At z = 0 or w = 0 it uses the continuous
/// extension delta(0, w)^2 = 1 - |w|^2 / log(1/(1 - |w|^2)).
inline double dirichlet_metric(const DiscPoint& z, const DiscPoint& w) {
    if (z == w) return 0.0;
    const double qz = z.norm2();
    const double qw = w.norm2();
    auto log_complement = [](double q) { return q < 0.5 ? std::log1p(-q) : std::log(1.0 - q); };
    double v;
    if (qz == 0.0 || qw == 0.0) {
        const double q = qz == 0.0 ? qw : qz;
        v = 1.0 + q / log_complement(q);
    } else {
        const double num = std::norm(detail::log_one_minus(std::conj(z.value()) * w.value()));
        v = 1.0 - num / (log_complement(qz) * log_complement(qw));
    }
    return std::sqrt(detail::clamp_metric_square(v, "dirichlet_metric"));
}

/// Largest |lambda| for which the two-point Pick matrix
///   [[k(z,z)(1 - |lambda|^2), k(z,w)], [k(w,z), k(w,w)]]
/// is positive semidefinite. By Sylvester's criterion this needs |lambda| <= 1
/// and a nonnegative determinant, which is linear in |lambda|^2.
inline double pick_two_point(const KernelSpec& spec, const BallPoint& z, const BallPoint& w) {
    const cplx kzw = kernel_eval(spec, z, w);
    if (z == w) return 0.0;
    const double kzz = kernel_diag(spec, z);
    const double kww = kernel_diag(spec, w);
    // det(t) = kzz * kww * (1 - t) - |kzw|^2 with t = |lambda|^2.
    const double det_at_zero = kzz * kww - std::norm(kzw);
    const double t = det_at_zero / (kzz * kww);
    return std::sqrt(std::min(1.0, detail::clamp_metric_square(t, "pick_two_point")));
}

inline double distance(const MetricId& m, const BallPoint& z, const BallPoint& w) {
    switch (m.kind) {
        case MetricId::Kind::KernelDelta: return delta_from_kernel(m.kernel, z, w);
        case MetricId::Kind::Pseudohyperbolic: return pseudohyperbolic(z, w);
        case MetricId::Kind::Bergman: return bergman(z, w);
    }
    return 0.0;
}

struct WeightedBounds {
    double lower;         // sqrt(a) * rho
    double value;         // (1 - (1 - rho^2)^a)^{1/2}, closed form
    double upper;         // rho
    double kernel_value;  // delta_from_kernel(WeightedDirichlet(a), z, w)
};

/// Two-sided comparison of the weighted Dirichlet metric with rho on the disc.
inline WeightedBounds weighted_metric_bounds(double a, const DiscPoint& z, const DiscPoint& w) {
    const KernelSpec spec = KernelSpec::weighted_dirichlet(a);
    const double rho = pseudohyperbolic(z, w);
    double value = 0.0;
    if (!(z == w)) {
        // log(1 - rho^2) = log(1-|z|^2) + log(1-|w|^2) - 2 log|1 - conj(z) w|
        const double log_c = std::log1p(-z.norm2()) + std::log1p(-w.norm2()) -
                             2.0 * detail::log_one_minus(std::conj(z.value()) * w.value()).real();
        value = std::sqrt(std::max(0.0, -std::expm1(a * std::min(0.0, log_c))));
    }
    return {std::sqrt(a) * rho, value, rho, delta_from_kernel(spec, z, w)};
}

} // namespace pickmetrics
