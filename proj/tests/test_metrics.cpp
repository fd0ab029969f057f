#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <pickmetrics/metrics.hpp>

#include "oracles.hpp"

using namespace pickmetrics;

namespace {

double dirichlet_origin_oracle(double r) {
    const auto k = oracle::dirichlet_profile_series(oracle::ld(r) * r).real();
    return static_cast<double>(std::sqrt(1.0L - 1.0L / k));
}

}  // namespace

TEST(DeltaFromKernel, DiagonalIsZero) {
    for (const auto& spec : {KernelSpec::hardy(), KernelSpec::dirichlet(), KernelSpec::weighted_dirichlet(0.4)}) {
        const DiscPoint z(cplx(0.3, -0.6));
        EXPECT_EQ(delta_from_kernel(spec, z, z), 0.0);
        EXPECT_EQ(pick_two_point(spec, z, z), 0.0);
    }
}

TEST(DeltaFromKernel, HardyIsPseudohyperbolic) {
    EXPECT_NEAR(delta_from_kernel(KernelSpec::hardy(), DiscPoint(0.5), DiscPoint(0.25)), 0.25 / 0.875, 1e-14);
    EXPECT_NEAR(pick_two_point(KernelSpec::hardy(), DiscPoint(0.5), DiscPoint(0.25)), 0.25 / 0.875, 1e-14);
}

TEST(DeltaFromKernel, DirichletFromOriginMatchesSeries) {
    const double expected = dirichlet_origin_oracle(0.5);
    EXPECT_NEAR(delta_from_kernel(KernelSpec::dirichlet(), DiscPoint(0.0), DiscPoint(cplx(0.0, 0.5))), expected, 1e-12);
    EXPECT_NEAR(dirichlet_metric(DiscPoint(0.0), DiscPoint(0.5)), expected, 1e-12);
    EXPECT_NEAR(expected, 0.36192, 5e-5);
}

TEST(DeltaFromKernel, ClampThreshold) {
    EXPECT_EQ(detail::clamp_metric_square(-5e-15, "t"), 0.0);
    EXPECT_THROW(detail::clamp_metric_square(-1e-13, "t"), std::domain_error);
    EXPECT_EQ(detail::clamp_metric_square(1.5, "t"), 1.0);
}

TEST(Moebius, OriginCenterIsNegation) {
    const MoebiusMap m(BallPoint::origin(2));
    const BallPoint z({cplx(0.3, 0.1), cplx(-0.2, 0.4)});
    const BallPoint img = moebius_apply(m, z);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(img[j] + z[j]), 0.0, 1e-16);
}

TEST(Moebius, ExchangesCenterAndOrigin) {
    const BallPoint a({cplx(0.5), cplx(0.0)});
    const MoebiusMap m(a);
    const BallPoint at_a = moebius_apply(m, a), at_0 = moebius_apply(m, BallPoint::origin(2));
    EXPECT_NEAR(std::sqrt(at_a.norm2()), 0.0, 1e-15);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(at_0[j] - a[j]), 0.0, 1e-15);
    EXPECT_NEAR(m.s() * m.s() + a.norm2(), 1.0, 1e-14);
}

TEST(Moebius, ScalarFormula) {
    const BallPoint img = moebius_apply(MoebiusMap(BallPoint({cplx(0.5)})), BallPoint({cplx(0.25)}));
    EXPECT_NEAR(img[0].real(), 0.25 / 0.875, 1e-15);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto a = oracle::random_ball(rng, 1, 0.95), z = oracle::random_ball(rng, 1, 0.95);
        const auto ref = oracle::moebius_disc({a[0].real(), a[0].imag()}, {z[0].real(), z[0].imag()});
        const cplx got = moebius_apply(MoebiusMap(a), z)[0];
        EXPECT_NEAR(got.real(), static_cast<double>(ref.real()), 1e-13);
        EXPECT_NEAR(got.imag(), static_cast<double>(ref.imag()), 1e-13);
    }
}

TEST(Moebius, IsAnInvolution) {
    std::mt19937_64 rng(8);
    for (int d = 1; d <= 4; ++d) {
        for (int i = 0; i < 100; ++i) {
            const auto a = oracle::random_ball(rng, d, 0.9), z = oracle::random_ball(rng, d, 0.9);
            const MoebiusMap m(a);
            const BallPoint back = moebius_apply(m, moebius_apply(m, z));
            for (std::size_t j = 0; j < z.dim(); ++j) EXPECT_NEAR(std::abs(back[j] - z[j]), 0.0, 1e-12);
        }
    }
}

TEST(Moebius, DimensionMismatch) {
    EXPECT_THROW(moebius_apply(MoebiusMap(BallPoint::origin(2)), BallPoint::origin(3)), DimensionError);
    EXPECT_THROW(pseudohyperbolic(BallPoint::origin(2), BallPoint::origin(3)), DimensionError);
}

TEST(Pseudohyperbolic, Examples) {
    const BallPoint w({cplx(0.3, 0.4), cplx(0.1, -0.2)});
    EXPECT_NEAR(pseudohyperbolic(BallPoint::origin(2), w), std::sqrt(w.norm2()), 1e-15);
    const BallPoint z({cplx(0.3), cplx(0.1)});
    EXPECT_EQ(pseudohyperbolic(z, z), 0.0);
    EXPECT_NEAR(pseudohyperbolic(BallPoint({cplx(0.5), cplx(0.0)}), BallPoint({cplx(0.0), cplx(0.5)})),
                std::sqrt(1.0 - 0.75 * 0.75), 1e-15);
}

TEST(Pseudohyperbolic, MatchesLongDoubleIdentity) {
    std::mt19937_64 rng(9);
    for (int d = 1; d <= 4; ++d) {
        for (int i = 0; i < 300; ++i) {
            const auto z = oracle::random_ball(rng, d, 0.99), w = oracle::random_ball(rng, d, 0.99);
            EXPECT_NEAR(pseudohyperbolic(z, w), static_cast<double>(oracle::pseudohyperbolic(z, w)), 1e-12);
        }
    }
}

TEST(Bergman, Examples) {
    EXPECT_NEAR(bergman(DiscPoint(0.0), DiscPoint(0.5)), std::atanh(0.5), 1e-15);
    EXPECT_NEAR(bergman(DiscPoint(0.0), DiscPoint(0.5)), 0.5493061, 1e-7);
    EXPECT_EQ(bergman(DiscPoint(0.2), DiscPoint(0.2)), 0.0);
    const double r = 1.0 - 1e-8;
    EXPECT_NEAR(bergman(DiscPoint(0.0), DiscPoint(r)), 0.5 * std::log(2.0 / 1e-8), 1e-4);
    EXPECT_NEAR(bergman(DiscPoint(0.0), DiscPoint(r)), 9.5569, 1e-4);
}

TEST(Bergman, OverflowWhenUnresolvable) {
    EXPECT_THROW(bergman(DiscPoint(std::nextafter(1.0, 0.0)), DiscPoint(-std::nextafter(1.0, 0.0))), std::overflow_error);
}

TEST(DirichletMetric, ClosedFormExamples) {
    EXPECT_EQ(dirichlet_metric(DiscPoint(0.4), DiscPoint(0.4)), 0.0);
    const double num = std::log(1.25), den = std::log(0.75);
    const double expected = std::sqrt(1.0 - (num / den) * (num / den));
    EXPECT_NEAR(dirichlet_metric(DiscPoint(0.5), DiscPoint(-0.5)), expected, 1e-14);
    EXPECT_NEAR(expected, 0.6312, 5e-4);
    EXPECT_NEAR(pick_two_point(KernelSpec::dirichlet(), DiscPoint(0.5), DiscPoint(-0.5)), expected, 1e-12);
}

TEST(DirichletMetric, AgreesWithKernelFormula) {
    std::mt19937_64 rng(10);
    for (int i = 0; i < 1000; ++i) {
        const double rmax = i % 2 ? 0.999999 : 0.9;
        const auto z = oracle::random_ball(rng, 1, rmax), w = oracle::random_ball(rng, 1, rmax);
        const double closed = dirichlet_metric(z.as_disc(), w.as_disc());
        EXPECT_NEAR(closed, delta_from_kernel(KernelSpec::dirichlet(), z, w), 1e-12);
    }
    for (double r : {1e-9, 1e-4, 0.3, 0.9, 1.0 - 1e-9}) {
        EXPECT_NEAR(dirichlet_metric(DiscPoint(0.0), DiscPoint(r)),
                    delta_from_kernel(KernelSpec::dirichlet(), DiscPoint(0.0), DiscPoint(r)), 1e-12);
    }
}

TEST(DirichletMetric, ContinuousAtOrigin) {
    const DiscPoint w(cplx(0.2, 0.5));
    const double at0 = dirichlet_metric(DiscPoint(0.0), w);
    EXPECT_NEAR(dirichlet_metric(DiscPoint(cplx(1e-7, 0.0)), w), at0, 1e-6);
}

TEST(DirichletMetric, RotationInvariance) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < 500; ++i) {
        const auto z = oracle::random_ball(rng, 1, 0.99).as_disc(), w = oracle::random_ball(rng, 1, 0.99).as_disc();
        const cplx rot = std::polar(1.0, angle(rng));
        const DiscPoint zr(z.value() * rot), wr(w.value() * rot);
        if (zr.norm2() >= 1.0 || wr.norm2() >= 1.0) continue;
        EXPECT_NEAR(dirichlet_metric(zr, wr), dirichlet_metric(z, w), 1e-13);
    }
}

TEST(MetricAxioms, SymmetryAndSeparation) {
    std::mt19937_64 rng(13);
    const MetricId metrics[] = {MetricId::kernel_delta(KernelSpec::hardy()), MetricId::kernel_delta(KernelSpec::dirichlet()),
                                MetricId::kernel_delta(KernelSpec::weighted_dirichlet(0.5)), MetricId::pseudohyperbolic(1),
                                MetricId::bergman(1)};
    for (const auto& m : metrics) {
        for (int i = 0; i < 300; ++i) {
            const auto z = oracle::random_ball(rng, 1, 0.95), w = oracle::random_ball(rng, 1, 0.95);
            const double a = distance(m, z, w), b = distance(m, w, z);
            EXPECT_NEAR(a, b, 1e-14 * std::max(1.0, a)) << m.name();
            EXPECT_GT(a, 0.0);
            EXPECT_EQ(distance(m, z, z), 0.0);
        }
    }
}

TEST(MetricAxioms, TriangleInequalityRhoAndBeta) {
    std::mt19937_64 rng(14);
    for (int d = 1; d <= 4; ++d) {
        for (int i = 0; i < 500; ++i) {
            const auto x = oracle::random_ball(rng, d, 0.95), y = oracle::random_ball(rng, d, 0.95),
                       z = oracle::random_ball(rng, d, 0.95);
            EXPECT_LE(pseudohyperbolic(x, z), pseudohyperbolic(x, y) + pseudohyperbolic(y, z) + 1e-12);
            EXPECT_LE(bergman(x, z), bergman(x, y) + bergman(y, z) + 1e-12);
        }
    }
}

TEST(MetricConsistency, PseudohyperbolicKernelAndPick) {
    std::mt19937_64 rng(15);
    for (int d = 1; d <= 4; ++d) {
        const auto spec = KernelSpec::drury_arveson(d);
        for (int i = 0; i < 500; ++i) {
            const auto z = oracle::random_ball(rng, d, 0.99), w = oracle::random_ball(rng, d, 0.99);
            const double rho = pseudohyperbolic(z, w);
            EXPECT_NEAR(rho, delta_from_kernel(spec, z, w), 1e-12);
            EXPECT_NEAR(rho, pick_two_point(spec, z, w), 1e-12);
        }
    }
}

TEST(MetricConsistency, MoebiusInvariance) {
    std::mt19937_64 rng(16);
    for (int d = 1; d <= 4; ++d) {
        for (int i = 0; i < 500; ++i) {
            const auto a = oracle::random_ball(rng, d, 0.9), z = oracle::random_ball(rng, d, 0.9),
                       w = oracle::random_ball(rng, d, 0.9);
            const MoebiusMap m(a);
            EXPECT_NEAR(pseudohyperbolic(moebius_apply(m, z), moebius_apply(m, w)), pseudohyperbolic(z, w), 1e-11);
        }
    }
}

TEST(MetricConsistency, BergmanOrdersLikeRho) {
    std::mt19937_64 rng(17);
    std::vector<double> rho, beta;
    for (int i = 0; i < 400; ++i) {
        const auto z = oracle::random_ball(rng, 2, 0.95), w = oracle::random_ball(rng, 2, 0.95);
        rho.push_back(pseudohyperbolic(z, w));
        beta.push_back(bergman(z, w));
        EXPECT_EQ(beta.back(), std::atanh(rho.back()));
    }
    std::vector<std::size_t> ir(rho.size()), ib(rho.size());
    std::iota(ir.begin(), ir.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    std::stable_sort(ir.begin(), ir.end(), [&](auto a, auto b) { return rho[a] < rho[b]; });
    std::stable_sort(ib.begin(), ib.end(), [&](auto a, auto b) { return beta[a] < beta[b]; });
    EXPECT_EQ(ir, ib);
}

TEST(WeightedBoundsTest, Examples) {
    const auto same = weighted_metric_bounds(0.5, DiscPoint(0.3), DiscPoint(0.3));
    EXPECT_EQ(same.lower, 0.0);
    EXPECT_EQ(same.value, 0.0);
    EXPECT_EQ(same.upper, 0.0);
    const auto b = weighted_metric_bounds(0.5, DiscPoint(0.6), DiscPoint(0.0));
    EXPECT_NEAR(b.upper, 0.6, 1e-15);
    EXPECT_NEAR(b.value, std::sqrt(0.2), 1e-14);
    EXPECT_NEAR(b.lower, std::sqrt(0.5) * 0.6, 1e-15);
    EXPECT_NEAR(b.kernel_value, b.value, 1e-12);
    EXPECT_THROW(weighted_metric_bounds(1.0, DiscPoint(0.1), DiscPoint(0.2)), PreconditionError);
}

TEST(WeightedBoundsTest, SandwichOnRandomPairs) {
    std::mt19937_64 rng(18);
    for (double a : {0.05, 0.3, 0.7, 0.95}) {
        for (int i = 0; i < 400; ++i) {
            const auto z = oracle::random_ball(rng, 1, 0.999).as_disc(), w = oracle::random_ball(rng, 1, 0.999).as_disc();
            const auto b = weighted_metric_bounds(a, z, w);
            EXPECT_LE(b.lower, b.value + 1e-12);
            EXPECT_LE(b.value, b.upper + 1e-12);
            EXPECT_NEAR(b.value, b.kernel_value, 1e-12);
        }
    }
}

TEST(WeightedBoundsTest, ApproachesRhoAsAToOne) {
    for (int i = 0; i < 10; ++i) {
        const DiscPoint z(std::polar(0.09 * i, 0.4 * i)), w(std::polar(0.5, -0.3 * i));
        const auto b = weighted_metric_bounds(0.999, z, w);
        EXPECT_NEAR(b.value, b.upper, 1e-3);
    }
}
