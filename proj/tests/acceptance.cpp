// Acceptance run: one PASS/FAIL line per criterion, each with its tolerance
// and wall-clock limit. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <pickmetrics/cli.hpp>
#include <pickmetrics/pickmetrics.hpp>

#include "oracles.hpp"

using namespace pickmetrics;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("violated: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> body;
};

Outcome gregory_cross_method() {
    Outcome o;
    const auto rec = gregory_recursion(10000);
    double worst = 0.0;
    for (int n = 1; n <= 200; ++n) worst = std::max(worst, std::abs(gregory_integral(n, 1e-13) - rec.c(n)));
    o.require(worst <= 1e-11, "integral vs recursion within 1e-11 for n <= 200");
    o.require(std::abs(rec.c(1) - 0.5) <= 1e-12 && std::abs(rec.c(2) - 1.0 / 12) <= 1e-12 &&
                  std::abs(rec.c(3) - 1.0 / 24) <= 1e-12,
              "c_1, c_2, c_3 = 1/2, 1/12, 1/24");
    bool nonneg = true;
    for (double v : rec.values) nonneg = nonneg && v >= 0.0;
    o.require(nonneg, "c_n >= 0 for n <= 1e4");
    o.note("max |diff| = " + fmt(worst, 3));
    return o;
}

Outcome gregory_asymptotics() {
    Outcome o;
    const std::vector<long long> ns{100000, 1000000};
    const auto rows = asymptotic_check(ns);
    const auto& row = rows.back();
    o.require(row.ratio >= 0.8 && row.ratio <= 1.2, "c_n n log(n)^2 in [0.8, 1.2] at n = 1e6");
    o.note("ratio(1e6) = " + fmt(row.ratio));
    const auto rec = gregory_recursion(10000);
    for (int n : {1000, 10000, 100000, 1000000}) {
        const auto s = wendel_sandwich(n);
        const double proxy = gregory_proxy_integral(n, 1e-16);
        o.require(s.integrand_lower <= proxy && proxy <= s.integrand_upper,
                  "integrand sandwich brackets the corrected integral at n = " + std::to_string(n));
        const double c = n <= 10000 ? rec.c(n) : n == 100000 ? rows.front().c_n : row.c_n;
        o.require(s.coeff_lower <= c && c <= s.coeff_upper, "Wendel bounds bracket c_n at n = " + std::to_string(n));
    }
    return o;
}

Outcome kernel_reconstruction() {
    Outcome o;
    const auto table = gregory_recursion(200);
    const auto grid = embedding_grid(5, 0.7);
    double err = 0.0, gap = 0.0;
    for (const auto& z : grid)
        for (const auto& w : grid) {
            err = std::max(err, reconstruction_error(z, w, 200, table));
            gap = std::max(gap, embedding_isometry_gap(z, w, 200, table));
        }
    o.require(err <= 1e-8, "reconstruction_error <= 1e-8");
    o.require(gap <= 1e-6, "embedding_isometry_gap <= 1e-6");
    o.note("max error = " + fmt(err, 3) + ", max gap = " + fmt(gap, 3));
    return o;
}

Outcome metric_consistency() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    double worst = 0.0, worst_inv = 0.0;
    for (int d = 1; d <= 4; ++d) {
        const auto spec = KernelSpec::drury_arveson(d);
        for (int i = 0; i < 1000; ++i) {
            const auto z = oracle::random_ball(rng, d, 0.99), w = oracle::random_ball(rng, d, 0.99);
            const double rho = pseudohyperbolic(z, w);
            worst = std::max({worst, std::abs(rho - delta_from_kernel(spec, z, w)), std::abs(rho - pick_two_point(spec, z, w))});
        }
        for (int i = 0; i < 1000; ++i) {
            const auto a = oracle::random_ball(rng, d, 0.9), z = oracle::random_ball(rng, d, 0.9),
                       w = oracle::random_ball(rng, d, 0.9);
            const MoebiusMap m(a);
            worst_inv = std::max(worst_inv,
                                 std::abs(pseudohyperbolic(moebius_apply(m, z), moebius_apply(m, w)) - pseudohyperbolic(z, w)));
        }
    }
    o.require(worst <= 1e-12, "rho = kernel delta = pick value within 1e-12");
    o.require(worst_inv <= 1e-11, "Moebius invariance within 1e-11");
    o.note("max diff = " + fmt(worst, 3) + ", max invariance defect = " + fmt(worst_inv, 3));
    return o;
}

Outcome length_formulas() {
    Outcome o;
    const auto rho = polyline_length(MetricId::pseudohyperbolic(1), radial_segment(0.0, 0.5), 1e-6);
    o.require(std::abs(rho.value - std::atanh(0.5)) <= 1e-5, "rho polyline length of [0, 0.5] = atanh(0.5) within 1e-5");
    o.require(g_density(DiscPoint(0.0)) == 0.5, "g(0) = 1/2 exactly");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rad(0.0, 0.95), ang(0.0, 2.0 * std::numbers::pi);
    double worst_g = 0.0;
    for (int i = 0; i < 400; ++i) {
        const cplx z = i == 0 ? cplx(0.95) : std::polar(rad(rng), ang(rng));
        const double fd =
            static_cast<double>(oracle::mixed_laplacian(oracle::log_dirichlet_diag, z.real(), z.imag(), 1e-3L));
        worst_g = std::max(worst_g, std::abs(g_density(DiscPoint(z)) - fd));
    }
    o.require(worst_g <= 1e-5, "g matches finite-difference mixed derivative within 1e-5 on |z| <= 0.95");
    const double riem = riemannian_length_dirichlet(radial_segment(0.0, 0.9), 1e-11);
    const auto poly = polyline_length(MetricId::kernel_delta(KernelSpec::dirichlet()), radial_segment(0.0, 0.9), 1e-7);
    o.require(std::abs(riem - poly.value) <= 1e-6, "Riemannian vs polyline Dirichlet length at r = 0.9 within 1e-6");
    o.note("rho length = " + fmt(rho.value, 9) + ", max g defect = " + fmt(worst_g, 3) +
           ", length gap = " + fmt(std::abs(riem - poly.value), 3));
    return o;
}

Outcome radial_asymptotic() {
    Outcome o;
    std::vector<double> ratios;
    for (int k = 4; k <= 12; ++k) ratios.push_back(radial_length_ratio(std::pow(10.0, -k)));
    const double last = ratios.back();
    o.require(last >= 0.9 && last <= 1.1, "ratio in [0.9, 1.1] at u = 1e-12");
    bool monotone = true;
    for (std::size_t i = 1; i < ratios.size(); ++i)
        monotone = monotone && std::abs(ratios[i] - 1.0) <= std::abs(ratios[i - 1] - 1.0) + 0.01;
    o.require(monotone, "ratios at u = 1e-4..1e-12 move monotonically toward 1 (slack 0.01)");
    o.note("ratio(1e-4) = " + fmt(ratios.front()) + ", ratio(1e-12) = " + fmt(last));
    return o;
}

Outcome circle_asymptotic_check() {
    Outcome o;
    const double v = circle_gap_distance(1e-8);
    o.require(std::abs(v - kCircleLimit) <= 0.01, "delta(r e^{i theta(r)}, r) within 0.01 of sqrt(3/4) at u = 1e-8");
    for (double r : {0.5, 0.9, 0.99, 1.0 - 1e-6})
        o.require(circle_monotonicity_check(r, 1000), "monotonicity on the circle at r = " + fmt(r, 8));
    o.note("value(1e-8) = " + fmt(v, 8) + ", gap = " + fmt(kCircleLimit - v, 4));
    return o;
}

Outcome lattice_count() {
    Outcome o;
    try {
        const auto lat = circle_lattice_complement(1e-6, 0.8);
        o.require(lat.set.size() >= 1000, "|D| >= 1000");
        o.require(lat.set.min_pairwise >= 0.8, "certificate min pairwise >= eps");
        std::vector<BallPoint> sub;
        const std::size_t stride = std::max<std::size_t>(1, lat.set.size() / 2000);
        for (std::size_t i = 0; i < lat.set.size() && sub.size() < 2000; i += stride) sub.push_back(lat.set.points[i]);
        const auto full = certify_separated(sub, MetricId::kernel_delta(KernelSpec::dirichlet()), 0.8, 2000);
        o.require(full.full_certificate && sub.size() == 2000, "full pairwise certification on a 2000-point subsample");
        o.note("|D| = " + std::to_string(lat.set.size()) + ", subsample min = " + fmt(full.min_pairwise, 8));
    } catch (const std::exception& e) {
        o.require(false, std::string("lattice construction: ") + e.what());
    }
    return o;
}

Outcome packing_bound() {
    Outcome o;
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> dim(1, 4);
    std::uniform_real_distribution<double> rad(0.3, 0.95), eps(0.25, 0.9);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = dim(rng);
        const double r = rad(rng), e = eps(rng);
        std::vector<BallPoint> pts;
        for (int i = 0; i < 1000; ++i) pts.push_back(uniform_ball_point(rng, d, r));
        const auto s = greedy_separated(pts, MetricId::pseudohyperbolic(d), e);
        const double bound = duren_weir_bound(d, r, e);
        worst = std::max(worst, static_cast<double>(s.size()) / bound);
    }
    o.require(worst <= 1.0, "greedy count never exceeds the packing bound");
    o.note("max count/bound = " + fmt(worst, 3));
    return o;
}

Outcome obstruction() {
    Outcome o;
    const auto grid = log_grid(15);
    std::string found;
    for (int d = 1; d <= 6; ++d) {
        const auto rep = obstruction_report(d, 1.0, 1.0, 0.8, grid);
        o.require(rep.r_star_u.has_value(), "r_star found for d = " + std::to_string(d));
        const auto sl = final_decade_slopes(rep);
        o.require(std::abs(sl.lower + 0.5) <= 0.02, "lower slope -1/2 for d = " + std::to_string(d));
        o.require(std::abs(sl.upper + static_cast<double>(d) / (2 * d + 1)) <= 0.02,
                  "upper slope -d/(2d+1) for d = " + std::to_string(d));
        found += (found.empty() ? "" : ",") + (rep.r_star_u ? fmt(*rep.r_star_u, 2) : std::string("none"));
    }
    o.note("u_star by d = [" + found + "]");
    return o;
}

Outcome weighted_dirichlet() {
    Outcome o;
    std::vector<DiscPoint> pts;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const cplx z(-0.98 + 1.96 * i / 19.0, -0.98 + 1.96 * j / 19.0);
            if (std::abs(z) < 0.99) pts.emplace_back(z);
        }
    for (double a : {0.1, 0.5, 0.9}) {
        bool ordered = true;
        for (const auto& z : pts)
            for (const auto& w : pts) {
                const auto b = weighted_metric_bounds(a, z, w);
                ordered = ordered && b.lower <= b.kernel_value + 1e-12 && b.kernel_value <= b.upper + 1e-12;
            }
        o.require(ordered, "sqrt(a) rho <= delta_a <= rho at a = " + fmt(a, 2));
        std::vector<std::pair<BallPoint, BallPoint>> samples;
        for (const auto& z : pts) samples.emplace_back(z, z);
        const auto dist = distortion_estimate(samples, MetricId::kernel_delta(KernelSpec::weighted_dirichlet(a)),
                                              MetricId::pseudohyperbolic(1));
        o.require(dist.lip_lower >= 1.0 - 1e-6 && dist.lip_upper <= 1.0 / std::sqrt(a) + 1e-6,
                  "identity distortion inside [1, a^{-1/2}] at a = " + fmt(a, 2));
        o.note("a=" + fmt(a, 2) + ": [" + fmt(dist.lip_lower, 6) + ", " + fmt(dist.lip_upper, 6) + "]");
    }
    return o;
}

Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "pickmetrics_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> commands{
        {"coeffs", "--n-max", "2000", "--method", "both"},
        {"metric", "--kernel", "dirichlet", "--z", "0.5,0", "--w", "-0.5,0"},
        {"metric", "--kernel", "drury-arveson", "--z", "0.3,0.1,0.2,-0.1", "--w", "-0.2,0.4,0.1,0"},
        {"length", "--r", "0.9", "--tol", "1e-10"},
        {"separate", "--r", "0.999999", "--eps", "0.8"},
        {"separate", "--mode", "greedy", "--d", "2", "--r", "0.9", "--eps", "0.5", "--samples", "3000"},
        {"obstruct", "--d", "3", "--L", "1", "--m", "1", "--eps", "0.8", "--k-max", "40"},
        {"embed-check", "--grid", "5", "--trunc", "200"},
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const auto& base : commands) {
        std::string texts[2];
        for (int rep = 0; rep < 2; ++rep) {
            auto args = base;
            const fs::path out = dir / (base.front() + std::to_string(rep) + ".csv");
            args.insert(args.end(), {"--out", out.string()});
            cli::run(cli::parse_config(args));
            texts[rep] = slurp(out);
        }
        o.require(!texts[0].empty() && texts[0] == texts[1], "byte-identical CSV for " + base.front());
    }
    fs::remove_all(dir);
    o.note(std::to_string(commands.size()) + " configurations");
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Gregory coefficients, cross-method", 5, gregory_cross_method},
        {2, "Gregory asymptotics and Wendel sandwich", 60, gregory_asymptotics},
        {3, "Kernel reconstruction from the embedding", 5, kernel_reconstruction},
        {4, "Metric consistency and Moebius invariance", 5, metric_consistency},
        {5, "Length formulas and density g", 30, length_formulas},
        {6, "Radial-length asymptotic", 10, radial_asymptotic},
        {7, "Circle asymptotic and monotonicity", 10, circle_asymptotic_check},
        {8, "Circle lattice count", 10, lattice_count},
        {9, "Packing bound under greedy selection", 30, packing_bound},
        {10, "Obstruction crossing and slopes", 5, obstruction},
        {11, "Weighted Dirichlet comparison", 5, weighted_dirichlet},
        {12, "CLI determinism", 60, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) o.require(false, "runtime " + fmt(secs, 3) + " s exceeds " + fmt(c.limit_seconds) + " s");
        failed += !o.ok;
        std::printf("%s %2d  %-44s %7.2f s / %3.0f s  %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    c.limit_seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
