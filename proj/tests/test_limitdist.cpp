#include "amocci/error.hpp"
#include "amocci/limitdist.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <thread>

using namespace amocci;

namespace {

LimitLawConfig small_config(double theta, double gamma, std::uint64_t seed) {
    LimitLawConfig c;
    c.theta = theta;
    c.gamma = gamma;
    c.half_width = 100.0;
    c.step = 0.05;
    c.replicates = 20000;
    c.seed = seed;
    c.threads = 1;
    return c;
}

double fraction_positive(const std::vector<double>& xs) {
    return static_cast<double>(std::count_if(xs.begin(), xs.end(), [](double v) { return v > 0; })) /
           xs.size();
}

// Order-statistic standard error of the p-quantile: spacing-based density
// estimate times the binomial spread.
double quantile_se(const std::vector<double>& sorted, double p) {
    const double delta = 0.02;
    const double spread = quantile(sorted, std::min(p + delta, 0.999)) -
                          quantile(sorted, std::max(p - delta, 0.001));
    return spread / (2 * delta) * std::sqrt(p * (1 - p) / sorted.size());
}

}  // namespace

TEST_CASE("drift_slope branches") {
    for (double theta : {0.1, 0.3, 0.5, 0.77}) {
        CHECK(drift_slope(theta, 0.5, TimeSide::negative) == 0.5);
        CHECK(drift_slope(theta, 0.5, TimeSide::nonnegative) == 0.5);
    }
    CHECK(drift_slope(0.5, 0.0, TimeSide::negative) == 0.5);
    CHECK(drift_slope(0.5, 0.0, TimeSide::nonnegative) == 0.5);
    CHECK(drift_slope(0.25, 0.0, TimeSide::negative) == 0.75);
    CHECK(drift_slope(0.25, 0.0, TimeSide::nonnegative) == 0.25);

    for (double theta = 0.05; theta < 1.0; theta += 0.05) {
        for (double gamma : {0.0, 0.1, 0.25, 0.4, 0.5}) {
            const double neg = drift_slope(theta, gamma, TimeSide::negative);
            const double pos = drift_slope(theta, gamma, TimeSide::nonnegative);
            CHECK(neg + pos == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(drift_slope(1 - theta, gamma, TimeSide::negative) ==
                  doctest::Approx(pos).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS((void)drift_slope(0.0, 0.5, TimeSide::negative), std::invalid_argument);
    CHECK_THROWS_AS((void)drift_slope(1.0, 0.5, TimeSide::negative), std::invalid_argument);
    CHECK_THROWS_AS((void)drift_slope(0.5, 0.7, TimeSide::negative), std::invalid_argument);
}

TEST_CASE("LimitLawConfig validation") {
    LimitLawConfig c = small_config(0.5, 0.5, 1);
    CHECK_NOTHROW(c.validate());
    c.step = 1.01;  // T/100 = 1
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config(0.5, 0.5, 1);
    c.replicates = 999;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config(1.0, 0.5, 1);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("empirical quantile rule") {
    const std::vector<double> s{1, 2, 3, 4};
    CHECK(quantile(s, 0.5) == 2);
    CHECK(quantile(s, 0.25) == 1);
    CHECK(quantile(s, 0.26) == 2);
    CHECK(quantile(s, 0.99) == 4);
    CHECK(quantile(std::vector<double>{-2, -1, 1, 2}, 0.5) == -1);
    std::vector<double> ten(10);
    for (int i = 0; i < 10; ++i) ten[i] = i;
    CHECK(quantile(ten, 0.7) == 6);  // 0.7 * 10 rounds above 7 in binary
    CHECK(quantile(ten, 0.1) == 0);
    CHECK_THROWS_AS((void)quantile(s, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)quantile(s, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)quantile(std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST_CASE("asymptotic_ci arithmetic") {
    // q(0.05) = -2 and q(0.95) = 2 on 20 points.
    LimitSamples ls;
    ls.samples = std::vector<double>(20, 0.0);
    ls.samples[0] = -2;
    ls.samples[18] = 2;
    ls.samples[19] = 3;
    REQUIRE(quantile(ls, 0.05) == -2);
    REQUIRE(quantile(ls, 0.95) == 2);

    const auto ci = asymptotic_ci(40, 4.0, 2.0, ls, 0.1);
    CHECK(ci.lower == 38);
    CHECK(ci.upper == 42);
    CHECK(ci.level == doctest::Approx(0.9));
    CHECK(ci.method == CiMethod::asymptotic);

    const auto wide = asymptotic_ci(40, 8.0, 2.0, ls, 0.1);
    CHECK(wide.length() == 2 * ci.length());
    CHECK(wide.lower == 36);
    CHECK(wide.upper == 44);

    CHECK_THROWS_AS((void)asymptotic_ci(40, 1.0, 0.0, ls, 0.1), UndefinedIntervalError);
    CHECK_THROWS_AS((void)asymptotic_ci(40, 0.0, 1.0, ls, 0.1), std::invalid_argument);
    CHECK_THROWS_AS((void)asymptotic_ci(40, 1.0, 1.0, ls, 1.0), std::invalid_argument);
}

TEST_CASE("symmetric limit law at gamma = 1/2") {
    const auto ls = simulate_argmax_samples(small_config(0.3, 0.5, 77));
    REQUIRE(ls.samples.size() == 20000);
    CHECK(std::is_sorted(ls.samples.begin(), ls.samples.end()));
    CHECK(ls.boundary_hit_fraction <= max_boundary_hit_fraction);
    CHECK(std::fabs(quantile(ls, 0.5)) <= 0.05 + 1e-12);
    const double q05 = quantile(ls, 0.05);
    const double q95 = quantile(ls, 0.95);
    CHECK(std::fabs(q05 + q95) / std::fabs(q95) <= 0.05);

    // Every draw sits on the grid.
    for (std::size_t i = 0; i < ls.samples.size(); i += 997) {
        const double j = ls.samples[i] / 0.05;
        CHECK(std::fabs(j - std::round(j)) < 1e-9);
    }

    // Width of the interval is monotone in alpha.
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha = 0.01; alpha < 0.5; alpha += 0.03) {
        const auto ci = asymptotic_ci(50, 2.0, 0.5, ls, alpha);
        CHECK(ci.length() == doctest::Approx(8.0 * (quantile(ls, 1 - alpha / 2) - quantile(ls, alpha / 2))));
        CHECK(ci.length() <= prev);
        prev = ci.length();
    }
}

TEST_CASE("simulation is independent of the thread count") {
    auto c = small_config(0.4, 0.2, 5);
    c.replicates = 2000;
    const auto one = simulate_argmax_samples(c);
    c.threads = 3;
    const auto three = simulate_argmax_samples(c);
    CHECK(one.samples == three.samples);
    CHECK(one.boundary_hit_fraction == three.boundary_hit_fraction);
}

TEST_CASE("asymmetric slopes push the argmax toward the shallow side") {
    LimitLawConfig c = small_config(0.25, 0.0, 91);
    c.half_width = 200.0;
    c.replicates = 5000;
    const auto ls = simulate_argmax_samples(c);
    const double p_impl = fraction_positive(ls.samples);

    const auto coarse = oracle::coarse_argmax(0.75, 0.25, 50.0, 0.2, 5000, 17);
    const double p_oracle = fraction_positive(coarse);

    CHECK(p_impl > 0.5);
    CHECK(p_oracle > 0.5);
    CHECK(std::fabs(p_impl - p_oracle) < 0.04);
}

TEST_CASE("swapping theta and 1 - theta mirrors the law") {
    LimitLawConfig a = small_config(0.3, 0.0, 123);
    LimitLawConfig b = small_config(0.7, 0.0, 456);
    a.half_width = b.half_width = 200.0;
    a.replicates = b.replicates = 10000;
    const auto la = simulate_argmax_samples(a);
    const auto lb = simulate_argmax_samples(b);
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        const double qa = quantile(la, p);
        const double qb = -quantile(lb, 1 - p);
        const double se = std::hypot(quantile_se(la.samples, p), quantile_se(lb.samples, 1 - p));
        CHECK(std::fabs(qa - qb) <= 3 * se + 0.05);
    }
}

TEST_CASE("boundary guard") {
    LimitLawConfig c = small_config(0.5, 0.5, 3);
    c.half_width = 5.0;
    c.replicates = 1000;
    CHECK_THROWS_AS((void)simulate_argmax_samples(c), BoundaryHitError);

    // A very shallow slope overruns T = 200 directly; the rescaled sampler
    // calibrates the grid to the shallow side.
    LimitLawConfig shallow = small_config(0.02, 0.0, 4);
    shallow.half_width = 200.0;
    shallow.replicates = 1000;
    CHECK_THROWS_AS((void)simulate_argmax_samples(shallow), BoundaryHitError);
    const auto scaled = simulate_scaled_argmax_samples(shallow);
    CHECK(scaled.boundary_hit_fraction <= max_boundary_hit_fraction);
    CHECK(quantile(scaled, 0.5) > 0.0);
}

TEST_CASE("rescaled sampler reproduces the direct law") {
    auto c = small_config(0.5, 0.5, 8);
    c.replicates = 2000;
    CHECK(simulate_scaled_argmax_samples(c).samples == simulate_argmax_samples(c).samples);

    LimitLawConfig a = small_config(0.25, 0.0, 10);
    a.half_width = 200.0;
    a.replicates = 10000;
    LimitLawConfig b = a;
    b.seed = 11;
    const auto direct = simulate_argmax_samples(a);
    const auto scaled = simulate_scaled_argmax_samples(b);
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        const double se = std::hypot(quantile_se(direct.samples, p), quantile_se(scaled.samples, p));
        CHECK(std::fabs(quantile(direct, p) - quantile(scaled, p)) <= 3 * se + 0.2);
    }
}

TEST_CASE("LimitSampleCache shares entries per rounded key") {
    LimitLawConfig base = small_config(0.5, 0.5, 12);
    base.replicates = 1000;
    LimitSampleCache cache(base);
    const auto a = cache.get(0.2501, 0.0);
    const auto b = cache.get(0.2504, 0.0);
    CHECK(a.get() == b.get());
    CHECK(a->config.theta == 0.25);
    CHECK(cache.get(0.2506, 0.0).get() != a.get());

    const auto h1 = cache.get(0.1, 0.5);
    const auto h2 = cache.get(0.9, 0.5);
    CHECK(h1.get() == h2.get());
    CHECK(cache.size() == 3);

    std::vector<std::shared_ptr<const LimitSamples>> got(4);
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 4; ++t) pool.emplace_back([&, t] { got[t] = cache.get(0.6, 0.25); });
    }
    for (const auto& g : got) CHECK(g.get() == got[0].get());

    LimitSampleCache other(base);
    CHECK(other.get(0.6, 0.25)->samples == got[0]->samples);
}
