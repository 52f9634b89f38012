#include "amocci/bootstrap.hpp"
#include "amocci/cusum.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace amocci;

TEST_CASE("draw_offsets ranges and determinism") {
    auto s = make_stream(1, {});
    for (int i = 0; i < 100; ++i) {
        const auto o = draw_offsets(4, 2, 2, BlockScheme::circular_overlapping, s);
        REQUIRE(o.size() == 2);
        for (auto v : o) CHECK(v < 4);
    }
    bool saw_zero = false, saw_two = false;
    for (int i = 0; i < 100; ++i) {
        for (auto v : draw_offsets(4, 2, 2, BlockScheme::circular_nonoverlapping, s)) {
            CHECK((v == 0 || v == 2));
            saw_zero |= v == 0;
            saw_two |= v == 2;
        }
    }
    CHECK(saw_zero);
    CHECK(saw_two);

    auto a = make_stream(9, {1});
    auto b = make_stream(9, {1});
    CHECK(draw_offsets(50, 5, 10, BlockScheme::circular_overlapping, a) ==
          draw_offsets(50, 5, 10, BlockScheme::circular_overlapping, b));
}

TEST_CASE("resample_errors wraps blocks around the end") {
    const std::vector<double> e{1.0, 2.0, 3.0, 4.0};  // a, b, c, d
    const std::vector<std::size_t> offsets{3, 1};
    CHECK(resample_errors(e, 2, offsets) == std::vector<double>{4.0, 1.0, 2.0, 3.0});

    const std::vector<std::size_t> identity{0};
    CHECK(resample_errors(e, 4, identity) == e);

    const std::vector<std::size_t> singles{2, 2, 0, 3};
    CHECK(resample_errors(e, 1, singles) == std::vector<double>{3.0, 3.0, 1.0, 4.0});
}

TEST_CASE("resampled blocks keep circular order and draw only residual values") {
    auto s = make_stream(3, {});
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 5 + uniform_index(s, 60);
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = static_cast<double>(i) + 0.5;  // distinct
        const std::size_t k = 1 + uniform_index(s, n - 1);
        const std::size_t blocks = block_count(n, k);
        const auto offsets = draw_offsets(n, k, blocks, BlockScheme::circular_overlapping, s);
        const auto star = resample_errors(e, k, offsets);
        REQUIRE(star.size() == blocks * k);
        for (std::size_t l = 0; l < blocks; ++l) {
            for (std::size_t j = 0; j < k; ++j) {
                const double v = star[l * k + j];
                CHECK(std::find(e.begin(), e.end(), v) != e.end());
                if (j + 1 < k) {
                    const auto pos = static_cast<std::size_t>(v - 0.5);
                    CHECK(star[l * k + j + 1] == e[(pos + 1) % n]);
                }
            }
        }
    }
}

TEST_CASE("circular block sums over all offsets vanish for centered residuals") {
    auto s = make_stream(4, {});
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 10 + uniform_index(s, 90);
        std::vector<double> x(n);
        for (double& v : x) v = 5.0 * standard_normal(s);
        const auto fit = fit_amoc(TimeSeries(x), 0.5);
        const std::size_t k = 1 + uniform_index(s, n - 1);
        double scale = 1.0;
        for (double v : fit.residuals_centered) scale = std::max(scale, std::fabs(v));
        double total = 0.0;
        for (std::size_t o = 0; o < n; ++o) {
            const std::vector<std::size_t> one{o};
            for (double v : resample_errors(fit.residuals_centered, k, one)) total += v;
        }
        CHECK(std::fabs(total) <= 1e-10 * k * n * scale);
    }
}

TEST_CASE("reconstruct_series adds the fitted step") {
    const std::vector<double> zeros(4, 0.0);
    const auto x = reconstruct_series(zeros, 2, 0.0, 1.0, 4);
    CHECK(std::vector<double>(x.values().begin(), x.values().end()) ==
          std::vector<double>{0, 0, 1, 1});

    const std::vector<double> longer{1, 1, 1, 1, 9, 9};
    CHECK(reconstruct_series(longer, 2, 0.0, 1.0, 4).values().back() == 2.0);
    CHECK_THROWS_AS((void)reconstruct_series(zeros, 2, 0.0, 1.0, 5), std::invalid_argument);

    // Identity resample: fitted step plus centered residuals.
    const TimeSeries orig({0.3, -0.1, 0.2, 2.5, 1.9, 2.2, 2.1});
    const auto fit = fit_amoc(orig, 0.5);
    const auto rebuilt =
        reconstruct_series(fit.residuals_centered, fit.m_hat, fit.mu1_hat, fit.mu2_hat, orig.size());
    for (std::size_t i = 1; i <= orig.size(); ++i) {
        CHECK(rebuilt.at(i) == doctest::Approx(orig.at(i)).epsilon(1e-14));
    }
}

TEST_CASE("bootstrap_distribution") {
    std::vector<double> step(80, 0.0);
    std::fill(step.begin() + 40, step.end(), 2.0);
    const auto exact = fit_amoc(TimeSeries(step), 0.5);
    BootstrapConfig cfg;
    cfg.block_length = 8;
    cfg.resamples = 200;
    cfg.seed = 5;
    const auto dist = bootstrap_distribution(exact, cfg);
    CHECK(dist.samples.size() == 200);
    for (auto m : dist.samples) CHECK(m == 40);

    auto s = make_stream(6, {});
    std::vector<double> noisy(80);
    for (std::size_t i = 0; i < 80; ++i) noisy[i] = standard_normal(s) + (i >= 40 ? 1.0 : 0.0);
    const auto fit = fit_amoc(TimeSeries(noisy), 0.0);
    cfg.resamples = 500;
    const auto one = bootstrap_distribution(fit, cfg);
    cfg.threads = 4;
    const auto four = bootstrap_distribution(fit, cfg);
    CHECK(one.samples == four.samples);
    for (auto m : one.samples) CHECK((m >= 1 && m <= 79));
    CHECK(one.gamma == 0.0);

    cfg.scheme = BlockScheme::circular_nonoverlapping;
    const auto nonoverlap = bootstrap_distribution(fit, cfg);
    CHECK(nonoverlap.samples != one.samples);

    cfg.block_length = 0;
    CHECK_THROWS_AS((void)bootstrap_distribution(fit, cfg), std::invalid_argument);
    cfg.block_length = 81;
    CHECK_THROWS_AS((void)bootstrap_distribution(fit, cfg), std::invalid_argument);
    cfg.block_length = 8;
    cfg.resamples = 0;
    CHECK_THROWS_AS((void)bootstrap_distribution(fit, cfg), std::invalid_argument);
}

TEST_CASE("bootstrap_ci basic interval") {
    const std::vector<double> same(10, 40.0);
    const auto point = bootstrap_ci(same, 40.0, 0.1);
    CHECK(point.lower == 40);
    CHECK(point.upper == 40);
    CHECK(point.method == CiMethod::bootstrap);

    const std::vector<double> uniform{38, 39, 40, 41, 42};
    const auto q = bootstrap_quantiles(uniform, 0.4);
    CHECK(q.lower == 39);
    CHECK(q.upper == 41);
    const auto sym = bootstrap_ci(uniform, 40.0, 0.4);
    CHECK(sym.lower == 39);
    CHECK(sym.upper == 41);

    const std::vector<double> shifted{43, 44, 45, 46, 47};
    const auto refl = bootstrap_ci(shifted, 40.0, 0.4);
    CHECK(refl.lower == 34);
    CHECK(refl.upper == 36);

    CHECK_THROWS_AS((void)bootstrap_ci(uniform, 40.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)bootstrap_ci(std::vector<double>{40.0}, 40.0, 0.1), std::invalid_argument);
}

TEST_CASE("bootstrap_ci reflects with its samples") {
    auto s = make_stream(21, {});
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t b = 2 + uniform_index(s, 300);
        const double m_hat = 10.0 + uniform_index(s, 60);
        std::vector<double> samples(b), mirrored(b);
        for (std::size_t i = 0; i < b; ++i) {
            samples[i] = static_cast<double>(1 + uniform_index(s, 79));
            mirrored[i] = 2.0 * m_hat - samples[i];
        }
        const double alpha = 0.01 + 0.9 * (uniform_index(s, 1000) / 1000.0);
        const auto ci = bootstrap_ci(samples, m_hat, alpha);
        const auto cm = bootstrap_ci(mirrored, m_hat, alpha);
        CHECK(ci.lower <= ci.upper);
        CHECK(cm.lower == 2.0 * m_hat - ci.upper);
        CHECK(cm.upper == 2.0 * m_hat - ci.lower);

        // Nonincreasing length in alpha.
        CHECK(bootstrap_ci(samples, m_hat, alpha).length() >=
              bootstrap_ci(samples, m_hat, std::min(0.99, alpha + 0.05)).length());
    }
}
