#include "amocci/cusum.hpp"

#include "amocci/summation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace amocci {

void validate_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 0.5)) {
        throw std::invalid_argument("gamma must lie in [0, 1/2], got " + std::to_string(gamma));
    }
}

CusumStatistics compute_cusum(std::span<const double> values, double gamma) {
    validate_gamma(gamma);
    const std::size_t n = values.size();
    if (n < TimeSeries::min_length) {
        throw std::invalid_argument("CUSUM needs at least 3 observations");
    }

    // Extended precision keeps small centred sums accurate relative to themselves.
    long double total = 0.0L;
    for (double v : values) total += v;
    const long double mean = total / static_cast<long double>(n);
    const long double nl = static_cast<long double>(n);

    CusumStatistics stats;
    stats.gamma = gamma;
    stats.values.resize(n - 1);

    long double partial = 0.0L;
    for (std::size_t k = 1; k < n; ++k) {
        partial += static_cast<long double>(values[k - 1]) - mean;
        long double weight = 1.0L;
        if (gamma != 0.0) {
            const long double kl = static_cast<long double>(k);
            const long double base = nl / (kl * (nl - kl));
            weight = gamma == 0.5 ? std::sqrt(base) : std::pow(base, static_cast<long double>(gamma));
        }
        stats.values[k - 1] = static_cast<double>(weight * partial);
    }
    return stats;
}

CusumStatistics compute_cusum(const TimeSeries& series, double gamma) {
    return compute_cusum(series.values(), gamma);
}

std::size_t estimate_changepoint(const CusumStatistics& stats) {
    if (stats.values.empty()) {
        throw std::invalid_argument("empty CUSUM path");
    }
    std::size_t best = 0;
    double best_abs = std::fabs(stats.values[0]);
    for (std::size_t j = 1; j < stats.values.size(); ++j) {
        const double a = std::fabs(stats.values[j]);
        if (a > best_abs) {
            best_abs = a;
            best = j;
        }
    }
    return best + 1;
}

ChangePointFit fit_amoc(const TimeSeries& series, double gamma) {
    const auto x = series.values();
    const std::size_t n = x.size();

    ChangePointFit fit;
    fit.gamma = gamma;
    fit.m_hat = estimate_changepoint(compute_cusum(series, gamma));
    fit.mu1_hat = compensated_mean(x.first(fit.m_hat));
    fit.mu2_hat = compensated_mean(x.subspan(fit.m_hat));
    fit.d_hat = fit.mu2_hat - fit.mu1_hat;

    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        resid[i] = x[i] - (i < fit.m_hat ? fit.mu1_hat : fit.mu2_hat);
    }
    const double resid_mean = compensated_mean(resid);
    for (double& r : resid) {
        r -= resid_mean;
    }
    fit.residuals_centered = std::move(resid);
    return fit;
}

}  // namespace amocci
