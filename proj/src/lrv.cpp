#include "amocci/lrv.hpp"

#include "amocci/summation.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace amocci {

namespace {

void check_split(std::size_t n, std::size_t m_hat) {
    if (m_hat < 1 || m_hat > n - 1) {
        throw std::invalid_argument("change-point " + std::to_string(m_hat) +
                                    " outside 1.." + std::to_string(n - 1));
    }
}

std::vector<double> segment_centered(std::span<const double> x, std::size_t m_hat) {
    const double mean1 = compensated_mean(x.first(m_hat));
    const double mean2 = compensated_mean(x.subspan(m_hat));
    std::vector<double> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        c[i] = x[i] - (i < m_hat ? mean1 : mean2);
    }
    return c;
}

// Lag-k cross products of the centered values, restricted to each segment.
double lagged_sum(const std::vector<double>& c, std::size_t m_hat, std::size_t lag) {
    const std::size_t n = c.size();
    double s = 0.0;
    // 0-based: t in [0, m_hat - lag) for segment one, [m_hat, n - lag) for segment two.
    for (std::size_t t = 0; t + lag < m_hat; ++t) {
        s += c[t] * c[t + lag];
    }
    for (std::size_t t = m_hat; t + lag < n; ++t) {
        s += c[t] * c[t + lag];
    }
    return s / static_cast<double>(n);
}

}  // namespace

double split_autocovariance(const TimeSeries& series, std::size_t m_hat, std::size_t lag) {
    const std::size_t n = series.size();
    check_split(n, m_hat);
    if (lag > n - 2) {
        throw std::invalid_argument("lag " + std::to_string(lag) + " outside 0.." +
                                    std::to_string(n - 2));
    }
    return lagged_sum(segment_centered(series.values(), m_hat), m_hat, lag);
}

LrvEstimate bartlett_lrv(const TimeSeries& series, std::size_t m_hat, std::size_t lambda) {
    const std::size_t n = series.size();
    check_split(n, m_hat);
    if (lambda < 1 || lambda > n - 2) {
        throw std::invalid_argument("Bartlett window " + std::to_string(lambda) +
                                    " outside 1.." + std::to_string(n - 2));
    }

    const auto c = segment_centered(series.values(), m_hat);

    LrvEstimate est;
    est.lambda = lambda;
    est.autocovariances.resize(lambda + 1);
    for (std::size_t k = 0; k <= lambda; ++k) {
        est.autocovariances[k] = lagged_sum(c, m_hat, k);
    }

    const double ld = static_cast<double>(lambda);
    CompensatedSum acc;
    for (std::size_t k = 1; k < lambda; ++k) {
        acc.add((1.0 - static_cast<double>(k) / ld) * est.autocovariances[k]);
    }
    const double r0 = est.autocovariances[0];
    est.raw_tau2 = r0 + 2.0 * acc.value();

    const double floor_value = r0 > 0.0 ? 1e-8 * r0 : 1e-12;
    est.floored = !(est.raw_tau2 >= floor_value);
    est.tau2 = est.floored ? floor_value : est.raw_tau2;
    return est;
}

std::size_t default_window(std::size_t n, double fraction) {
    if (n < TimeSeries::min_length) {
        throw std::invalid_argument("default_window needs n >= 3");
    }
    if (!(fraction > 0.0)) {
        throw std::invalid_argument("window fraction must be positive");
    }
    const auto raw = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(raw, 1, n - 2);
}

}  // namespace amocci
