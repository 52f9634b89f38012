#pragma once

#include "amocci/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace amocci {

/// Weighted CUSUM path
///   S_gamma(k) = (n / (k (n-k)))^gamma * sum_{i<=k} (X(i) - mean(X)),  k = 1..n-1.
/// values[k-1] holds S_gamma(k).
struct CusumStatistics {
    double gamma = 0.5;
    std::vector<double> values;

    [[nodiscard]] std::size_t series_length() const noexcept { return values.size() + 1; }
};

/// Throws std::invalid_argument unless 0 <= gamma <= 1/2.
void validate_gamma(double gamma);

/// Single O(n) pass with compensated partial sums.
[[nodiscard]] CusumStatistics compute_cusum(const TimeSeries& series, double gamma);
[[nodiscard]] CusumStatistics compute_cusum(std::span<const double> values, double gamma);

/// Smallest k in 1..n-1 maximizing |S_gamma(k)|. A flat path (constant
/// series) returns 1.
[[nodiscard]] std::size_t estimate_changepoint(const CusumStatistics& stats);

struct ChangePointFit {
    double gamma = 0.5;
    std::size_t m_hat = 1;  // 1-based
    double mu1_hat = 0.0;   // mean of X(1..m_hat)
    double mu2_hat = 0.0;   // mean of X(m_hat+1..n)
    double d_hat = 0.0;     // mu2_hat - mu1_hat
    std::vector<double> residuals_centered;

    [[nodiscard]] std::size_t n() const noexcept { return residuals_centered.size(); }
};

/// Change-point estimate plus segment means and centered residuals
///   e^(i) = X(i) - mu1 1{i <= m_hat} - mu2 1{i > m_hat},  e~(i) = e^(i) - mean(e^).
[[nodiscard]] ChangePointFit fit_amoc(const TimeSeries& series, double gamma);

}  // namespace amocci
