#pragma once

#include "amocci/model.hpp"

#include <cstddef>
#include <vector>

namespace amocci {

/// Bartlett-window long-run variance estimate around a fitted change-point.
struct LrvEstimate {
    double tau2 = 0.0;      // after flooring
    double raw_tau2 = 0.0;  // before flooring
    std::size_t lambda = 1;
    std::vector<double> autocovariances;  // R(0..lambda)
    bool floored = false;
};

/// Change-adjusted autocovariance at lag k: each segment is centered at its
/// own mean and only within-segment products enter,
///   R(k) = (1/n) [ sum_{t=1}^{m-k} c_t c_{t+k} + sum_{t=m+1}^{n-k} c_t c_{t+k} ].
/// Empty sums contribute 0. Requires 0 <= k <= n-2, 1 <= m_hat <= n-1.
[[nodiscard]] double split_autocovariance(const TimeSeries& series, std::size_t m_hat,
                                          std::size_t lag);

/// tau2 = R(0) + 2 sum_{k=1}^{lambda} (1 - k/lambda) R(k), floored at
/// 1e-8 R(0) (1e-12 when R(0) = 0). Requires 1 <= lambda <= n-2.
[[nodiscard]] LrvEstimate bartlett_lrv(const TimeSeries& series, std::size_t m_hat,
                                       std::size_t lambda);

/// max(1, floor(fraction * n)), capped at n-2.
[[nodiscard]] std::size_t default_window(std::size_t n, double fraction = 0.1);

}  // namespace amocci
