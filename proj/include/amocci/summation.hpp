#pragma once

#include <cmath>
#include <span>

namespace amocci {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            compensation_ += (sum_ - t) + x;
        } else {
            compensation_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

[[nodiscard]] inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) {
        acc.add(x);
    }
    return acc.value();
}

[[nodiscard]] inline double compensated_mean(std::span<const double> xs) noexcept {
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace amocci
