#pragma once

#include "amocci/interval.hpp"

#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace amocci {

// Monte Carlo for the change-point limit law
//
//   U(theta, gamma) = argmax_t { W(t) - |t| g(t) },
//
// W a two-sided Wiener process and g the piecewise-constant drift slope
// returned by drift_slope(). For gamma = 1/2 both slopes are 1/2 and the law
// no longer depends on theta. Quantiles come from simulation only; the
// closed-form CDF is not implemented.

struct LimitLawConfig {
    double theta = 0.5;
    double gamma = 0.5;
    double half_width = 200.0;  // T: grid covers [-T, T]
    double step = 0.05;         // h
    std::size_t replicates = 200000;
    std::uint64_t seed = 20080101;
    unsigned threads = 0;  // 0 = all hardware threads; never affects results

    /// step <= T/100, replicates >= 1000, theta in (0,1), gamma in [0,1/2].
    void validate() const;
};

struct LimitSamples {
    std::vector<double> samples;  // sorted ascending
    LimitLawConfig config;
    double boundary_hit_fraction = 0.0;
};

/// Boundary guard: more than this fraction of draws within 5% of ±T fails.
inline constexpr double max_boundary_hit_fraction = 0.005;

enum class TimeSide { negative, nonnegative };

/// (1-theta)(1-gamma) + theta gamma for t < 0; (1-theta) gamma + theta (1-gamma) for t >= 0.
[[nodiscard]] double drift_slope(double theta, double gamma, TimeSide side);

/// Simulates the discretized process on {-T, ..., -h, 0, h, ..., T} with
/// independent Gaussian walks on each side. Ties go to the grid point closest
/// to 0, then to the negative one. Throws BoundaryHitError if the guard trips.
/// Replicate r uses a stream derived from (seed, r): results do not depend on
/// the thread count.
[[nodiscard]] LimitSamples simulate_argmax_samples(const LimitLawConfig& config);

/// Same law as simulate_argmax_samples, drawn through Brownian rescaling:
/// U(a, b) has the law of U(a/c, b/c) / c^2, with c chosen so the shallower
/// slope becomes 1/2. The grid [-T, T] then always sees a slope of at least
/// 1/2, which keeps the boundary guard quiet for theta near 0 or 1 at gamma < 1/2.
/// For gamma = 1/2 (c = 1) the draws are identical to simulate_argmax_samples.
[[nodiscard]] LimitSamples simulate_scaled_argmax_samples(const LimitLawConfig& config);

/// Smallest sample value v with fraction(samples <= v) >= p. `sorted` must be
/// ascending and nonempty; p in (0, 1).
[[nodiscard]] double quantile(std::span<const double> sorted, double p);
[[nodiscard]] double quantile(const LimitSamples& samples, double p);

/// lower = m_hat - scale q(1 - alpha/2), upper = m_hat - scale q(alpha/2),
/// scale = tau2 / d_hat^2. Unclipped.
/// Throws UndefinedIntervalError for d_hat == 0.
[[nodiscard]] ConfidenceInterval asymptotic_ci(std::size_t m_hat, double tau2, double d_hat,
                                               const LimitSamples& samples, double alpha);

/// The arithmetic half of asymptotic_ci, from stored quantiles
/// q_low = q(alpha/2), q_high = q(1 - alpha/2).
[[nodiscard]] ConfidenceInterval asymptotic_ci_from_quantiles(double m_hat, double scale,
                                                              double q_low, double q_high,
                                                              double alpha);

/// tau2 / d_hat^2 with the argument checks of asymptotic_ci.
[[nodiscard]] double asymptotic_scale(double tau2, double d_hat);

/// Memoizes limit-law samples per (theta rounded to 1e-3, gamma) for one base
/// configuration. Thread-safe; concurrent requests for the same key share a
/// single simulation. The entry for a key is a pure function of the key and
/// the base config, so results never depend on request order.
class LimitSampleCache {
public:
    explicit LimitSampleCache(LimitLawConfig base);

    [[nodiscard]] std::shared_ptr<const LimitSamples> get(double theta, double gamma);

    [[nodiscard]] const LimitLawConfig& base() const noexcept { return base_; }
    [[nodiscard]] std::size_t size() const;

private:
    using Key = std::pair<long long, long long>;
    using Entry = std::shared_future<std::shared_ptr<const LimitSamples>>;

    LimitLawConfig base_;
    mutable std::mutex mutex_;
    std::map<Key, Entry> entries_;
};

}  // namespace amocci
