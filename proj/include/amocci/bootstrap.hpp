#pragma once

#include "amocci/cusum.hpp"
#include "amocci/interval.hpp"
#include "amocci/model.hpp"
#include "amocci/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace amocci {

enum class BlockScheme {
    circular_overlapping,     // block starts uniform on {0, ..., n-1}
    circular_nonoverlapping,  // block starts uniform on {0, K, ..., (L-1)K}
};

[[nodiscard]] std::string_view to_string(BlockScheme scheme) noexcept;
/// Accepts "circular_overlapping"/"overlapping" and "circular_nonoverlapping"/"nonoverlapping".
[[nodiscard]] BlockScheme parse_block_scheme(std::string_view name);

struct BootstrapConfig {
    std::size_t block_length = 1;  // K
    std::size_t resamples = 10000; // B
    BlockScheme scheme = BlockScheme::circular_overlapping;
    std::uint64_t seed = 1;
    unsigned threads = 1;  // 0 = all hardware threads; never affects results

    void validate(std::size_t n) const;
};

/// Number of blocks L = ceil(n / K); the last block is truncated to fit n.
[[nodiscard]] std::size_t block_count(std::size_t n, std::size_t block_length);

/// L block start offsets (0-based) for the given scheme.
[[nodiscard]] std::vector<std::size_t> draw_offsets(std::size_t n, std::size_t block_length,
                                                    std::size_t blocks, BlockScheme scheme,
                                                    RngStream& stream);

/// Concatenates L blocks of K consecutive residuals, wrapping past the end:
/// e*(Kl + k) = e~(((offset_l + k - 1) mod n) + 1), k = 1..K. Returns L*K values.
[[nodiscard]] std::vector<double> resample_errors(std::span<const double> residuals,
                                                  std::size_t block_length,
                                                  std::span<const std::size_t> offsets);

/// X*(i) = e*(i) + mu1 1{i <= m_hat} + mu2 1{m_hat < i <= n}; e* beyond n is dropped.
[[nodiscard]] TimeSeries reconstruct_series(std::span<const double> e_star, std::size_t m_hat,
                                            double mu1_hat, double mu2_hat, std::size_t n);

struct BootstrapDistribution {
    std::vector<std::size_t> samples;  // m*_b in resample order b = 0..B-1
    std::size_t m_hat = 1;
    double gamma = 0.5;
    std::size_t n = 0;
};

/// For each b: offsets from a stream keyed by (seed, b), resample, rebuild
/// the step series, re-estimate the change-point with the fit's gamma.
[[nodiscard]] BootstrapDistribution bootstrap_distribution(const ChangePointFit& fit,
                                                           const BootstrapConfig& config);

/// Empirical bootstrap quantiles of m*:
///   q_L = sup{u : P*(m* < u) <= alpha/2},  q_U = inf{u : P*(m* > u) <= alpha/2}.
struct BootstrapQuantiles {
    double lower = 0.0;  // q_L
    double upper = 0.0;  // q_U
};

[[nodiscard]] BootstrapQuantiles bootstrap_quantiles(std::span<const double> samples,
                                                     double alpha);

/// Basic (reflected) interval [2 m_hat - q_U, 2 m_hat - q_L].
[[nodiscard]] ConfidenceInterval bootstrap_ci_from_quantiles(double m_hat,
                                                             const BootstrapQuantiles& q,
                                                             double alpha);

[[nodiscard]] ConfidenceInterval bootstrap_ci(std::span<const double> samples, double m_hat,
                                              double alpha);
[[nodiscard]] ConfidenceInterval bootstrap_ci(const BootstrapDistribution& dist, double alpha);

/// m* samples as doubles, in resample order.
[[nodiscard]] std::vector<double> as_real(const BootstrapDistribution& dist);

}  // namespace amocci
