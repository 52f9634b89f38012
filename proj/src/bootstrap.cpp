#include "amocci/bootstrap.hpp"

#include "amocci/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace amocci {

std::string_view to_string(BlockScheme scheme) noexcept {
    switch (scheme) {
        case BlockScheme::circular_overlapping:
            return "circular_overlapping";
        case BlockScheme::circular_nonoverlapping:
            return "circular_nonoverlapping";
    }
    return "unknown";
}

BlockScheme parse_block_scheme(std::string_view name) {
    if (name == "circular_overlapping" || name == "overlapping") {
        return BlockScheme::circular_overlapping;
    }
    if (name == "circular_nonoverlapping" || name == "nonoverlapping") {
        return BlockScheme::circular_nonoverlapping;
    }
    throw std::invalid_argument("unknown block scheme '" + std::string(name) + "'");
}

void BootstrapConfig::validate(std::size_t n) const {
    if (block_length < 1 || block_length > n) {
        throw std::invalid_argument("block length K must satisfy 1 <= K <= n (K = " +
                                    std::to_string(block_length) +
                                    ", n = " + std::to_string(n) + ")");
    }
    if (resamples < 1) {
        throw std::invalid_argument("at least one bootstrap resample is required");
    }
}

std::size_t block_count(std::size_t n, std::size_t block_length) {
    if (block_length == 0) {
        throw std::invalid_argument("block length must be positive");
    }
    return (n + block_length - 1) / block_length;
}

std::vector<std::size_t> draw_offsets(std::size_t n, std::size_t block_length,
                                      std::size_t blocks, BlockScheme scheme,
                                      RngStream& stream) {
    if (n == 0 || block_length == 0) {
        throw std::invalid_argument("draw_offsets needs n >= 1 and K >= 1");
    }
    std::vector<std::size_t> offsets(blocks);
    for (std::size_t& o : offsets) {
        if (scheme == BlockScheme::circular_overlapping) {
            o = uniform_index(stream, n - 1);
        } else {
            o = block_length * uniform_index(stream, blocks - 1);
        }
    }
    return offsets;
}

std::vector<double> resample_errors(std::span<const double> residuals, std::size_t block_length,
                                    std::span<const std::size_t> offsets) {
    const std::size_t n = residuals.size();
    if (n == 0) {
        throw std::invalid_argument("resample_errors: empty residual vector");
    }
    std::vector<double> out;
    out.reserve(offsets.size() * block_length);
    for (std::size_t offset : offsets) {
        std::size_t j = offset % n;
        for (std::size_t k = 0; k < block_length; ++k) {
            out.push_back(residuals[j]);
            j = j + 1 == n ? 0 : j + 1;
        }
    }
    return out;
}

TimeSeries reconstruct_series(std::span<const double> e_star, std::size_t m_hat, double mu1_hat,
                              double mu2_hat, std::size_t n) {
    if (e_star.size() < n) {
        throw std::invalid_argument("bootstrap errors shorter than the series");
    }
    if (m_hat < 1 || m_hat >= n) {
        throw std::invalid_argument("change-point outside 1..n-1");
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = e_star[i] + (i < m_hat ? mu1_hat : mu2_hat);
    }
    return TimeSeries(std::move(x));
}

BootstrapDistribution bootstrap_distribution(const ChangePointFit& fit,
                                             const BootstrapConfig& config) {
    const std::size_t n = fit.n();
    config.validate(n);
    const std::size_t blocks = block_count(n, config.block_length);

    BootstrapDistribution dist;
    dist.m_hat = fit.m_hat;
    dist.gamma = fit.gamma;
    dist.n = n;
    dist.samples.resize(config.resamples);

    parallel_for(config.resamples, config.threads, [&](std::size_t b) {
        RngStream stream = make_stream(config.seed, {b});
        const auto offsets = draw_offsets(n, config.block_length, blocks, config.scheme, stream);
        const auto e_star = resample_errors(fit.residuals_centered, config.block_length, offsets);
        const auto x_star = reconstruct_series(e_star, fit.m_hat, fit.mu1_hat, fit.mu2_hat, n);
        dist.samples[b] = estimate_changepoint(compute_cusum(x_star, fit.gamma));
    });
    return dist;
}

BootstrapQuantiles bootstrap_quantiles(std::span<const double> samples, double alpha) {
    validate_alpha(alpha);
    if (samples.size() < 2) {
        throw std::invalid_argument("bootstrap interval needs at least two resamples");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t b = sorted.size();

    // #(m* < u) <= c  iff  u <= sorted[c];  #(m* > u) <= c  iff  u >= sorted[b-1-c],
    // with c = floor(alpha/2 * B). alpha < 1 keeps c < B/2.
    const double allowed = alpha / 2.0 * static_cast<double>(b);
    const auto c = static_cast<std::size_t>(std::floor(allowed + 1e-9 * std::max(1.0, allowed)));
    return {sorted[c], sorted[b - 1 - c]};
}

ConfidenceInterval bootstrap_ci_from_quantiles(double m_hat, const BootstrapQuantiles& q,
                                               double alpha) {
    validate_alpha(alpha);
    const double a = 2.0 * m_hat - q.upper;
    const double b = 2.0 * m_hat - q.lower;
    ConfidenceInterval ci;
    ci.lower = std::min(a, b);
    ci.upper = std::max(a, b);
    ci.level = 1.0 - alpha;
    ci.method = CiMethod::bootstrap;
    return ci;
}

ConfidenceInterval bootstrap_ci(std::span<const double> samples, double m_hat, double alpha) {
    return bootstrap_ci_from_quantiles(m_hat, bootstrap_quantiles(samples, alpha), alpha);
}

std::vector<double> as_real(const BootstrapDistribution& dist) {
    return std::vector<double>(dist.samples.begin(), dist.samples.end());
}

ConfidenceInterval bootstrap_ci(const BootstrapDistribution& dist, double alpha) {
    return bootstrap_ci(as_real(dist), static_cast<double>(dist.m_hat), alpha);
}

}  // namespace amocci
