#include "amocci/limitdist.hpp"

#include "amocci/cusum.hpp"
#include "amocci/error.hpp"
#include "amocci/parallel.hpp"
#include "amocci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace amocci {

void LimitLawConfig::validate() const {
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::invalid_argument("limit law: theta must lie in (0, 1)");
    }
    validate_gamma(gamma);
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
        throw std::invalid_argument("limit law: half-width T must be positive");
    }
    if (!(step > 0.0) || step > half_width / 100.0) {
        throw std::invalid_argument("limit law: step h must satisfy 0 < h <= T/100");
    }
    if (replicates < 1000) {
        throw std::invalid_argument("limit law: at least 1000 replicates are required");
    }
}

double drift_slope(double theta, double gamma, TimeSide side) {
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::invalid_argument("drift_slope: theta must lie in (0, 1)");
    }
    validate_gamma(gamma);
    if (side == TimeSide::negative) {
        return (1.0 - theta) * (1.0 - gamma) + theta * gamma;
    }
    return (1.0 - theta) * gamma + theta * (1.0 - gamma);
}

namespace {

struct SideMax {
    double value = -std::numeric_limits<double>::infinity();
    std::size_t step = 0;
};

// Running maximum of W(jh) - jh * slope over j = 1..steps; first hit wins ties.
SideMax walk_side(RngStream& stream, double slope, std::size_t steps, double h, double sd) {
    SideMax best;
    double w = 0.0;
    for (std::size_t j = 1; j <= steps; ++j) {
        w += sd * standard_normal(stream);
        const double v = w - (static_cast<double>(j) * h) * slope;
        if (v > best.value) {
            best.value = v;
            best.step = j;
        }
    }
    return best;
}

// Signed grid index of the argmax. Candidates: t = 0 (value 0), the best right
// point, the best left point. Ties prefer |j| small, then the negative side.
long long argmax_index(const SideMax& right, const SideMax& left) {
    double best_value = 0.0;
    long long best = 0;
    if (right.value > best_value) {
        best_value = right.value;
        best = static_cast<long long>(right.step);
    }
    const auto left_index = -static_cast<long long>(left.step);
    if (left.value > best_value) {
        best = left_index;
    } else if (left.value == best_value && best != 0 &&
               static_cast<long long>(left.step) <= std::llabs(best)) {
        best = left_index;
    }
    return best;
}

LimitSamples simulate_with_slopes(const LimitLawConfig& config, double left_slope,
                                  double right_slope, double time_scale) {
    const auto steps =
        static_cast<std::size_t>(std::floor(config.half_width / config.step + 1e-9));
    const double sd = std::sqrt(config.step);
    const double boundary_steps = 0.95 * static_cast<double>(steps);

    std::vector<double> samples(config.replicates);
    std::vector<unsigned char> hit(config.replicates, 0);

    parallel_for(config.replicates, config.threads, [&](std::size_t r) {
        RngStream stream = make_stream(config.seed, {r});
        const SideMax right = walk_side(stream, right_slope, steps, config.step, sd);
        const SideMax left = walk_side(stream, left_slope, steps, config.step, sd);
        const long long j = argmax_index(right, left);
        samples[r] = static_cast<double>(j) * config.step * time_scale;
        hit[r] = static_cast<double>(std::llabs(j)) >= boundary_steps ? 1 : 0;
    });

    std::size_t hits = 0;
    for (unsigned char h : hit) {
        hits += h;
    }

    LimitSamples out;
    out.config = config;
    out.boundary_hit_fraction =
        static_cast<double>(hits) / static_cast<double>(config.replicates);
    if (out.boundary_hit_fraction > max_boundary_hit_fraction) {
        std::ostringstream msg;
        msg << "limit law: " << out.boundary_hit_fraction * 100.0
            << "% of argmax draws fell within 5% of the grid edge (limit "
            << max_boundary_hit_fraction * 100.0 << "%); increase the half-width T (now "
            << config.half_width << ")";
        throw BoundaryHitError(msg.str());
    }
    std::sort(samples.begin(), samples.end());
    out.samples = std::move(samples);
    return out;
}

}  // namespace

LimitSamples simulate_argmax_samples(const LimitLawConfig& config) {
    config.validate();
    return simulate_with_slopes(config, drift_slope(config.theta, config.gamma, TimeSide::negative),
                                drift_slope(config.theta, config.gamma, TimeSide::nonnegative),
                                1.0);
}

LimitSamples simulate_scaled_argmax_samples(const LimitLawConfig& config) {
    config.validate();
    const double left = drift_slope(config.theta, config.gamma, TimeSide::negative);
    const double right = drift_slope(config.theta, config.gamma, TimeSide::nonnegative);
    const double c = 2.0 * std::min(left, right);
    return simulate_with_slopes(config, left / c, right / c, 1.0 / (c * c));
}

double quantile(std::span<const double> sorted, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("quantile level must lie in (0, 1), got " +
                                    std::to_string(p));
    }
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    // Smallest count c with c / size >= p; the relative slack absorbs the
    // rounding of p * size when p sits exactly on a grid point c / size.
    const double scaled = p * static_cast<double>(sorted.size());
    auto count = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
    count = std::clamp<std::size_t>(count, 1, sorted.size());
    return sorted[count - 1];
}

double quantile(const LimitSamples& samples, double p) { return quantile(samples.samples, p); }

double asymptotic_scale(double tau2, double d_hat) {
    if (d_hat == 0.0) {
        throw UndefinedIntervalError(
            "estimated shift is zero; the asymptotic interval is undefined");
    }
    if (!(tau2 > 0.0) || !std::isfinite(tau2) || !std::isfinite(d_hat)) {
        throw std::invalid_argument("asymptotic interval needs tau2 > 0 and finite d_hat");
    }
    return tau2 / (d_hat * d_hat);
}

ConfidenceInterval asymptotic_ci_from_quantiles(double m_hat, double scale, double q_low,
                                                double q_high, double alpha) {
    validate_alpha(alpha);
    ConfidenceInterval ci;
    ci.lower = m_hat - scale * q_high;
    ci.upper = m_hat - scale * q_low;
    ci.level = 1.0 - alpha;
    ci.method = CiMethod::asymptotic;
    return ci;
}

ConfidenceInterval asymptotic_ci(std::size_t m_hat, double tau2, double d_hat,
                                 const LimitSamples& samples, double alpha) {
    validate_alpha(alpha);
    const double scale = asymptotic_scale(tau2, d_hat);
    return asymptotic_ci_from_quantiles(static_cast<double>(m_hat), scale,
                                        quantile(samples, alpha / 2.0),
                                        quantile(samples, 1.0 - alpha / 2.0), alpha);
}

LimitSampleCache::LimitSampleCache(LimitLawConfig base) : base_(base) {
    // theta/gamma of the base are placeholders; the rest must be valid now.
    LimitLawConfig probe = base_;
    probe.theta = 0.5;
    probe.gamma = 0.5;
    probe.validate();
}

std::shared_ptr<const LimitSamples> LimitSampleCache::get(double theta, double gamma) {
    validate_gamma(gamma);
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::invalid_argument("limit-law cache: theta must lie in (0, 1)");
    }
    // At gamma = 1/2 the law does not depend on theta.
    long long theta_key = gamma == 0.5 ? 500 : std::llround(theta * 1000.0);
    theta_key = std::clamp<long long>(theta_key, 1, 999);
    const long long gamma_key = std::llround(gamma * 1e6);
    const Key key{theta_key, gamma_key};

    std::promise<std::shared_ptr<const LimitSamples>> promise;
    Entry entry;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            entry = promise.get_future().share();
            entries_.emplace(key, entry);
            owner = true;
        } else {
            entry = it->second;
        }
    }

    if (owner) {
        try {
            LimitLawConfig cfg = base_;
            cfg.theta = static_cast<double>(theta_key) / 1000.0;
            cfg.gamma = gamma;
            cfg.seed = derive_seed(base_.seed, {static_cast<std::uint64_t>(theta_key),
                                                static_cast<std::uint64_t>(gamma_key)});
            promise.set_value(
                std::make_shared<const LimitSamples>(simulate_scaled_argmax_samples(cfg)));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return entry.get();
}

std::size_t LimitSampleCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace amocci
