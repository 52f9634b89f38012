#pragma once

#include "amocci/bootstrap.hpp"
#include "amocci/interval.hpp"
#include "amocci/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace amocci::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,      // bad flags or invalid config
    exit_data = 2,       // unreadable or unusable series
    exit_numerical = 3,  // a numerical guard tripped
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
    double gamma = 0.5;
    std::size_t block_length = 0;
    std::size_t resamples = 10000;
    BlockScheme scheme = BlockScheme::circular_overlapping;
    std::vector<double> alphas{0.05};
    std::optional<std::size_t> lambda;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::size_t limit_replicates = 200000;
    double limit_half_width = 200.0;
    double limit_step = 0.05;
};

struct IntervalPair {
    ConfidenceInterval raw;
    ConfidenceInterval clipped;  // to [1, n]
    double q_low = 0.0;   // bootstrap: q*_L; asymptotic: q(alpha/2)
    double q_high = 0.0;  // bootstrap: q*_U; asymptotic: q(1 - alpha/2)
};

struct AlphaReport {
    double alpha = 0.0;
    IntervalPair bootstrap;
    std::optional<IntervalPair> asymptotic;  // empty when d_hat == 0
};

/// Everything analyze computed, plus every input it used.
struct AnalyzeReport {
    AnalyzeOptions options;
    std::size_t n = 0;
    std::size_t m_hat = 0;
    double mu1_hat = 0.0;
    double mu2_hat = 0.0;
    double d_hat = 0.0;
    double tau2 = 0.0;
    bool tau2_floored = false;
    std::size_t lambda = 0;
    double theta_hat = 0.0;
    std::uint64_t bootstrap_seed = 0;
    std::uint64_t limit_seed = 0;
    std::optional<double> asymptotic_scale;  // tau2 / d_hat^2
    double boundary_hit_fraction = 0.0;
    std::vector<AlphaReport> intervals;
    std::vector<std::string> warnings;
};

/// Fit, long-run variance, bootstrap and asymptotic intervals for one series.
/// Throws BoundaryHitError if the limit-law guard trips.
[[nodiscard]] AnalyzeReport analyze(const TimeSeries& series, const AnalyzeOptions& options);

void print_report(std::ostream& out, const AnalyzeReport& report);
[[nodiscard]] std::string report_to_json(const AnalyzeReport& report);

}  // namespace amocci::cli
