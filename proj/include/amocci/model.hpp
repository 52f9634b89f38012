#pragma once

#include "amocci/rng.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace amocci {

/// Ordered observations X(1..n), n >= 3, all finite.
///
/// Storage is 0-based; every index that crosses the public API of this
/// library (change-points, lags, segment bounds) is 1-based as in the model
/// X(i) = mu + d 1{i > m} + e(i).
class TimeSeries {
public:
    static constexpr std::size_t min_length = 3;

    /// Throws std::invalid_argument if too short or any value is non-finite.
    explicit TimeSeries(std::vector<double> values);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// 1-based element access, X(i).
    [[nodiscard]] double at(std::size_t i) const;

private:
    std::vector<double> values_;
};

/// Parameters of the at-most-one-change location model.
struct AmocSpec {
    std::size_t n = 0;
    std::size_t m = 0;  // last index before the shift, 1 <= m <= n-1
    double mu = 0.0;
    double d = 0.0;

    void validate() const;
};

struct Ar1Params {
    double rho = 0.0;
    double innovation_sd = 1.0;

    void validate() const;
};

/// e(i) = rho e(i-1) + eps(i), eps ~ N(0, sd^2), with e(0) drawn from the
/// stationary law N(0, sd^2 / (1 - rho^2)), so e(1..n) is strictly stationary.
[[nodiscard]] std::vector<double> ar1_generate(const Ar1Params& params, std::size_t n,
                                               RngStream& stream);

/// X(i) = mu + d 1{i > m} + e(i).
[[nodiscard]] TimeSeries make_amoc_series(const AmocSpec& spec, std::span<const double> errors);

/// Reads one observation per line. Blank lines are skipped; any other line
/// that is not a single finite decimal number is a DataError.
[[nodiscard]] TimeSeries read_series(std::istream& in);
[[nodiscard]] TimeSeries read_series_file(const std::filesystem::path& path);

}  // namespace amocci
