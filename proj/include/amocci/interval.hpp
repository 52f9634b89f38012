#pragma once

#include <string_view>

namespace amocci {

enum class CiMethod { bootstrap, asymptotic };

[[nodiscard]] std::string_view to_string(CiMethod method) noexcept;

/// Real-valued bounds for the change-point. Bounds are not clipped to the
/// observation range; use clipped() for a display copy.
struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;  // 1 - alpha
    CiMethod method = CiMethod::bootstrap;

    [[nodiscard]] double length() const noexcept { return upper - lower; }
    [[nodiscard]] bool contains(double m) const noexcept { return lower <= m && m <= upper; }
    [[nodiscard]] ConfidenceInterval clipped(double lo, double hi) const noexcept;
};

/// Throws std::invalid_argument unless 0 < alpha < 1.
void validate_alpha(double alpha);

}  // namespace amocci
