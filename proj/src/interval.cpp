#include "amocci/interval.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace amocci {

std::string_view to_string(CiMethod method) noexcept {
    switch (method) {
        case CiMethod::bootstrap:
            return "bootstrap";
        case CiMethod::asymptotic:
            return "asymptotic";
    }
    return "unknown";
}

ConfidenceInterval ConfidenceInterval::clipped(double lo, double hi) const noexcept {
    ConfidenceInterval out = *this;
    out.lower = std::clamp(lower, lo, hi);
    out.upper = std::clamp(upper, lo, hi);
    return out;
}

void validate_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

}  // namespace amocci
