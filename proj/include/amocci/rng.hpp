#pragma once

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace amocci {

/// Engine behind every random stream. Streams are plain values; a call that
/// consumes randomness takes one by reference and owns it for the duration.
using RngStream = std::mt19937_64;

/// Mixes a master seed with an ordered list of keys (cell, replicate, ...)
/// into an independent 64-bit seed. Same inputs give the same seed on every
/// platform.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master,
                                        std::initializer_list<std::uint64_t> keys);

[[nodiscard]] inline RngStream make_stream(std::uint64_t master,
                                           std::initializer_list<std::uint64_t> keys) {
    return RngStream(derive_seed(master, keys));
}

// Boost's distributions are specified algorithmically (ziggurat for the
// normal), so draws do not depend on the standard library vendor.
[[nodiscard]] inline double standard_normal(RngStream& stream) {
    boost::random::normal_distribution<double> dist(0.0, 1.0);
    return dist(stream);
}

/// Uniform draw from {0, ..., upper}.
[[nodiscard]] inline std::size_t uniform_index(RngStream& stream, std::size_t upper) {
    boost::random::uniform_int_distribution<std::size_t> dist(0, upper);
    return dist(stream);
}

}  // namespace amocci
