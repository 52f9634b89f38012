#include "amocci/model.hpp"

#include "amocci/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace amocci {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < min_length) {
        throw std::invalid_argument("time series needs at least 3 observations, got " +
                                    std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("time series value X(" + std::to_string(i + 1) +
                                        ") is not finite");
        }
    }
}

double TimeSeries::at(std::size_t i) const {
    if (i < 1 || i > values_.size()) {
        throw std::out_of_range("time series index " + std::to_string(i) + " outside 1.." +
                                std::to_string(values_.size()));
    }
    return values_[i - 1];
}

void AmocSpec::validate() const {
    if (n < TimeSeries::min_length) {
        throw std::invalid_argument("AMOC series length must be at least 3");
    }
    if (m < 1 || m > n - 1) {
        throw std::invalid_argument("change index m must satisfy 1 <= m <= n-1");
    }
    if (!std::isfinite(mu) || !std::isfinite(d)) {
        throw std::invalid_argument("AMOC mean and shift must be finite");
    }
}

void Ar1Params::validate() const {
    if (!(std::fabs(rho) < 1.0)) {
        throw std::invalid_argument("AR(1) coefficient must satisfy |rho| < 1");
    }
    if (!(innovation_sd > 0.0) || !std::isfinite(innovation_sd)) {
        throw std::invalid_argument("AR(1) innovation sd must be positive and finite");
    }
}

std::vector<double> ar1_generate(const Ar1Params& params, std::size_t n, RngStream& stream) {
    params.validate();
    if (n < 1) {
        throw std::invalid_argument("ar1_generate needs n >= 1");
    }
    const double stationary_sd = params.innovation_sd / std::sqrt(1.0 - params.rho * params.rho);
    double previous = stationary_sd * standard_normal(stream);

    std::vector<double> out(n);
    for (double& e : out) {
        e = params.rho * previous + params.innovation_sd * standard_normal(stream);
        previous = e;
    }
    return out;
}

TimeSeries make_amoc_series(const AmocSpec& spec, std::span<const double> errors) {
    spec.validate();
    if (errors.size() != spec.n) {
        throw std::invalid_argument("error sequence length " + std::to_string(errors.size()) +
                                    " does not match n = " + std::to_string(spec.n));
    }
    std::vector<double> x(spec.n);
    for (std::size_t i = 1; i <= spec.n; ++i) {
        x[i - 1] = spec.mu + (i > spec.m ? spec.d : 0.0) + errors[i - 1];
    }
    return TimeSeries(std::move(x));
}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

}  // namespace

TimeSeries read_series(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t begin = 0;
        std::size_t end = line.size();
        while (begin < end && is_blank(line[begin])) ++begin;
        while (end > begin && is_blank(line[end - 1])) --end;
        if (begin == end) {
            continue;
        }
        const char* first = line.data() + begin;
        const char* last = line.data() + end;
        if (*first == '+') {
            ++first;
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
            throw DataError("line " + std::to_string(line_no) + ": not a finite number: '" +
                            line.substr(begin, end - begin) + "'");
        }
        values.push_back(value);
    }
    if (values.size() < TimeSeries::min_length) {
        throw DataError("series has " + std::to_string(values.size()) +
                        " observations; at least 3 are required");
    }
    return TimeSeries(std::move(values));
}

TimeSeries read_series_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open series file '" + path.string() + "'");
    }
    return read_series(in);
}

}  // namespace amocci
