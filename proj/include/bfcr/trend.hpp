#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "bfcr/bracing.hpp"
#include "bfcr/error.hpp"
#include "bfcr/series.hpp"
#include "bfcr/spectral.hpp"

namespace bfcr {

struct TrendConfig {
    FcParams fc;
    FilterSpec filter;

    void validate() const {
        fc.validate();
        filter.validate();
    }
};

/// Trend values aligned index-by-index with the input series.
struct TrendLine {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

namespace detail {

inline double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

/// Braced Fourier continuation regression:
///   extend with braces + continuation, remove the mean, transform, apply the
///   sigma low-pass, invert, keep the original N positions, restore the mean,
///   then shift so the trend and the data share the same mean.
inline TrendLine bfcr_trend(std::span<const double> values, const TrendConfig& config, const BracingSet& bracing) {
    detail::require_min_points(values.size(), 4, "trend extraction");
    config.validate();
    if (!(bracing.params() == config.fc)) {
        throw Error(Errc::InvalidParams, "bracing set was built with different continuation parameters");
    }
    const std::size_t n = values.size();

    const ExtendedSeries ext = brace_extend(values, bracing);
    const double level = detail::mean(ext.values);
    std::vector<double> centered(ext.values.size());
    for (std::size_t i = 0; i < centered.size(); ++i) centered[i] = ext.values[i] - level;

    const Spectrum spectrum = dft(centered);
    const auto weights = sigma_weights(spectrum.size(), config.filter);
    const std::vector<double> smooth = idft(lowpass(spectrum, weights));

    TrendLine trend;
    trend.values.resize(n);
    double offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trend.values[i] = smooth[ext.d + i] + level;
        offset += trend.values[i] - values[i];
    }
    offset /= static_cast<double>(n);
    for (double& v : trend.values) {
        v -= offset;
        if (!std::isfinite(v)) throw Error(Errc::NumericalFailure, "trend produced a non-finite value");
    }
    return trend;
}

inline TrendLine bfcr_trend(const Series& series, const TrendConfig& config, const BracingSet& bracing) {
    return bfcr_trend(series.values(), config, bracing);
}

}  // namespace bfcr
