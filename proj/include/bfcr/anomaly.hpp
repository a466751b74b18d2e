#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfcr/bracing.hpp"
#include "bfcr/error.hpp"
#include "bfcr/series.hpp"
#include "bfcr/trend.hpp"

namespace bfcr {

enum class Sidedness {
    two_sided,        // |d - mu| > k sigma
    one_sided_above,  // d - mu > k sigma
};

/// Pre-checks that skip edge detection on locally deterministic edges.
struct GuardParams {
    double min_pct_change = 0.10;
    int cov_window = 4;
    double cov_threshold = 0.2;

    void validate() const {
        if (!(min_pct_change > 0.0)) throw Error(Errc::InvalidParams, "guards.min_pct_change must be positive");
        if (cov_window < 3) throw Error(Errc::InvalidParams, "guards.cov_window must be >= 3");
        if (!(cov_threshold > 0.0)) throw Error(Errc::InvalidParams, "guards.cov_threshold must be positive");
    }
};

/// Leading-data truncation until both halves of the residuals have similar spread.
struct VolParams {
    double ratio_low = 0.75;
    double ratio_high = 1.25;
    double trim_fraction = 0.20;
    double min_remaining_fraction = 0.50;

    void validate() const {
        if (!(ratio_low > 0.0 && ratio_low <= 1.0 && ratio_high >= 1.0)) {
            throw Error(Errc::InvalidParams, "volatility band must satisfy 0 < ratio_low <= 1 <= ratio_high");
        }
        if (!(trim_fraction > 0.0 && trim_fraction < 1.0)) {
            throw Error(Errc::InvalidParams, "vol.trim_fraction must lie in (0, 1)");
        }
        if (!(min_remaining_fraction > 0.0 && min_remaining_fraction < 1.0)) {
            throw Error(Errc::InvalidParams, "vol.min_remaining_fraction must lie in (0, 1)");
        }
    }
};

struct DetectionConfig {
    double k_sigma = 2.0;
    Sidedness sided = Sidedness::two_sided;                 // internal flags and edge screening
    Sidedness edge_sided = Sidedness::one_sided_above;      // edge verdict
    std::size_t min_points = 6;
    bool screen_internal = true;
    std::optional<GuardParams> guards;                      // disabled when empty
    std::optional<VolParams> volatility;                    // disabled when empty

    void validate() const {
        if (!(k_sigma > 0.0)) throw Error(Errc::InvalidParams, "detect.k_sigma must be positive");
        if (min_points < 4) throw Error(Errc::InvalidParams, "detect.min_points must be >= 4");
        if (guards) guards->validate();
        if (volatility) volatility->validate();
    }
};

/// Mean and population standard deviation of |x_i - y_i|.
struct PopulationStats {
    double mu = 0.0;
    double sigma = 0.0;
    std::size_t n = 0;
};

struct Flag {
    std::size_t index = 0;  // 0-based position in the input series
    double deviation = 0.0;
    double score = 0.0;     // (deviation - mu) / sigma, 0 when sigma is degenerate
};

enum class EdgeVerdict { anomalous, normal, skipped };
enum class DetectionMode { internal, edge_first, edge_last };

struct GuardOutcome {
    bool run = true;
    std::string reason;
    double pct_change = 0.0;
    double cov = 0.0;
    bool pct_tripped = false;
    bool cov_tripped = false;
};

struct VolatilityOutcome {
    std::size_t kept_from = 0;  // first kept 0-based index in the input orientation
    std::size_t kept_count = 0;
    std::size_t iterations = 0;
    double final_ratio = 1.0;
    bool in_band = false;
};

struct ScreeningOutcome {
    std::vector<std::size_t> excluded;  // 0-based indices dropped from the population
    PopulationStats before;
};

struct Mitigations {
    std::optional<VolatilityOutcome> volatility;
    std::optional<ScreeningOutcome> screening;
    std::optional<GuardOutcome> guards;
};

struct AnomalyReport {
    DetectionMode mode = DetectionMode::internal;
    std::vector<Flag> flagged;
    std::optional<PopulationStats> stats;  // empty only when edge detection was skipped
    std::optional<double> edge_sample;     // s = |y2_N - x_N|
    std::optional<std::size_t> edge_index;
    std::optional<EdgeVerdict> verdict;
    std::string reason;
    Mitigations mitigations;
};

constexpr std::string_view to_string(EdgeVerdict v) noexcept {
    switch (v) {
        case EdgeVerdict::anomalous: return "anomalous";
        case EdgeVerdict::normal: return "normal";
        case EdgeVerdict::skipped: return "skipped";
    }
    return "unknown";
}

namespace detail {

// Spread at or below this is rounding noise of the trend, not data.
inline double sigma_floor(std::span<const double> values) {
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, std::abs(v));
    return 64.0 * std::numeric_limits<double>::epsilon() * peak;
}

inline std::vector<double> abs_deviations(std::span<const double> values, std::span<const double> trend) {
    std::vector<double> d(values.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::abs(values[i] - trend[i]);
    return d;
}

inline PopulationStats stats_of(std::span<const double> deviations, std::span<const std::size_t> exclude = {}) {
    std::vector<bool> skip(deviations.size(), false);
    for (std::size_t i : exclude) {
        if (i >= deviations.size()) throw Error(Errc::ShapeError, "excluded index out of range");
        skip[i] = true;
    }
    PopulationStats s;
    double sum = 0.0;
    for (std::size_t i = 0; i < deviations.size(); ++i) {
        if (!skip[i]) {
            sum += deviations[i];
            ++s.n;
        }
    }
    if (s.n == 0) throw Error(Errc::NoData, "no points left for population statistics");
    s.mu = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < deviations.size(); ++i) {
        if (!skip[i]) ss += (deviations[i] - s.mu) * (deviations[i] - s.mu);
    }
    s.sigma = std::sqrt(ss / static_cast<double>(s.n));
    return s;
}

inline double population_sigma(std::span<const double> v) { return stats_of(v).sigma; }

inline bool exceeds(double deviation, const PopulationStats& s, double k_sigma, Sidedness sided) {
    const double delta = deviation - s.mu;
    return (sided == Sidedness::two_sided ? std::abs(delta) : delta) > k_sigma * s.sigma;
}

}  // namespace detail

inline PopulationStats population_stats(std::span<const double> values, std::span<const double> trend,
                                        std::span<const std::size_t> exclude = {}) {
    if (values.size() != trend.size()) {
        throw Error(Errc::ShapeError, "series and trend lengths differ");
    }
    return detail::stats_of(detail::abs_deviations(values, trend), exclude);
}

inline PopulationStats population_stats(const Series& series, const TrendLine& trend,
                                        std::span<const std::size_t> exclude = {}) {
    return population_stats(series.values(), trend.values, exclude);
}

/// Relative last-step change and CoV of the last cov_window differences.
inline GuardOutcome low_noise_guards(const Series& series, const GuardParams& params) {
    params.validate();
    const auto m = static_cast<std::size_t>(params.cov_window);
    detail::require_min_points(series.size(), m, "low-noise guards");
    const std::size_t n = series.size();

    GuardOutcome out;
    const double prev = series[n - 2];
    out.pct_change = std::abs(series[n - 1] - prev) / std::max(std::abs(prev), 1e-300);
    out.pct_tripped = out.pct_change < params.min_pct_change;

    std::vector<double> diffs;
    for (std::size_t i = n - m + 1; i < n; ++i) diffs.push_back(series[i] - series[i - 1]);
    const double mean = detail::mean(diffs);
    out.cov = mean == 0.0 ? std::numeric_limits<double>::infinity()
                          : detail::population_sigma(diffs) / std::abs(mean);
    out.cov_tripped = out.cov < params.cov_threshold;

    if (out.pct_tripped) {
        out.run = false;
        out.reason = "below percent-change threshold";
    } else if (out.cov_tripped) {
        out.run = false;
        out.reason = "edge locally deterministic";
    }
    return out;
}

struct VolatilityResult {
    Series kept;
    std::size_t kept_from = 0;
    std::size_t iterations = 0;
    double final_ratio = 1.0;
    bool in_band = false;
};

/// Drops leading data until the residual spread of the two halves agrees
/// within [ratio_low, ratio_high], never keeping fewer than
/// ceil(min_remaining_fraction * N), 4, or `min_keep` points.
inline VolatilityResult truncate_volatility(const Series& series, const VolParams& params,
                                            const TrendConfig& trend_config, const BracingSet& bracing,
                                            std::size_t min_keep = 4) {
    params.validate();
    detail::require_min_points(series.size(), 8, "volatility truncation");
    const std::size_t n0 = series.size();
    const auto floor_len = std::max<std::size_t>(
        {static_cast<std::size_t>(std::ceil(params.min_remaining_fraction * static_cast<double>(n0))), 4, min_keep});

    VolatilityResult out{series, 0, 0, 1.0, false};
    const auto values = series.values();
    while (true) {
        const auto window = values.subspan(out.kept_from);
        const TrendLine trend = bfcr_trend(window, trend_config, bracing);
        const auto dev = detail::abs_deviations(window, trend.values);
        const std::size_t half = (dev.size() + 1) / 2;
        const double floor = detail::sigma_floor(window);
        const double s1 = detail::population_sigma(std::span(dev).first(half));
        const double s2 = detail::population_sigma(std::span(dev).subspan(half));
        const bool zero1 = s1 <= floor;
        const bool zero2 = s2 <= floor;
        if (zero1 && zero2) {
            out.final_ratio = 1.0;
        } else if (zero2) {
            out.final_ratio = std::numeric_limits<double>::infinity();
        } else {
            out.final_ratio = s1 / s2;
        }
        out.in_band = out.final_ratio >= params.ratio_low && out.final_ratio <= params.ratio_high;
        if (out.in_band) break;

        const std::size_t current = window.size();
        const auto cut = static_cast<std::size_t>(std::ceil(params.trim_fraction * static_cast<double>(current)));
        if (current - cut < floor_len) break;
        out.kept_from += cut;
        ++out.iterations;
    }
    out.kept = series.slice(out.kept_from, n0 - out.kept_from);
    return out;
}

namespace detail {

inline VolatilityOutcome to_outcome(const VolatilityResult& r) {
    return {r.kept_from, r.kept.size(), r.iterations, r.final_ratio, r.in_band};
}

}  // namespace detail

/// Flags interior points whose deviation from the trend is more than
/// k_sigma population standard deviations from the mean deviation.
inline AnomalyReport detect_internal(const Series& series, const DetectionConfig& config,
                                     const TrendConfig& trend_config, const BracingSet& bracing) {
    config.validate();
    detail::require_min_points(series.size(), config.min_points, "anomaly detection");

    AnomalyReport report;
    report.mode = DetectionMode::internal;

    std::size_t offset = 0;
    std::optional<VolatilityResult> vol;
    if (config.volatility) {
        vol = truncate_volatility(series, *config.volatility, trend_config, bracing, config.min_points);
        offset = vol->kept_from;
        report.mitigations.volatility = detail::to_outcome(*vol);
    }
    const Series& work = vol ? vol->kept : series;

    const TrendLine trend = bfcr_trend(work, trend_config, bracing);
    const auto dev = detail::abs_deviations(work.values(), trend.values);
    const PopulationStats stats = detail::stats_of(dev);
    report.stats = stats;

    if (stats.sigma > detail::sigma_floor(work.values())) {
        for (std::size_t i = 1; i + 1 < dev.size(); ++i) {
            if (detail::exceeds(dev[i], stats, config.k_sigma, config.sided)) {
                report.flagged.push_back({offset + i, dev[i], (dev[i] - stats.mu) / stats.sigma});
            }
        }
    }
    return report;
}

/// Edge test for the final point: population from a trend of the first N-1
/// points, sample from the full-series trend at the last point.
inline AnomalyReport detect_edge_last(const Series& series, const DetectionConfig& config,
                                      const TrendConfig& trend_config, const BracingSet& bracing) {
    config.validate();
    detail::require_min_points(series.size(), config.min_points, "edge anomaly detection");

    AnomalyReport report;
    report.mode = DetectionMode::edge_last;
    report.edge_index = series.size() - 1;

    if (config.guards) {
        const GuardOutcome guard = low_noise_guards(series, *config.guards);
        report.mitigations.guards = guard;
        if (!guard.run) {
            report.verdict = EdgeVerdict::skipped;
            report.reason = guard.reason;
            return report;
        }
    }

    std::size_t offset = 0;
    std::optional<VolatilityResult> vol;
    if (config.volatility) {
        vol = truncate_volatility(series, *config.volatility, trend_config, bracing, config.min_points);
        offset = vol->kept_from;
        report.mitigations.volatility = detail::to_outcome(*vol);
    }
    const auto work = vol ? vol->kept.values() : series.values();
    const std::size_t n = work.size();

    const auto head = work.first(n - 1);
    const TrendLine leave_out = bfcr_trend(head, trend_config, bracing);
    const TrendLine full = bfcr_trend(work, trend_config, bracing);

    const auto dev = detail::abs_deviations(head, leave_out.values);
    PopulationStats stats = detail::stats_of(dev);
    const double floor = detail::sigma_floor(work);

    if (config.screen_internal) {
        ScreeningOutcome screening;
        screening.before = stats;
        std::vector<std::size_t> local;
        if (stats.sigma > floor) {
            for (std::size_t i = 1; i < dev.size(); ++i) {
                if (detail::exceeds(dev[i], stats, config.k_sigma, config.sided)) {
                    local.push_back(i);
                    screening.excluded.push_back(offset + i);
                }
            }
        }
        if (!local.empty()) stats = detail::stats_of(dev, local);
        report.mitigations.screening = std::move(screening);
    }
    report.stats = stats;

    const double s = std::abs(full.values[n - 1] - work[n - 1]);
    report.edge_sample = s;

    bool anomalous = false;
    double score = 0.0;
    if (stats.sigma > floor) {
        anomalous = detail::exceeds(s, stats, config.k_sigma, config.edge_sided);
        score = (s - stats.mu) / stats.sigma;
    } else {
        anomalous = s - stats.mu > floor;
    }
    report.verdict = anomalous ? EdgeVerdict::anomalous : EdgeVerdict::normal;
    report.reason = anomalous ? "edge deviation beyond k_sigma of the population" : "edge deviation within population";
    if (anomalous) report.flagged.push_back({series.size() - 1, s, score});
    return report;
}

/// detect_edge_last on the reversed series, with indices mapped back.
inline AnomalyReport detect_edge_first(const Series& series, const DetectionConfig& config,
                                       const TrendConfig& trend_config, const BracingSet& bracing) {
    AnomalyReport report = detect_edge_last(reverse(series), config, trend_config, bracing);
    const std::size_t last = series.size() - 1;
    report.mode = DetectionMode::edge_first;
    report.edge_index = 0;
    for (Flag& f : report.flagged) f.index = last - f.index;
    if (report.mitigations.screening) {
        auto& ex = report.mitigations.screening->excluded;
        for (auto& i : ex) i = last - i;
        std::sort(ex.begin(), ex.end());
    }
    if (report.mitigations.volatility) {
        // The kept suffix of the reversed series is a prefix of the original.
        report.mitigations.volatility->kept_from = 0;
    }
    return report;
}

}  // namespace bfcr
