#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "bfcr/anomaly.hpp"
#include "bfcr/error.hpp"
#include "bfcr/series.hpp"
#include "bfcr/trend.hpp"

namespace bfcr {

/// Everything a command needs. Mitigation parameters are kept even when the
/// mitigation is disabled so a config file can tune them ahead of a flag.
struct RunConfig {
    TrendConfig trend;
    DetectionConfig detect;
    GuardParams guards;
    VolParams vol;
    bool guards_enabled = false;
    bool vol_enabled = false;
    std::optional<std::string> bracing_file;

    DetectionConfig detection() const {
        DetectionConfig out = detect;
        out.guards = guards_enabled ? std::optional<GuardParams>(guards) : std::nullopt;
        out.volatility = vol_enabled ? std::optional<VolParams>(vol) : std::nullopt;
        return out;
    }

    void validate() const {
        trend.validate();
        detection().validate();
        guards.validate();
        vol.validate();
    }
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(Errc::InvalidParams, "config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
    }
    return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw Error(Errc::InvalidParams, "config key '" + std::string(key) + "': expected a boolean, got '" +
                                         std::string(text) + "'");
}

inline Sidedness parse_sidedness(std::string_view key, std::string_view text) {
    if (text == "two-sided") return Sidedness::two_sided;
    if (text == "one-sided-above") return Sidedness::one_sided_above;
    throw Error(Errc::InvalidParams, "config key '" + std::string(key) +
                                         "': expected two-sided or one-sided-above, got '" + std::string(text) + "'");
}

}  // namespace detail

/// Applies one dotted key (e.g. "fc.d", "filter.cutoff_fraction"). Unknown keys throw.
inline void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
    using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;
    static const std::map<std::string, Setter, std::less<>> setters = {
        {"fc.d", [](RunConfig& c, auto k, auto v) { c.trend.fc.d = detail::parse_number<int>(k, v); }},
        {"fc.c_fc", [](RunConfig& c, auto k, auto v) { c.trend.fc.c_fc = detail::parse_number<int>(k, v); }},
        {"fc.z", [](RunConfig& c, auto k, auto v) { c.trend.fc.z = detail::parse_number<int>(k, v); }},
        {"fc.e", [](RunConfig& c, auto k, auto v) { c.trend.fc.e = detail::parse_number<int>(k, v); }},
        {"fc.n_over", [](RunConfig& c, auto k, auto v) { c.trend.fc.n_over = detail::parse_number<int>(k, v); }},
        {"filter.cutoff_fraction",
         [](RunConfig& c, auto k, auto v) { c.trend.filter.cutoff_fraction = detail::parse_number<double>(k, v); }},
        {"filter.power", [](RunConfig& c, auto k, auto v) { c.trend.filter.power = detail::parse_number<int>(k, v); }},
        {"detect.k_sigma", [](RunConfig& c, auto k, auto v) { c.detect.k_sigma = detail::parse_number<double>(k, v); }},
        {"detect.sided", [](RunConfig& c, auto k, auto v) { c.detect.sided = detail::parse_sidedness(k, v); }},
        {"detect.edge_sided", [](RunConfig& c, auto k, auto v) { c.detect.edge_sided = detail::parse_sidedness(k, v); }},
        {"detect.min_points",
         [](RunConfig& c, auto k, auto v) { c.detect.min_points = detail::parse_number<std::size_t>(k, v); }},
        {"detect.screen_internal",
         [](RunConfig& c, auto k, auto v) { c.detect.screen_internal = detail::parse_bool(k, v); }},
        {"guards.enabled", [](RunConfig& c, auto k, auto v) { c.guards_enabled = detail::parse_bool(k, v); }},
        {"guards.min_pct_change",
         [](RunConfig& c, auto k, auto v) { c.guards.min_pct_change = detail::parse_number<double>(k, v); }},
        {"guards.cov_window", [](RunConfig& c, auto k, auto v) { c.guards.cov_window = detail::parse_number<int>(k, v); }},
        {"guards.cov_threshold",
         [](RunConfig& c, auto k, auto v) { c.guards.cov_threshold = detail::parse_number<double>(k, v); }},
        {"vol.enabled", [](RunConfig& c, auto k, auto v) { c.vol_enabled = detail::parse_bool(k, v); }},
        {"vol.ratio_low", [](RunConfig& c, auto k, auto v) { c.vol.ratio_low = detail::parse_number<double>(k, v); }},
        {"vol.ratio_high", [](RunConfig& c, auto k, auto v) { c.vol.ratio_high = detail::parse_number<double>(k, v); }},
        {"vol.trim_fraction",
         [](RunConfig& c, auto k, auto v) { c.vol.trim_fraction = detail::parse_number<double>(k, v); }},
        {"vol.min_remaining_fraction",
         [](RunConfig& c, auto k, auto v) { c.vol.min_remaining_fraction = detail::parse_number<double>(k, v); }},
        {"bracing.file", [](RunConfig& c, auto, auto v) { c.bracing_file = std::string(v); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) {
        throw Error(Errc::InvalidParams, "unknown config key '" + std::string(key) + "'");
    }
    it->second(cfg, key, value);
}

/// Flat `key=value` text; blank lines and `#` comments are ignored.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        auto line = detail::trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        ++line_no;
        if (!line.empty() && line.front() != '#') {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw Error(Errc::InvalidParams, "config line " + std::to_string(line_no) + ": expected key=value");
            }
            set_config_value(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        }
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
}

}  // namespace bfcr
