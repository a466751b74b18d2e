#pragma once

// JSON encoding of anomaly reports. Requires nlohmann/json on the include path.

#include <json.hpp>

#include "bfcr/anomaly.hpp"

namespace bfcr {

namespace detail {

inline nlohmann::json stats_json(const std::optional<PopulationStats>& s) {
    if (!s) return nullptr;
    return {{"mu", s->mu}, {"sigma", s->sigma}, {"n", s->n}};
}

inline nlohmann::json volatility_json(const std::optional<VolatilityOutcome>& v) {
    if (!v) return {{"applied", false}};
    return {{"applied", true},
            {"iterations", v->iterations},
            {"kept_from_index", v->kept_from + 1},
            {"kept_count", v->kept_count},
            {"final_ratio", v->final_ratio},
            {"in_band", v->in_band}};
}

}  // namespace detail

/// Report schema; all indices are 1-based positions in the input file.
///   internal: {mode, flags:[{index,deviation,score}], stats:{mu,sigma,n},
///              mitigations:{volatility_truncation}}
///   edge:     {mode, which, verdict, reason, sample_s, edge_index, stats,
///              excluded_internal, mitigations:{volatility_truncation,
///              internal_screening, guards}}
inline nlohmann::json to_json(const AnomalyReport& report) {
    using nlohmann::json;
    json out;
    if (report.mode == DetectionMode::internal) {
        out["mode"] = "internal";
        json flags = json::array();
        for (const Flag& f : report.flagged) {
            flags.push_back({{"index", f.index + 1}, {"deviation", f.deviation}, {"score", f.score}});
        }
        out["flags"] = std::move(flags);
        out["stats"] = detail::stats_json(report.stats);
        out["mitigations"] = {{"volatility_truncation", detail::volatility_json(report.mitigations.volatility)}};
        return out;
    }

    out["mode"] = "edge";
    out["which"] = report.mode == DetectionMode::edge_first ? "first" : "last";
    out["verdict"] = report.verdict ? std::string(to_string(*report.verdict)) : std::string("normal");
    out["reason"] = report.reason;
    out["sample_s"] = report.edge_sample ? json(*report.edge_sample) : json(nullptr);
    out["edge_index"] = report.edge_index ? json(*report.edge_index + 1) : json(nullptr);
    out["stats"] = detail::stats_json(report.stats);

    json excluded = json::array();
    json screening = {{"applied", false}};
    if (const auto& s = report.mitigations.screening) {
        for (std::size_t i : s->excluded) excluded.push_back(i + 1);
        screening = {{"applied", true},
                     {"excluded", excluded},
                     {"mu_before", s->before.mu},
                     {"sigma_before", s->before.sigma},
                     {"sigma_after", report.stats ? json(report.stats->sigma) : json(nullptr)}};
    }
    out["excluded_internal"] = excluded;

    json guards = {{"applied", false}};
    if (const auto& g = report.mitigations.guards) {
        guards = {{"applied", true},
                  {"verdict", g->run ? "run" : "skip"},
                  {"reason", g->reason},
                  {"pct_change", g->pct_change},
                  {"cov", std::isfinite(g->cov) ? json(g->cov) : json(nullptr)},
                  {"pct_tripped", g->pct_tripped},
                  {"cov_tripped", g->cov_tripped}};
    }
    out["mitigations"] = {{"volatility_truncation", detail::volatility_json(report.mitigations.volatility)},
                          {"internal_screening", std::move(screening)},
                          {"guards", std::move(guards)}};
    return out;
}

}  // namespace bfcr
