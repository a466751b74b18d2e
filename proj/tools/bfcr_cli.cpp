// bfcr: command-line front end for braced Fourier continuation regression.
//
//   bfcr gen-bracing -o bracing.txt [--d 12 --c-fc 27 ...]
//   bfcr trend       -i data.csv [-o trend.csv]
//   bfcr detect      -i data.csv [-o report.json] [--truncate-volatility]
//   bfcr detect-edge -i data.csv [--first|--last] [--guards] [--no-screen-internal]
//   bfcr plotdata    -i data.csv [-o plot.csv]
//
// Exit codes: 0 = completed (anomalies are reported in the output, not the
// exit code), 2 = usage, input or configuration error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bfcr/bfcr.hpp"
#include "bfcr/config.hpp"
#include "bfcr/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;

struct Options {
    std::string input;
    std::string output = "-";
    std::optional<std::size_t> column;
    std::optional<std::string> config;
    std::optional<std::string> bracing;

    std::optional<int> d, c_fc, z, e, n_over;
    std::optional<double> cutoff;
    std::optional<int> power;
    std::optional<double> k_sigma;
    std::optional<std::size_t> min_points;
    std::optional<bool> screen_internal;
    bool guards = false;
    bool truncate_volatility = false;
    bool first = false;
};

void add_fc_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config, "Key=value config file (default: $BFCR_CONFIG)");
    cmd->add_option("--d", opt.d, "Brace length in points");
    cmd->add_option("--c-fc", opt.c_fc, "Continuation length in points");
    cmd->add_option("--z", opt.z, "Zero-matching point count");
    cmd->add_option("--e", opt.e, "Extra gap point count");
    cmd->add_option("--n-over", opt.n_over, "Oversampling factor of the continuation fit");
}

void add_trend_options(CLI::App* cmd, Options& opt) {
    cmd->add_option("-i,--input", opt.input, "Input CSV (one column, or index,value)")->required();
    cmd->add_option("-o,--output", opt.output, "Output path, '-' for stdout");
    cmd->add_option("--column", opt.column, "0-based column to read (default: last)");
    cmd->add_option("--bracing", opt.bracing, "Precomputed bracing file from gen-bracing");
    cmd->add_option("--cutoff", opt.cutoff, "Filter cutoff as a fraction of Nyquist");
    cmd->add_option("--power", opt.power, "Exponent applied to each Lanczos sigma factor");
    add_fc_options(cmd, opt);
}

void add_detect_options(CLI::App* cmd, Options& opt) {
    add_trend_options(cmd, opt);
    cmd->add_option("--k-sigma", opt.k_sigma, "Outlier threshold in population standard deviations");
    cmd->add_option("--min-points", opt.min_points, "Minimum series length for detection");
    cmd->add_flag("--truncate-volatility", opt.truncate_volatility, "Drop leading data from a different volatility regime");
}

bfcr::RunConfig resolve_config(const Options& opt) {
    bfcr::RunConfig cfg;
    if (opt.config) {
        bfcr::apply_config_file(cfg, *opt.config);
    } else if (const char* env = std::getenv("BFCR_CONFIG"); env != nullptr && *env != '\0') {
        bfcr::apply_config_file(cfg, env);
    }
    if (opt.d) cfg.trend.fc.d = *opt.d;
    if (opt.c_fc) cfg.trend.fc.c_fc = *opt.c_fc;
    if (opt.z) cfg.trend.fc.z = *opt.z;
    if (opt.e) cfg.trend.fc.e = *opt.e;
    if (opt.n_over) cfg.trend.fc.n_over = *opt.n_over;
    if (opt.cutoff) cfg.trend.filter.cutoff_fraction = *opt.cutoff;
    if (opt.power) cfg.trend.filter.power = *opt.power;
    if (opt.k_sigma) cfg.detect.k_sigma = *opt.k_sigma;
    if (opt.min_points) cfg.detect.min_points = *opt.min_points;
    if (opt.screen_internal) cfg.detect.screen_internal = *opt.screen_internal;
    if (opt.guards) cfg.guards_enabled = true;
    if (opt.truncate_volatility) cfg.vol_enabled = true;
    if (opt.bracing) cfg.bracing_file = *opt.bracing;
    return cfg;
}

// Loads the bracing file when one is configured (its parameters win), otherwise solves.
bfcr::BracingSet resolve_bracing(bfcr::RunConfig& cfg) {
    if (cfg.bracing_file) {
        bfcr::BracingSet set = bfcr::load_bracing_file(*cfg.bracing_file);
        cfg.trend.fc = set.params();
        return set;
    }
    return bfcr::build_bracing_set(cfg.trend.fc);
}

template <typename Writer>
void write_output(const std::string& path, Writer&& write) {
    if (path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw bfcr::Error(bfcr::Errc::Io, "cannot write '" + path + "'");
    write(out);
    if (!out) throw bfcr::Error(bfcr::Errc::Io, "write to '" + path + "' failed");
}

void cmd_gen_bracing(const Options& opt) {
    bfcr::RunConfig cfg = resolve_config(opt);
    cfg.trend.fc.validate();
    const bfcr::BracingSet set = bfcr::build_bracing_set(cfg.trend.fc);
    write_output(opt.output, [&](std::ostream& out) { bfcr::save_bracing(out, set); });
}

void cmd_trend(const Options& opt) {
    bfcr::RunConfig cfg = resolve_config(opt);
    const bfcr::BracingSet bracing = resolve_bracing(cfg);
    cfg.validate();
    const bfcr::Series series = bfcr::read_csv_file(opt.input, opt.column);
    const bfcr::TrendLine trend = bfcr::bfcr_trend(series, cfg.trend, bracing);
    write_output(opt.output, [&](std::ostream& out) {
        out << "index,value,trend\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            out << i + 1 << ',' << bfcr::detail::format_double(series[i]) << ','
                << bfcr::detail::format_double(trend[i]) << '\n';
        }
    });
}

void cmd_detect(const Options& opt) {
    bfcr::RunConfig cfg = resolve_config(opt);
    const bfcr::BracingSet bracing = resolve_bracing(cfg);
    cfg.validate();
    const bfcr::Series series = bfcr::read_csv_file(opt.input, opt.column);
    const auto report = bfcr::detect_internal(series, cfg.detection(), cfg.trend, bracing);
    write_output(opt.output, [&](std::ostream& out) { out << bfcr::to_json(report).dump(2) << '\n'; });
}

void cmd_detect_edge(const Options& opt) {
    bfcr::RunConfig cfg = resolve_config(opt);
    const bfcr::BracingSet bracing = resolve_bracing(cfg);
    cfg.validate();
    const bfcr::Series series = bfcr::read_csv_file(opt.input, opt.column);
    const auto report = opt.first ? bfcr::detect_edge_first(series, cfg.detection(), cfg.trend, bracing)
                                  : bfcr::detect_edge_last(series, cfg.detection(), cfg.trend, bracing);
    write_output(opt.output, [&](std::ostream& out) { out << bfcr::to_json(report).dump(2) << '\n'; });
}

void cmd_plotdata(const Options& opt) {
    bfcr::RunConfig cfg = resolve_config(opt);
    const bfcr::BracingSet bracing = resolve_bracing(cfg);
    cfg.validate();
    const bfcr::Series series = bfcr::read_csv_file(opt.input, opt.column);
    const bfcr::TrendLine trend = bfcr::bfcr_trend(series, cfg.trend, bracing);
    const bfcr::ExtendedSeries ext = bfcr::brace_extend(series, bracing);
    std::optional<bfcr::AnomalyReport> report;
    if (series.size() >= cfg.detect.min_points) {
        report = bfcr::detect_internal(series, cfg.detection(), cfg.trend, bracing);
    }

    const auto n = static_cast<long long>(series.size());
    const auto d = static_cast<long long>(ext.d);
    write_output(opt.output, [&](std::ostream& out) {
        auto row = [&](const char* segment, long long index, double value) {
            out << segment << ',' << index << ',' << bfcr::detail::format_double(value) << '\n';
        };
        out << "segment,index,value\n";
        for (long long i = 0; i < n; ++i) row("data", i + 1, series[static_cast<std::size_t>(i)]);
        for (long long i = 0; i < n; ++i) row("trend", i + 1, trend[static_cast<std::size_t>(i)]);
        const auto left = ext.left_brace();
        for (long long j = 0; j < d; ++j) row("brace_left", j - d + 1, left[static_cast<std::size_t>(j)]);
        const auto right = ext.right_brace();
        for (long long j = 0; j < d; ++j) row("brace_right", n + j + 1, right[static_cast<std::size_t>(j)]);
        const auto cont = ext.continuation();
        for (std::size_t j = 0; j < cont.size(); ++j) {
            row("continuation", n + d + static_cast<long long>(j) + 1, cont[j]);
        }
        if (report) {
            for (const auto& f : report->flagged) {
                row("flagged", static_cast<long long>(f.index) + 1, series[f.index]);
            }
        }
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Braced Fourier continuation regression: trends and anomaly detection for 1-D series"};
    app.require_subcommand(1);

    Options opt;

    auto* gen = app.add_subcommand("gen-bracing", "Precompute and save a bracing set");
    gen->add_option("-o,--output", opt.output, "Output path, '-' for stdout")->required();
    add_fc_options(gen, opt);

    auto* trend = app.add_subcommand("trend", "Write index,value,trend CSV");
    add_trend_options(trend, opt);

    auto* detect = app.add_subcommand("detect", "Internal anomaly detection (JSON report)");
    add_detect_options(detect, opt);

    auto* edge = app.add_subcommand("detect-edge", "Edge anomaly detection for the first or last point (JSON report)");
    add_detect_options(edge, opt);
    auto* first_flag = edge->add_flag("--first", opt.first, "Test the first point");
    edge->add_flag("--last", "Test the last point (default)")->excludes(first_flag);
    edge->add_flag("--screen-internal,!--no-screen-internal", opt.screen_internal,
                   "Exclude internal outliers from the population (default on)");
    edge->add_flag("--guards", opt.guards, "Skip detection on locally deterministic edges");

    auto* plot = app.add_subcommand("plotdata", "Long-form CSV of data, trend, braces, continuation and flags");
    add_detect_options(plot, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (gen->parsed()) cmd_gen_bracing(opt);
        else if (trend->parsed()) cmd_trend(opt);
        else if (detect->parsed()) cmd_detect(opt);
        else if (edge->parsed()) cmd_detect_edge(opt);
        else if (plot->parsed()) cmd_plotdata(opt);
    } catch (const bfcr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
