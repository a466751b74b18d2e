#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bfcr/error.hpp"
#include "bfcr/series.hpp"

namespace bfcr {

/// Continuation hyperparameters: brace length d, continuation length c_fc,
/// zero-matching count z, extra gap points e and oversampling factor n_over.
struct FcParams {
    int d = 12;
    int c_fc = 27;
    int z = 12;
    int e = 0;
    int n_over = 20;

    void validate() const {
        if (d < 2) throw Error(Errc::InvalidParams, "fc.d must be >= 2, got " + std::to_string(d));
        if (c_fc < 1) throw Error(Errc::InvalidParams, "fc.c_fc must be >= 1, got " + std::to_string(c_fc));
        if (z < 0) throw Error(Errc::InvalidParams, "fc.z must be >= 0, got " + std::to_string(z));
        if (e < 0) throw Error(Errc::InvalidParams, "fc.e must be >= 0, got " + std::to_string(e));
        if (n_over < 1) throw Error(Errc::InvalidParams, "fc.n_over must be >= 1, got " + std::to_string(n_over));
    }

    /// Points added around the data by brace_extend: 2d braces plus the continuation.
    std::size_t added_points() const noexcept { return static_cast<std::size_t>(2 * d + c_fc); }

    /// Period of the trigonometric bridge fit.
    int bridge_period() const noexcept { return 2 * d + c_fc + 2 * z + e; }

    friend bool operator==(const FcParams&, const FcParams&) = default;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;

    constexpr double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Least-squares line through (0, y0), (1, y1), (2, y2).
constexpr LineFit fit_line3(double y0, double y1, double y2) noexcept {
    const double slope = (y2 - y0) / 2.0;
    return {slope, (y0 + y1 + y2) / 3.0 - slope};
}

/// One-step projection past (x[N-3], x[N-2], x[N-1], x[N]) sitting at abscissae 0..3:
/// the average of the 3-point fits over {1,2,3} and {0,1,2}, both evaluated at 4.
constexpr double right_scaling_point(std::span<const double, 4> last4) noexcept {
    const LineFit near = fit_line3(last4[1], last4[2], last4[3]);  // shifted: local 0..2 is global 1..3
    const LineFit far = fit_line3(last4[0], last4[1], last4[2]);
    const double r1 = near(3.0);
    const double r2 = far(4.0);
    return (r1 + r2) / 2.0;
}

/// Mirror of right_scaling_point over (x1, x2, x3, x4) enumerated in reverse.
constexpr double left_scaling_point(std::span<const double, 4> first4) noexcept {
    const std::array<double, 4> reversed{first4[3], first4[2], first4[1], first4[0]};
    return right_scaling_point(reversed);
}

struct ScalingPoints {
    double lsp = 0.0;
    double rsp = 0.0;

    /// Level the braces decay to between the two ends.
    double baseline() const noexcept { return 0.5 * (lsp + rsp); }
};

inline ScalingPoints scaling_points(std::span<const double> values) {
    detail::require_min_points(values.size(), 4, "brace extension");
    return {left_scaling_point(values.first<4>()), right_scaling_point(values.last<4>())};
}

/// Unit brace shapes: `left` ends at exactly 1, `right` starts at exactly 1.
struct BraceShapes {
    std::vector<double> left;
    std::vector<double> right;
};

/// Raised-cosine ramps: left rises 0 -> 1, right falls 1 -> 0, both with zero end slope.
inline BraceShapes default_brace_shape(int d) {
    if (d < 2) throw Error(Errc::InvalidParams, "brace length d must be >= 2, got " + std::to_string(d));
    BraceShapes shapes{std::vector<double>(static_cast<std::size_t>(d)), std::vector<double>(static_cast<std::size_t>(d))};
    for (int j = 0; j < d; ++j) {
        const double c = std::cos(std::numbers::pi * j / (d - 1));
        shapes.left[static_cast<std::size_t>(j)] = 0.5 * (1.0 - c);
        shapes.right[static_cast<std::size_t>(j)] = 0.5 * (1.0 + c);
    }
    shapes.left.back() = 1.0;
    shapes.right.front() = 1.0;
    return shapes;
}

namespace detail {

// Cubic Hermite interpolant of unit-spaced samples, finite-difference tangents.
inline double hermite_sample(std::span<const double> y, double t) {
    const std::size_t n = y.size();
    if (n == 1) return y[0];
    auto tangent = [&](std::size_t i) {
        if (n == 2) return y[1] - y[0];
        if (i == 0) return y[1] - y[0];
        if (i == n - 1) return y[n - 1] - y[n - 2];
        return 0.5 * (y[i + 1] - y[i - 1]);
    };
    t = std::clamp(t, 0.0, static_cast<double>(n - 1));
    const auto i = std::min(static_cast<std::size_t>(t), n - 2);
    const double u = t - static_cast<double>(i);
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y[i] + (u3 - 2 * u2 + u) * tangent(i) + (-2 * u3 + 3 * u2) * y[i + 1] +
           (u3 - u2) * tangent(i + 1);
}

}  // namespace detail

/// Trigonometric polynomial c0 + sum_k (a_k cos(k w t) + b_k sin(k w t)), w = 2 pi / period.
struct BridgeFit {
    std::vector<double> coefficients;  // [c0, a1, b1, a2, b2, ...]
    double period = 1.0;

    double operator()(double t) const noexcept {
        const double w = 2.0 * std::numbers::pi / period;
        double v = coefficients[0];
        for (std::size_t k = 1; 2 * k <= coefficients.size() - 1; ++k) {
            v += coefficients[2 * k - 1] * std::cos(static_cast<double>(k) * w * t) +
                 coefficients[2 * k] * std::sin(static_cast<double>(k) * w * t);
        }
        return v;
    }
};

/// Least-squares trigonometric fit across the bridge that joins the right
/// brace (grid 0..d-1) through c_fc unknowns to the left brace
/// (grid d+c_fc..2d+c_fc-1). The period adds a free gap of 2z+e points on
/// the data side. min(z, c_fc) bridge points next to each block are matched
/// to zero. Every matched region is sampled n_over times per unit and the
/// system is solved by SVD truncated at 1e-10 of the largest singular value.
/// Linear in (left_block, right_block).
inline BridgeFit fit_bridge(std::span<const double> left_block, std::span<const double> right_block,
                            const FcParams& params) {
    params.validate();
    const auto d = static_cast<std::size_t>(params.d);
    if (left_block.size() != d || right_block.size() != d) {
        throw Error(Errc::ShapeError, "brace blocks must have exactly d = " + std::to_string(d) + " points");
    }
    const double period = params.bridge_period();
    const int harmonics = (2 * params.d - 1) / 2;
    const int terms = 1 + 2 * harmonics;
    const int n_over = params.n_over;

    std::vector<double> ts;
    std::vector<double> vs;
    auto add_region = [&](double origin, std::size_t count, auto&& value_at) {
        if (count == 0) return;
        const std::size_t steps = (count - 1) * static_cast<std::size_t>(n_over);
        for (std::size_t s = 0; s <= steps; ++s) {
            const double local = static_cast<double>(s) / n_over;
            ts.push_back(origin + local);
            vs.push_back(value_at(local));
        }
    };
    const double left_origin = static_cast<double>(d + static_cast<std::size_t>(params.c_fc));
    add_region(0.0, d, [&](double t) { return detail::hermite_sample(right_block, t); });
    add_region(left_origin, d, [&](double t) { return detail::hermite_sample(left_block, t); });
    const auto zero_count = static_cast<std::size_t>(std::min(params.z, params.c_fc));
    add_region(static_cast<double>(d), zero_count, [](double) { return 0.0; });
    add_region(left_origin - static_cast<double>(zero_count), zero_count, [](double) { return 0.0; });

    const double w = 2.0 * std::numbers::pi / period;
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(ts.size()), terms);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(ts.size()));
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
        const double t = ts[static_cast<std::size_t>(r)];
        basis(r, 0) = 1.0;
        for (int k = 1; k <= harmonics; ++k) {
            basis(r, 2 * k - 1) = std::cos(k * w * t);
            basis(r, 2 * k) = std::sin(k * w * t);
        }
        rhs(r) = vs[static_cast<std::size_t>(r)];
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::VectorXd projected = svd.matrixU().transpose() * rhs;
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(sv.size());
    const double cutoff = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) scaled(i) = projected(i) / sv(i);
    }
    const Eigen::VectorXd coeffs = svd.matrixV() * scaled;

    BridgeFit fit;
    fit.period = period;
    fit.coefficients.assign(coeffs.data(), coeffs.data() + coeffs.size());
    return fit;
}

/// Continuation values at the c_fc bridge positions for the given brace blocks.
inline std::vector<double> continuation_response(std::span<const double> left_block,
                                                 std::span<const double> right_block, const FcParams& params) {
    const BridgeFit fit = fit_bridge(left_block, right_block, params);
    std::vector<double> out(static_cast<std::size_t>(params.c_fc));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = fit(static_cast<double>(params.d) + static_cast<double>(j));
    return out;
}

/// Precomputed unit braces and their continuation responses. Immutable.
class BracingSet {
public:
    /// Validating constructor used by loaders; see build_bracing_set for normal use.
    static BracingSet from_parts(FcParams params, std::vector<double> left_unit, std::vector<double> right_unit,
                                 std::vector<double> cont_from_left, std::vector<double> cont_from_right) {
        params.validate();
        const auto d = static_cast<std::size_t>(params.d);
        const auto c = static_cast<std::size_t>(params.c_fc);
        if (left_unit.size() != d || right_unit.size() != d) {
            throw Error(Errc::ShapeError, "unit braces must have d = " + std::to_string(d) + " points");
        }
        if (cont_from_left.size() != c || cont_from_right.size() != c) {
            throw Error(Errc::ShapeError, "continuation responses must have c_fc = " + std::to_string(c) + " points");
        }
        if (left_unit.back() != 1.0 || right_unit.front() != 1.0) {
            throw Error(Errc::ZeroAnchor, "unit braces must be anchored at exactly 1");
        }
        for (const auto* seq : {&left_unit, &right_unit}) {
            for (double v : *seq) {
                if (!std::isfinite(v)) throw Error(Errc::NonFiniteValue, "unit brace contains a non-finite value");
            }
        }
        for (const auto* seq : {&cont_from_left, &cont_from_right}) {
            for (double v : *seq) {
                if (!std::isfinite(v) || std::abs(v) > kBound) {
                    throw Error(Errc::ContinuationUnbounded,
                                "continuation response exceeds the bound " + std::to_string(kBound));
                }
            }
        }
        BracingSet set;
        set.params_ = params;
        set.left_unit_ = std::move(left_unit);
        set.right_unit_ = std::move(right_unit);
        set.cont_from_left_ = std::move(cont_from_left);
        set.cont_from_right_ = std::move(cont_from_right);
        return set;
    }

    /// Maximum magnitude allowed for a unit continuation response.
    static constexpr double kBound = 10.0;

    const FcParams& params() const noexcept { return params_; }
    std::span<const double> left_unit() const noexcept { return left_unit_; }
    std::span<const double> right_unit() const noexcept { return right_unit_; }
    std::span<const double> cont_from_left() const noexcept { return cont_from_left_; }
    std::span<const double> cont_from_right() const noexcept { return cont_from_right_; }

    friend bool operator==(const BracingSet&, const BracingSet&) = default;

private:
    BracingSet() = default;

    FcParams params_;
    std::vector<double> left_unit_;
    std::vector<double> right_unit_;
    std::vector<double> cont_from_left_;
    std::vector<double> cont_from_right_;
};

/// Runs the continuation solve once per unit brace. Shapes are normalized by
/// their anchors (left last, right first); a zero anchor is rejected.
inline BracingSet build_bracing_set(const FcParams& params, const std::optional<BraceShapes>& shapes = std::nullopt) {
    params.validate();
    BraceShapes unit = shapes ? *shapes : default_brace_shape(params.d);
    const auto d = static_cast<std::size_t>(params.d);
    if (unit.left.size() != d || unit.right.size() != d) {
        throw Error(Errc::ShapeError, "brace shapes must have d = " + std::to_string(d) + " points");
    }
    const double left_anchor = unit.left.back();
    const double right_anchor = unit.right.front();
    if (left_anchor == 0.0 || right_anchor == 0.0) {
        throw Error(Errc::ZeroAnchor, "brace shape anchor is zero");
    }
    for (double& v : unit.left) v /= left_anchor;
    for (double& v : unit.right) v /= right_anchor;

    const std::vector<double> zeros(d, 0.0);
    auto from_left = continuation_response(unit.left, zeros, params);
    auto from_right = continuation_response(zeros, unit.right, params);
    return BracingSet::from_parts(params, std::move(unit.left), std::move(unit.right), std::move(from_left),
                                  std::move(from_right));
}

/// One full period of the bridge for brace multipliers (lambda_left, lambda_right):
/// [right brace | continuation | left brace | fitted gap], length bridge_period().
inline std::vector<double> periodic_bridge(const BracingSet& bracing, double lambda_left, double lambda_right) {
    const FcParams& p = bracing.params();
    std::vector<double> left(bracing.left_unit().begin(), bracing.left_unit().end());
    std::vector<double> right(bracing.right_unit().begin(), bracing.right_unit().end());
    for (double& v : left) v *= lambda_left;
    for (double& v : right) v *= lambda_right;
    const BridgeFit fit = fit_bridge(left, right, p);

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(p.bridge_period()));
    out.insert(out.end(), right.begin(), right.end());
    for (std::size_t j = 0; j < static_cast<std::size_t>(p.c_fc); ++j) {
        out.push_back(lambda_left * bracing.cont_from_left()[j] + lambda_right * bracing.cont_from_right()[j]);
    }
    out.insert(out.end(), left.begin(), left.end());
    for (int t = 2 * p.d + p.c_fc; t < p.bridge_period(); ++t) out.push_back(fit(t));
    return out;
}

/// Periodic extension [S1 (d) | X (N) | S2 (d) | continuation (c_fc)].
struct ExtendedSeries {
    std::vector<double> values;
    std::size_t n_original = 0;
    std::size_t d = 0;
    std::size_t c_fc = 0;
    ScalingPoints scaling;

    std::span<const double> left_brace() const noexcept { return std::span(values).first(d); }
    std::span<const double> original() const noexcept { return std::span(values).subspan(d, n_original); }
    std::span<const double> right_brace() const noexcept { return std::span(values).subspan(d + n_original, d); }
    std::span<const double> continuation() const noexcept { return std::span(values).last(c_fc); }
};

/// Braces scaled about the baseline b = (LSP + RSP) / 2 so that S1 ends at LSP
/// and S2 starts at RSP; the continuation is the matching combination of the
/// precomputed unit responses. A constant series extends to a constant.
inline ExtendedSeries brace_extend(std::span<const double> values, const BracingSet& bracing) {
    const ScalingPoints sp = scaling_points(values);
    const double base = sp.baseline();
    const double lambda_left = sp.lsp - base;
    const double lambda_right = sp.rsp - base;

    ExtendedSeries ext;
    ext.n_original = values.size();
    ext.d = static_cast<std::size_t>(bracing.params().d);
    ext.c_fc = static_cast<std::size_t>(bracing.params().c_fc);
    ext.scaling = sp;
    ext.values.reserve(ext.n_original + 2 * ext.d + ext.c_fc);
    for (double u : bracing.left_unit()) ext.values.push_back(base + lambda_left * u);
    ext.values.insert(ext.values.end(), values.begin(), values.end());
    for (double u : bracing.right_unit()) ext.values.push_back(base + lambda_right * u);
    for (std::size_t j = 0; j < ext.c_fc; ++j) {
        ext.values.push_back(base + lambda_left * bracing.cont_from_left()[j] +
                             lambda_right * bracing.cont_from_right()[j]);
    }
    // Anchors hit the scaling points exactly, not base + (lsp - base).
    ext.values[ext.d - 1] = sp.lsp;
    ext.values[ext.d + ext.n_original] = sp.rsp;
    return ext;
}

inline ExtendedSeries brace_extend(const Series& series, const BracingSet& bracing) {
    return brace_extend(series.values(), bracing);
}

// --- persistence -----------------------------------------------------------
//
//   bfcr-bracing 1
//   params d=12 c_fc=27 z=12 e=0 n_over=20
//   left_unit 12
//   <one value per line, 17 significant digits>
//   right_unit 12
//   ...
//   cont_from_left 27
//   ...
//   cont_from_right 27
//   ...

inline void save_bracing(std::ostream& out, const BracingSet& bracing) {
    const FcParams& p = bracing.params();
    out << "bfcr-bracing 1\n";
    out << "params d=" << p.d << " c_fc=" << p.c_fc << " z=" << p.z << " e=" << p.e << " n_over=" << p.n_over << '\n';
    auto block = [&](const char* label, std::span<const double> values) {
        out << label << ' ' << values.size() << '\n';
        for (double v : values) out << detail::format_double(v) << '\n';
    };
    block("left_unit", bracing.left_unit());
    block("right_unit", bracing.right_unit());
    block("cont_from_left", bracing.cont_from_left());
    block("cont_from_right", bracing.cont_from_right());
}

inline BracingSet load_bracing(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> std::string_view {
        while (std::getline(in, line)) {
            ++line_no;
            const auto t = detail::trim(line);
            if (!t.empty() && t.front() != '#') return t;
        }
        throw Error(Errc::ParseError, "unexpected end of bracing file after line " + std::to_string(line_no), line_no);
    };
    auto fail = [&](const std::string& what) {
        return Error(Errc::ParseError, "bracing file line " + std::to_string(line_no) + ": " + what, line_no);
    };

    if (next_line() != "bfcr-bracing 1") throw fail("expected header 'bfcr-bracing 1'");

    FcParams params;
    {
        std::istringstream is{std::string(next_line())};
        std::string word;
        is >> word;
        if (word != "params") throw fail("expected 'params'");
        int seen = 0;
        while (is >> word) {
            const auto eq = word.find('=');
            if (eq == std::string::npos) throw fail("malformed parameter '" + word + "'");
            const std::string key = word.substr(0, eq);
            int value = 0;
            const auto text = std::string_view(word).substr(eq + 1);
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
            if (ec != std::errc() || ptr != text.data() + text.size()) throw fail("bad integer in '" + word + "'");
            if (key == "d") params.d = value;
            else if (key == "c_fc") params.c_fc = value;
            else if (key == "z") params.z = value;
            else if (key == "e") params.e = value;
            else if (key == "n_over") params.n_over = value;
            else throw fail("unknown parameter '" + key + "'");
            ++seen;
        }
        if (seen != 5) throw fail("params line must list d, c_fc, z, e and n_over");
    }

    auto read_block = [&](std::string_view label) {
        std::istringstream is{std::string(next_line())};
        std::string word;
        std::size_t count = 0;
        if (!(is >> word >> count) || word != label) throw fail("expected block '" + std::string(label) + " <count>'");
        std::vector<double> values(count);
        for (auto& v : values) {
            const auto parsed = detail::parse_double(next_line());
            if (!parsed) throw fail("not a number");
            v = *parsed;
        }
        return values;
    };
    auto left = read_block("left_unit");
    auto right = read_block("right_unit");
    auto from_left = read_block("cont_from_left");
    auto from_right = read_block("cont_from_right");
    return BracingSet::from_parts(params, std::move(left), std::move(right), std::move(from_left),
                                  std::move(from_right));
}

inline void save_bracing_file(const std::string& path, const BracingSet& bracing) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write '" + path + "'");
    save_bracing(out, bracing);
    if (!out) throw Error(Errc::Io, "write to '" + path + "' failed");
}

inline BracingSet load_bracing_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
    return load_bracing(in);
}

}  // namespace bfcr
