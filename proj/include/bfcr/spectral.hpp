#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "bfcr/error.hpp"

namespace bfcr {

/// Full DFT spectrum in standard bin order (bin 0 is the sum, bins k and M-k pair up).
struct Spectrum {
    std::vector<std::complex<double>> bins;

    std::size_t size() const noexcept { return bins.size(); }
};

/// Sigma-approximation low-pass: Lanczos factors sinc(k/M)^power below the
/// cutoff bin M = max(2, ceil(cutoff_fraction * floor(M_total/2))), zero above.
struct FilterSpec {
    double cutoff_fraction = 0.2;
    int power = 4;

    void validate() const {
        if (!(cutoff_fraction > 0.0 && cutoff_fraction <= 1.0)) {
            throw Error(Errc::InvalidParams, "filter cutoff_fraction must lie in (0, 1]");
        }
        if (power < 1) {
            throw Error(Errc::InvalidParams, "filter power must be a positive integer");
        }
    }

    friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

namespace detail {

// FFTW's planner is not reentrant; execution on distinct buffers is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline FftwBuffer fftw_buffer(std::size_t n) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (p == nullptr) throw std::bad_alloc();
    return FftwBuffer(p);
}

// Plans are kept for the life of the process, one per (length, direction).
// FFTW_ESTIMATE planning is deterministic and fftw_malloc buffers share the
// alignment the plan was made for, so fftw_execute_dft on fresh buffers is safe.
inline fftw_plan cached_plan(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
    std::lock_guard lock(fftw_planner_mutex());
    auto& plan = plans[{n, sign}];
    if (plan == nullptr) {
        auto in = fftw_buffer(n);
        auto out = fftw_buffer(n);
        plan = fftw_plan_dft_1d(static_cast<int>(n), in.get(), out.get(), sign, FFTW_ESTIMATE);
        if (plan == nullptr) {
            throw Error(Errc::NumericalFailure, "FFTW failed to create a plan of length " + std::to_string(n));
        }
    }
    return plan;
}

// Unnormalized complex transform; sign = FFTW_FORWARD or FFTW_BACKWARD.
// Buffers always come from fftw_malloc so the chosen plan (and therefore the
// result bits) does not depend on the caller's allocation alignment.
inline std::vector<std::complex<double>> fftw_c2c(std::span<const std::complex<double>> input, int sign) {
    const std::size_t n = input.size();
    auto in = fftw_buffer(n);
    auto out = fftw_buffer(n);
    for (std::size_t i = 0; i < n; ++i) {
        in[i][0] = input[i].real();
        in[i][1] = input[i].imag();
    }
    fftw_execute_dft(cached_plan(n, sign), in.get(), out.get());
    std::vector<std::complex<double>> result(n);
    for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
    return result;
}

}  // namespace detail

/// X[k] = sum_j x[j] exp(-2 pi i jk / M).
inline Spectrum dft(std::span<const double> values) {
    if (values.empty()) {
        throw Error(Errc::ShapeError, "dft of an empty sequence");
    }
    std::vector<std::complex<double>> in(values.begin(), values.end());
    return Spectrum{detail::fftw_c2c(in, FFTW_FORWARD)};
}

/// Inverse of dft (1/M normalization). The spectrum must be conjugate
/// symmetric to 1e-6 relative; the imaginary residue of the result is dropped.
inline std::vector<double> idft(const Spectrum& spectrum) {
    const std::size_t m = spectrum.size();
    if (m == 0) {
        throw Error(Errc::ShapeError, "idft of an empty spectrum");
    }
    double peak = 0.0;
    double asym = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        peak = std::max(peak, std::abs(spectrum.bins[k]));
        asym = std::max(asym, std::abs(spectrum.bins[(m - k) % m] - std::conj(spectrum.bins[k])));
    }
    if (asym > 1e-6 * peak) {
        throw Error(Errc::NonRealSignal, "spectrum is not conjugate symmetric (relative asymmetry " +
                                             std::to_string(peak > 0 ? asym / peak : asym) + ")");
    }
    const auto time = detail::fftw_c2c(spectrum.bins, FFTW_BACKWARD);
    std::vector<double> out(m);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = time[i].real() * scale;
    return out;
}

/// Cutoff bin M for a transform of length m_total.
inline std::size_t sigma_cutoff(std::size_t m_total, const FilterSpec& spec) {
    const auto half = static_cast<double>(m_total / 2);
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(spec.cutoff_fraction * half)));
}

/// Per-bin weights, mirrored so w[m_total - k] == w[k].
inline std::vector<double> sigma_weights(std::size_t m_total, const FilterSpec& spec) {
    spec.validate();
    if (m_total < 2) {
        throw Error(Errc::InvalidParams, "sigma_weights needs a transform length of at least 2");
    }
    const std::size_t cutoff = sigma_cutoff(m_total, spec);
    std::vector<double> w(m_total, 0.0);
    w[0] = 1.0;
    for (std::size_t k = 1; k <= m_total / 2; ++k) {
        double value = 0.0;
        if (k < cutoff) {
            const double arg = std::numbers::pi * static_cast<double>(k) / static_cast<double>(cutoff);
            value = std::pow(std::sin(arg) / arg, spec.power);
        }
        w[k] = value;
        w[m_total - k] = value;
    }
    return w;
}

inline Spectrum lowpass(const Spectrum& spectrum, std::span<const double> weights) {
    if (weights.size() != spectrum.size()) {
        throw Error(Errc::ShapeError, "filter has " + std::to_string(weights.size()) + " weights for a spectrum of " +
                                          std::to_string(spectrum.size()) + " bins");
    }
    Spectrum out = spectrum;
    for (std::size_t k = 0; k < out.size(); ++k) out.bins[k] *= weights[k];
    return out;
}

}  // namespace bfcr
