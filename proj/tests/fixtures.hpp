#pragma once

// Deterministic synthetic series shared by the unit and acceptance suites.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bfcr/series.hpp"

namespace fixtures {

inline std::vector<double> gaussian(std::size_t n, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

/// Smooth wave plus unit-scale gaussian noise.
inline std::vector<double> noisy_wave(std::size_t n, std::uint64_t seed, double noise = 1.0) {
    auto v = gaussian(n, noise, seed);
    for (std::size_t j = 0; j < n; ++j) {
        v[j] += 5.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n)) + 20.0;
    }
    return v;
}

/// Constant 10 with a single spike of 60 at 0-based index 4 (12 points).
inline bfcr::Series constant_with_spike() { return bfcr::Series{10, 10, 10, 10, 60, 10, 10, 10, 10, 10, 10, 10}; }

/// Noisy series of length 60 with an 8x noise-scale spike at index 30.
inline bfcr::Series spike_trial(std::uint64_t seed) {
    auto v = noisy_wave(60, seed);
    v[30] += 8.0;
    return bfcr::Series(std::move(v));
}

/// Noisy series (N=40) whose final point is displaced by 10x the noise scale.
inline bfcr::Series displaced_last(std::uint64_t seed = 11) {
    auto v = noisy_wave(40, seed);
    v.back() += 10.0;
    return bfcr::Series(std::move(v));
}

/// Mirror of displaced_last: the first point is displaced.
inline bfcr::Series displaced_first(std::uint64_t seed = 11) {
    auto v = noisy_wave(40, seed);
    v.front() += 10.0;
    return bfcr::Series(std::move(v));
}

/// Pre-existing internal outlier hiding a moderate edge outlier: slow drift
/// plus deterministic chirp noise, +30 at index 20 and +5 on the last point.
inline bfcr::Series internal_outlier_masks_edge() {
    std::vector<double> v(40);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double t = static_cast<double>(j);
        v[j] = 10.0 + 0.05 * t + std::sin(0.7 * t * t);
    }
    v[20] += 30.0;
    v.back() += 5.0;
    return bfcr::Series(std::move(v));
}

/// Noiseless fixtures at abscissae x = 1..n.
inline bfcr::Series noiseless_linear(std::size_t n = 40) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = static_cast<double>(j + 1);
    return bfcr::Series(std::move(v));
}

inline bfcr::Series noiseless_quadratic(std::size_t n = 40) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = static_cast<double>((j + 1) * (j + 1));
    return bfcr::Series(std::move(v));
}

inline bfcr::Series noiseless_exponential(std::size_t n = 40) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = std::exp(static_cast<double>(j + 1));
    return bfcr::Series(std::move(v));
}

/// Low-volatility half followed by a high-volatility half (10x noise).
inline bfcr::Series two_regime(std::size_t half = 50, std::uint64_t seed = 3) {
    auto low = gaussian(half, 0.2, seed);
    auto high = gaussian(half, 2.0, seed + 1);
    low.insert(low.end(), high.begin(), high.end());
    return bfcr::Series(std::move(low));
}

}  // namespace fixtures
