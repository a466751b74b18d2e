#pragma once

// Braced Fourier continuation regression: trend extraction and anomaly detection.

#include "bfcr/anomaly.hpp"
#include "bfcr/bracing.hpp"
#include "bfcr/error.hpp"
#include "bfcr/series.hpp"
#include "bfcr/spectral.hpp"
#include "bfcr/trend.hpp"
