#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "selfboost/time_series.hpp"

namespace selfboost {

enum class NoiseDistribution { Gaussian, Uniform };

/// Knobs for EMD sifting and the noise ensemble.
struct DecompositionConfig {
    int ensemble_size = 100;            // N: number of noise-perturbed trials
    double noise_amplitude_ratio = 0.2; // noise std as a fraction of input std; 0 = plain EMD
    double sd_threshold = 0.2;          // sifting stop, typical range [0.2, 0.3]
    int max_sift_iterations = 50;
    int max_imfs = 16;
    std::uint64_t rng_seed = 0;
    NoiseDistribution noise = NoiseDistribution::Gaussian;

    void validate() const;
};

/// Ordered intrinsic mode functions (IMF_1 = highest frequency first) plus
/// the residual. For plain EMD the members telescope back to the input
/// exactly; for the ensemble average the reconstruction error is the
/// surviving mean noise.
struct ImfSet {
    std::vector<TimeSeries> imfs;
    TimeSeries residual;
    int source_length = 0;
    /// Mean sifting iterations per mode (exact counts for plain EMD,
    /// ensemble averages for EEMD). Diagnostic only.
    std::vector<double> sift_counts;

    int num_components() const { return static_cast<int>(imfs.size()) + 1; }
    /// Component view: IMFs in order, residual last.
    const TimeSeries& component(int index) const;
};

struct Extremum {
    int index;
    double value;
};

/// Interior local maxima/minima, index-sorted. A flat run counts as a single
/// extremum (at its first index) only when it is strictly above/below both
/// run neighbors. Endpoints are never extrema.
std::pair<std::vector<Extremum>, std::vector<Extremum>> find_extrema(const TimeSeries& series);

/// Count of strict sign changes; a run of exact zeros bounded by opposite
/// signs counts once.
int count_zero_crossings(const std::vector<double>& values);

/// Natural cubic spline through the mirror-extended extrema, evaluated at
/// every sample index 0..length-1. Throws TooFewExtrema when fewer than two
/// knots remain even after extension.
TimeSeries envelope(const TimeSeries& series, const std::vector<Extremum>& extrema);

/// Eq.-style sifting stop criterion between two consecutive candidates:
/// sum over t of |prev - next|^2 / (prev^2 + 1e-12).
double sift_sd(const std::vector<double>& prev, const std::vector<double>& next);

struct SiftResult {
    TimeSeries imf;
    int sift_count = 0;
    bool converged = false;  // stopped by SD threshold rather than the cap
};

/// Extract one IMF by repeated mean-envelope subtraction.
/// Throws NotEnoughExtrema when the input has fewer than 2 maxima or minima.
SiftResult sift(const TimeSeries& series, const DecompositionConfig& config);

/// Plain empirical mode decomposition: sift and subtract until the residual
/// is monotone or lacks 2 maxima / 2 minima, or max_imfs is reached.
ImfSet emd(const TimeSeries& series, const DecompositionConfig& config);

/// Ensemble EMD: average the decompositions of ensemble_size noise-perturbed
/// copies. Deterministic given rng_seed (per-trial streams derived by trial
/// index; fixed-order reduction). Trials with fewer modes than the ensemble
/// maximum are zero-padded in the trailing modes before averaging.
ImfSet eemd(const TimeSeries& series, const DecompositionConfig& config);

}  // namespace selfboost
