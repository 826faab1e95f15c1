#pragma once

#include <cstdint>

#include "selfboost/time_series.hpp"

namespace selfboost {

/// Deterministic benchmark signals. The acceptance and example runs use
/// these instead of bundled datasets.

/// sin(2*pi*t/8) + 0.5*sin(2*pi*t/64) + slope*t
TimeSeries synth_two_tone_trend(int length, double slope = 0.01);

/// Two tones plus a mild trend plus seeded Gaussian noise. The default slope
/// is gentler than the noiseless variant so the test segment stays inside
/// the training value range (bounded recurrent features cannot extrapolate
/// an ever-growing trend).
TimeSeries synth_two_tone_trend_noise(int length, std::uint64_t seed, double slope = 0.002,
                                      double noise_std = 0.1);

/// y_t = phi * y_{t-1} + eps, eps ~ N(0, noise_std^2), y_0 = 0.
TimeSeries synth_ar1(int length, std::uint64_t seed, double phi = 0.9, double noise_std = 0.1);

/// y_t = y_{t-1} + eps, eps ~ N(0, step_std^2).
TimeSeries synth_random_walk(int length, std::uint64_t seed, double step_std = 1.0);

}  // namespace selfboost
