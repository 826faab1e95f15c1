#include "selfboost/synth.hpp"

#include <cmath>
#include <vector>

#include "selfboost/error.hpp"
#include "selfboost/rng.hpp"

namespace selfboost {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_length(int length) {
    if (length < 2) throw Error(ErrorCode::ConfigInvalid, "synthetic length must be >= 2");
}
}  // namespace

TimeSeries synth_two_tone_trend(int length, double slope) {
    check_length(length);
    std::vector<double> values(static_cast<std::size_t>(length));
    for (int t = 0; t < length; ++t) {
        values[static_cast<std::size_t>(t)] =
            std::sin(kTwoPi * t / 8.0) + 0.5 * std::sin(kTwoPi * t / 64.0) + slope * t;
    }
    return TimeSeries("two_tone_trend", std::move(values));
}

TimeSeries synth_two_tone_trend_noise(int length, std::uint64_t seed, double slope,
                                      double noise_std) {
    check_length(length);
    Rng rng(seed);
    std::vector<double> values(static_cast<std::size_t>(length));
    for (int t = 0; t < length; ++t) {
        values[static_cast<std::size_t>(t)] = std::sin(kTwoPi * t / 8.0) +
                                              0.5 * std::sin(kTwoPi * t / 64.0) + slope * t +
                                              noise_std * rng.normal();
    }
    return TimeSeries("two_tone_trend_noise", std::move(values));
}

TimeSeries synth_ar1(int length, std::uint64_t seed, double phi, double noise_std) {
    check_length(length);
    Rng rng(seed);
    std::vector<double> values(static_cast<std::size_t>(length));
    double y = 0.0;
    for (int t = 0; t < length; ++t) {
        y = phi * y + noise_std * rng.normal();
        values[static_cast<std::size_t>(t)] = y;
    }
    return TimeSeries("ar1", std::move(values));
}

TimeSeries synth_random_walk(int length, std::uint64_t seed, double step_std) {
    check_length(length);
    Rng rng(seed);
    std::vector<double> values(static_cast<std::size_t>(length));
    double y = 0.0;
    for (int t = 0; t < length; ++t) {
        y += step_std * rng.normal();
        values[static_cast<std::size_t>(t)] = y;
    }
    return TimeSeries("random_walk", std::move(values));
}

}  // namespace selfboost
