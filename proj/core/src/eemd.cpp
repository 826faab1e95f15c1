#include "selfboost/eemd.hpp"

#include <algorithm>
#include <cmath>

#include "selfboost/error.hpp"
#include "selfboost/rng.hpp"

namespace selfboost {

void DecompositionConfig::validate() const {
    if (ensemble_size < 1) throw Error(ErrorCode::ConfigInvalid, "ensemble_size must be >= 1");
    if (sd_threshold <= 0.0) throw Error(ErrorCode::ConfigInvalid, "sd_threshold must be > 0");
    if (noise_amplitude_ratio < 0.0)
        throw Error(ErrorCode::ConfigInvalid, "noise_amplitude_ratio must be >= 0");
    if (max_sift_iterations < 1)
        throw Error(ErrorCode::ConfigInvalid, "max_sift_iterations must be >= 1");
    if (max_imfs < 1) throw Error(ErrorCode::ConfigInvalid, "max_imfs must be >= 1");
}

const TimeSeries& ImfSet::component(int index) const {
    const int n_imfs = static_cast<int>(imfs.size());
    if (index < n_imfs) return imfs[static_cast<std::size_t>(index)];
    return residual;
}

std::pair<std::vector<Extremum>, std::vector<Extremum>> find_extrema(const TimeSeries& series) {
    const auto& v = series.values();
    const int n = series.length();
    if (n < 3) {
        throw Error(ErrorCode::InsufficientLength, "find_extrema: need at least 3 samples");
    }
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;
    int i = 1;
    while (i < n - 1) {
        // [i, run_end] is a flat run of equal values
        int run_end = i;
        while (run_end + 1 < n - 1 && v[static_cast<std::size_t>(run_end + 1)] == v[static_cast<std::size_t>(i)]) {
            ++run_end;
        }
        const double left = v[static_cast<std::size_t>(i - 1)];
        const double here = v[static_cast<std::size_t>(i)];
        const double right = v[static_cast<std::size_t>(run_end + 1)];
        if (left != here) {  // runs starting at the value of their left neighbor are not extrema
            if (here > left && here > right) maxima.push_back({i, here});
            if (here < left && here < right) minima.push_back({i, here});
        }
        i = run_end + 1;
    }
    return {std::move(maxima), std::move(minima)};
}

int count_zero_crossings(const std::vector<double>& values) {
    int crossings = 0;
    int prev_sign = 0;
    for (double v : values) {
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) ++crossings;
        prev_sign = s;
    }
    return crossings;
}

namespace {

struct Knot {
    double x;
    double y;
};

/// Natural cubic spline through sorted distinct knots; linear extrapolation
/// with the end slopes outside the knot range.
class CubicSpline {
public:
    explicit CubicSpline(std::vector<Knot> knots) : knots_(std::move(knots)) {
        const int n = static_cast<int>(knots_.size());
        m_.assign(static_cast<std::size_t>(n), 0.0);
        if (n < 3) return;

        // Thomas algorithm for the interior second derivatives.
        const int m = n - 2;
        std::vector<double> diag(static_cast<std::size_t>(m));
        std::vector<double> off(static_cast<std::size_t>(m > 0 ? m - 1 : 0));
        std::vector<double> rhs(static_cast<std::size_t>(m));
        for (int i = 1; i <= m; ++i) {
            const double h0 = knots_[static_cast<std::size_t>(i)].x - knots_[static_cast<std::size_t>(i - 1)].x;
            const double h1 = knots_[static_cast<std::size_t>(i + 1)].x - knots_[static_cast<std::size_t>(i)].x;
            diag[static_cast<std::size_t>(i - 1)] = 2.0 * (h0 + h1);
            if (i < m) off[static_cast<std::size_t>(i - 1)] = h1;
            const double d0 = (knots_[static_cast<std::size_t>(i)].y - knots_[static_cast<std::size_t>(i - 1)].y) / h0;
            const double d1 = (knots_[static_cast<std::size_t>(i + 1)].y - knots_[static_cast<std::size_t>(i)].y) / h1;
            rhs[static_cast<std::size_t>(i - 1)] = 6.0 * (d1 - d0);
        }
        for (int i = 1; i < m; ++i) {
            const double w = off[static_cast<std::size_t>(i - 1)] / diag[static_cast<std::size_t>(i - 1)];
            diag[static_cast<std::size_t>(i)] -= w * off[static_cast<std::size_t>(i - 1)];
            rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
        }
        for (int i = m - 1; i >= 0; --i) {
            double acc = rhs[static_cast<std::size_t>(i)];
            if (i + 1 < m) acc -= off[static_cast<std::size_t>(i)] * m_[static_cast<std::size_t>(i + 2)];
            m_[static_cast<std::size_t>(i + 1)] = acc / diag[static_cast<std::size_t>(i)];
        }
    }

    double eval(double x) const {
        const int n = static_cast<int>(knots_.size());
        if (n == 1) return knots_[0].y;
        if (x <= knots_[0].x) {
            return knots_[0].y + end_slope_left() * (x - knots_[0].x);
        }
        if (x >= knots_[static_cast<std::size_t>(n - 1)].x) {
            return knots_[static_cast<std::size_t>(n - 1)].y +
                   end_slope_right() * (x - knots_[static_cast<std::size_t>(n - 1)].x);
        }
        // binary search for the segment with knots_[k].x <= x < knots_[k+1].x
        int lo = 0;
        int hi = n - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            if (knots_[static_cast<std::size_t>(mid)].x <= x) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double h = knots_[static_cast<std::size_t>(hi)].x - knots_[static_cast<std::size_t>(lo)].x;
        const double a = (knots_[static_cast<std::size_t>(hi)].x - x) / h;
        const double b = (x - knots_[static_cast<std::size_t>(lo)].x) / h;
        return a * knots_[static_cast<std::size_t>(lo)].y + b * knots_[static_cast<std::size_t>(hi)].y +
               ((a * a * a - a) * m_[static_cast<std::size_t>(lo)] +
                (b * b * b - b) * m_[static_cast<std::size_t>(hi)]) *
                   h * h / 6.0;
    }

private:
    double end_slope_left() const {
        const double h = knots_[1].x - knots_[0].x;
        return (knots_[1].y - knots_[0].y) / h - h * m_[1] / 6.0;
    }
    double end_slope_right() const {
        const int n = static_cast<int>(knots_.size());
        const double h = knots_[static_cast<std::size_t>(n - 1)].x - knots_[static_cast<std::size_t>(n - 2)].x;
        return (knots_[static_cast<std::size_t>(n - 1)].y - knots_[static_cast<std::size_t>(n - 2)].y) / h +
               h * m_[static_cast<std::size_t>(n - 2)] / 6.0;
    }

    std::vector<Knot> knots_;
    std::vector<double> m_;  // second derivatives, natural ends = 0
};

/// Mirror the (up to) two extrema nearest each endpoint across it, dropping
/// reflections that collide with an existing knot x.
std::vector<Knot> mirror_extend(const std::vector<Extremum>& extrema, int length) {
    std::vector<Knot> knots;
    knots.reserve(extrema.size() + 4);
    for (const auto& e : extrema) knots.push_back({static_cast<double>(e.index), e.value});

    const double left_edge = 0.0;
    const double right_edge = static_cast<double>(length - 1);
    const int n = static_cast<int>(extrema.size());
    std::vector<Knot> extended;
    for (int k = 0; k < std::min(2, n); ++k) {
        extended.push_back({2.0 * left_edge - knots[static_cast<std::size_t>(k)].x,
                            knots[static_cast<std::size_t>(k)].y});
    }
    for (int k = 0; k < std::min(2, n); ++k) {
        extended.push_back({2.0 * right_edge - knots[static_cast<std::size_t>(n - 1 - k)].x,
                            knots[static_cast<std::size_t>(n - 1 - k)].y});
    }
    for (const auto& cand : extended) {
        bool collides = false;
        for (const auto& k : knots) {
            if (k.x == cand.x) {
                collides = true;
                break;
            }
        }
        if (!collides) knots.push_back(cand);
    }
    std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.x < b.x; });
    return knots;
}

bool is_monotone(const std::vector<double>& v) {
    bool nondec = true;
    bool noninc = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1]) nondec = false;
        if (v[i] > v[i - 1]) noninc = false;
    }
    return nondec || noninc;
}

std::vector<double> mean_envelope(const TimeSeries& h, const std::vector<Extremum>& maxima,
                                  const std::vector<Extremum>& minima) {
    const TimeSeries upper = envelope(h, maxima);
    const TimeSeries lower = envelope(h, minima);
    std::vector<double> mean(static_cast<std::size_t>(h.length()));
    for (int t = 0; t < h.length(); ++t) {
        mean[static_cast<std::size_t>(t)] = 0.5 * (upper[t] + lower[t]);
    }
    return mean;
}

}  // namespace

TimeSeries envelope(const TimeSeries& series, const std::vector<Extremum>& extrema) {
    if (extrema.empty()) {
        throw Error(ErrorCode::TooFewExtrema, "envelope: no extrema to interpolate");
    }
    const auto knots = mirror_extend(extrema, series.length());
    if (knots.size() < 2) {
        throw Error(ErrorCode::TooFewExtrema, "envelope: fewer than 2 knots after extension");
    }
    CubicSpline spline(knots);
    std::vector<double> values(static_cast<std::size_t>(series.length()));
    for (int t = 0; t < series.length(); ++t) {
        values[static_cast<std::size_t>(t)] = spline.eval(static_cast<double>(t));
    }
    return series.with_values(std::move(values));
}

double sift_sd(const std::vector<double>& prev, const std::vector<double>& next) {
    double sd = 0.0;
    for (std::size_t t = 0; t < prev.size(); ++t) {
        const double diff = prev[t] - next[t];
        sd += diff * diff / (prev[t] * prev[t] + 1e-12);
    }
    return sd;
}

SiftResult sift(const TimeSeries& series, const DecompositionConfig& config) {
    config.validate();
    auto [maxima, minima] = find_extrema(series);
    if (maxima.size() < 2 || minima.size() < 2) {
        throw Error(ErrorCode::NotEnoughExtrema, "sift: input needs >= 2 maxima and >= 2 minima");
    }

    std::vector<double> h = series.values();
    int count = 0;
    bool converged = false;
    while (count < config.max_sift_iterations) {
        const auto mean = mean_envelope(series.with_values(h), maxima, minima);
        std::vector<double> h_next(h.size());
        for (std::size_t t = 0; t < h.size(); ++t) h_next[t] = h[t] - mean[t];
        ++count;
        const double sd = sift_sd(h, h_next);
        h = std::move(h_next);
        if (sd < config.sd_threshold) {
            converged = true;
            break;
        }
        std::tie(maxima, minima) = find_extrema(series.with_values(h));
        if (maxima.size() < 2 || minima.size() < 2) break;  // cannot refine further
    }
    return {series.with_values(std::move(h)), count, converged};
}

ImfSet emd(const TimeSeries& series, const DecompositionConfig& config) {
    config.validate();
    if (series.length() < 8) {
        throw Error(ErrorCode::InsufficientLength, "emd: need at least 8 samples");
    }

    std::vector<TimeSeries> imfs;
    std::vector<double> sift_counts;
    std::vector<double> residual = series.values();

    while (static_cast<int>(imfs.size()) < config.max_imfs) {
        if (is_monotone(residual)) break;
        const TimeSeries res_series = series.with_values(residual);
        const auto [maxima, minima] = find_extrema(res_series);
        if (maxima.size() < 2 || minima.size() < 2) break;

        SiftResult s = sift(res_series, config);
        for (std::size_t t = 0; t < residual.size(); ++t) residual[t] -= s.imf[static_cast<int>(t)];
        imfs.push_back(s.imf.renamed("imf_" + std::to_string(imfs.size() + 1)));
        sift_counts.push_back(static_cast<double>(s.sift_count));
    }

    ImfSet out{std::move(imfs), series.with_values(std::move(residual)).renamed("residual"),
               series.length(), std::move(sift_counts)};
    return out;
}

ImfSet eemd(const TimeSeries& series, const DecompositionConfig& config) {
    config.validate();
    if (config.noise_amplitude_ratio == 0.0) {
        return emd(series, config);  // zero noise forces a single plain-EMD trial
    }

    const int n = series.length();
    const double noise_std = config.noise_amplitude_ratio * series.std_dev();
    // uniform[-a, a] has std a/sqrt(3)
    const double uniform_half_width = noise_std * std::sqrt(3.0);

    std::vector<std::vector<std::vector<double>>> trial_imfs;  // trial -> mode -> samples
    std::vector<std::vector<double>> trial_residuals;
    std::vector<std::vector<double>> trial_sift_counts;
    std::size_t max_modes = 0;

    for (int trial = 0; trial < config.ensemble_size; ++trial) {
        Rng rng(derive_seed(config.rng_seed, static_cast<std::uint64_t>(trial)));
        std::vector<double> noisy(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) {
            const double eps = config.noise == NoiseDistribution::Gaussian
                                   ? noise_std * rng.normal()
                                   : rng.uniform(-uniform_half_width, uniform_half_width);
            noisy[static_cast<std::size_t>(t)] = series[t] + eps;
        }
        ImfSet trial_set = emd(series.with_values(std::move(noisy)), config);
        std::vector<std::vector<double>> modes;
        modes.reserve(trial_set.imfs.size());
        for (auto& imf : trial_set.imfs) modes.push_back(imf.values());
        max_modes = std::max(max_modes, modes.size());
        trial_imfs.push_back(std::move(modes));
        trial_residuals.push_back(trial_set.residual.values());
        trial_sift_counts.push_back(trial_set.sift_counts);
    }

    const double inv_n = 1.0 / static_cast<double>(config.ensemble_size);
    std::vector<TimeSeries> imfs;
    std::vector<double> sift_counts;
    for (std::size_t j = 0; j < max_modes; ++j) {
        std::vector<double> avg(static_cast<std::size_t>(n), 0.0);
        double count_sum = 0.0;
        int count_trials = 0;
        for (int trial = 0; trial < config.ensemble_size; ++trial) {
            const auto& modes = trial_imfs[static_cast<std::size_t>(trial)];
            if (j < modes.size()) {
                const auto& mode = modes[j];
                for (int t = 0; t < n; ++t) avg[static_cast<std::size_t>(t)] += mode[static_cast<std::size_t>(t)];
                count_sum += trial_sift_counts[static_cast<std::size_t>(trial)][j];
                ++count_trials;
            }
            // absent trailing modes contribute zero
        }
        for (double& v : avg) v *= inv_n;
        imfs.push_back(series.with_values(std::move(avg)).renamed("imf_" + std::to_string(j + 1)));
        sift_counts.push_back(count_trials > 0 ? count_sum / count_trials : 0.0);
    }

    std::vector<double> avg_residual(static_cast<std::size_t>(n), 0.0);
    for (const auto& res : trial_residuals) {
        for (int t = 0; t < n; ++t) avg_residual[static_cast<std::size_t>(t)] += res[static_cast<std::size_t>(t)];
    }
    for (double& v : avg_residual) v *= inv_n;

    return {std::move(imfs), series.with_values(std::move(avg_residual)).renamed("residual"),
            n, std::move(sift_counts)};
}

}  // namespace selfboost
