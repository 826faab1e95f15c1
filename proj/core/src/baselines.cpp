#include "selfboost/baselines.hpp"

#include <cmath>

#include "selfboost/error.hpp"

namespace selfboost {

double ArModel::predict(const std::vector<double>& recent) const {
    if (static_cast<int>(recent.size()) < order) {
        throw Error(ErrorCode::ShapeMismatch, "ArModel::predict: too few samples");
    }
    double acc = intercept;
    const std::size_t n = recent.size();
    for (int i = 0; i < order; ++i) {
        acc += coefficients[static_cast<std::size_t>(i)] * recent[n - 1 - static_cast<std::size_t>(i)];
    }
    return acc;
}

Tensor persistence_forecast(const WindowedDataset& dataset) {
    if (dataset.task_channels.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "persistence_forecast: dataset has no tasks");
    }
    const int channel = dataset.task_channels.front();
    const int n = dataset.num_samples();
    Tensor out({n, dataset.horizon});
    for (int s = 0; s < n; ++s) {
        const double last = dataset.inputs.at(s, dataset.lag - 1, channel);
        for (int h = 0; h < dataset.horizon; ++h) out.at(s, h) = last;
    }
    return out;
}

namespace {

/// Solve the symmetric system A x = b by Gaussian elimination with partial
/// pivoting. Returns false when a pivot is (near-)zero.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    double max_entry = 0.0;
    for (const auto& rowv : a) {
        for (double v : rowv) max_entry = std::max(max_entry, std::abs(v));
    }
    const double tol = std::max(1e-12 * max_entry, 1e-300);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)])) {
                pivot = r;
            }
        }
        if (std::abs(a[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(col)]) < tol) {
            return false;
        }
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                             a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) {
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            }
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    x.assign(static_cast<std::size_t>(n), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) {
            acc -= a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] *
                   x[static_cast<std::size_t>(c)];
        }
        x[static_cast<std::size_t>(r)] = acc / a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace

ArModel fit_ar(const WindowedDataset& train, int order, int step) {
    if (order < 1 || order > train.lag) {
        throw Error(ErrorCode::ConfigInvalid, "fit_ar: order must lie in [1, lag]");
    }
    if (step < 1 || step > train.horizon) {
        throw Error(ErrorCode::ConfigInvalid, "fit_ar: step must lie in [1, horizon]");
    }
    if (train.task_channels.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "fit_ar: dataset has no tasks");
    }
    const int channel = train.task_channels.front();
    const int n = train.num_samples();
    const int dim = order + 1;  // intercept first

    // normal equations: (X^T X) beta = X^T y
    std::vector<std::vector<double>> xtx(static_cast<std::size_t>(dim),
                                         std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    std::vector<double> xty(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> row(static_cast<std::size_t>(dim), 1.0);
    for (int s = 0; s < n; ++s) {
        for (int i = 0; i < order; ++i) {
            row[static_cast<std::size_t>(1 + i)] = train.inputs.at(s, train.lag - 1 - i, channel);
        }
        const double y = train.targets.at(s, 0, step - 1);
        for (int a = 0; a < dim; ++a) {
            for (int b = 0; b <= a; ++b) {
                xtx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
            }
            xty[static_cast<std::size_t>(a)] += row[static_cast<std::size_t>(a)] * y;
        }
    }
    for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
            xtx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                xtx[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
        }
    }

    std::vector<double> beta;
    if (!solve_dense(xtx, xty, beta)) {
        // ridge fallback on the whole diagonal
        const double lambda = 1e-8;
        auto ridge = xtx;
        for (int a = 0; a < dim; ++a) ridge[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] += lambda;
        if (!solve_dense(ridge, xty, beta)) {
            throw Error(ErrorCode::SingularSystem, "fit_ar: normal equations singular even with ridge");
        }
    }

    ArModel model;
    model.order = order;
    model.intercept = beta[0];
    // beta[1+i] multiplies y_{t-i}; store as coefficients[i]
    model.coefficients.assign(beta.begin() + 1, beta.end());
    return model;
}

std::vector<ArModel> fit_ar_direct(const WindowedDataset& train, int order) {
    std::vector<ArModel> models;
    models.reserve(static_cast<std::size_t>(train.horizon));
    for (int h = 1; h <= train.horizon; ++h) models.push_back(fit_ar(train, order, h));
    return models;
}

Tensor ar_forecast(const WindowedDataset& dataset, const std::vector<ArModel>& models) {
    if (static_cast<int>(models.size()) != dataset.horizon) {
        throw Error(ErrorCode::ShapeMismatch, "ar_forecast: one model per horizon step required");
    }
    const int channel = dataset.task_channels.front();
    const int n = dataset.num_samples();
    Tensor out({n, dataset.horizon});
    std::vector<double> recent(static_cast<std::size_t>(dataset.lag));
    for (int s = 0; s < n; ++s) {
        for (int l = 0; l < dataset.lag; ++l) recent[static_cast<std::size_t>(l)] = dataset.inputs.at(s, l, channel);
        for (int h = 0; h < dataset.horizon; ++h) {
            out.at(s, h) = models[static_cast<std::size_t>(h)].predict(recent);
        }
    }
    return out;
}

Tensor main_task_actuals(const WindowedDataset& dataset) {
    const int n = dataset.num_samples();
    Tensor out({n, dataset.horizon});
    for (int s = 0; s < n; ++s) {
        for (int h = 0; h < dataset.horizon; ++h) out.at(s, h) = dataset.targets.at(s, 0, h);
    }
    return out;
}

}  // namespace selfboost
