#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace selfboost {

/// Dense n-dimensional float64 array, row-major.
///
/// Shapes are small (rank <= 3 in practice) and the buffer is a plain
/// std::vector, so tensors have value semantics: copy to snapshot, move to
/// hand off.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        data_.assign(static_cast<std::size_t>(count(shape_)), 0.0);
    }

    Tensor(std::vector<int> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        assert(static_cast<std::size_t>(count(shape_)) == data_.size());
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    int size() const { return static_cast<int>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& buffer() { return data_; }
    const std::vector<double>& buffer() const { return data_; }

    double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

    double& at(int i) {
        assert(rank() == 1);
        return data_[static_cast<std::size_t>(i)];
    }
    double at(int i) const {
        assert(rank() == 1);
        return data_[static_cast<std::size_t>(i)];
    }
    double& at(int i, int j) {
        assert(rank() == 2);
        return data_[static_cast<std::size_t>(i) * shape_[1] + j];
    }
    double at(int i, int j) const {
        assert(rank() == 2);
        return data_[static_cast<std::size_t>(i) * shape_[1] + j];
    }
    double& at(int i, int j, int k) {
        assert(rank() == 3);
        return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
    }
    double at(int i, int j, int k) const {
        assert(rank() == 3);
        return data_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    bool all_finite() const;

    void fill(double v) { data_.assign(data_.size(), v); }

    static long long count(const std::vector<int>& shape) {
        long long n = 1;
        for (int d : shape) n *= d;
        return n;
    }

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

}  // namespace selfboost
