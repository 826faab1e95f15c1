#include "selfboost/tensor.hpp"

#include <cmath>

namespace selfboost {

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace selfboost
