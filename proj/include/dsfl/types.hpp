#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsfl {

// Flat model parameter vector: the unit of aggregation and compression.
using ParamVector = std::vector<double>;

// Square grayscale image with pixels in [0, 1].
struct Image {
    int side = 0;
    std::vector<double> px;

    double at(int r, int c) const { return px[static_cast<std::size_t>(r) * side + c]; }
    double& at(int r, int c) { return px[static_cast<std::size_t>(r) * side + c]; }
};

// One data sample: image plus incident label (0 = background, 1 = fire).
struct Example {
    Image image;
    int label = 0;
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline void require_finite(const std::vector<double>& v, const char* what) {
    if (!all_finite(v)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace dsfl
