#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "recapit/model.hpp"

namespace recapit {

// T x M matrix of per-AOI values on a regular time grid. Row t covers
// [start + t*bin_width, start + (t+1)*bin_width), the last row clipped to the
// session end.
struct MultivariateSeries {
    double bin_width = 1.0;
    double start = 0.0;
    std::vector<std::string> aoi_ids;
    std::vector<double> values;  // row-major

    std::size_t rows() const noexcept { return aoi_ids.empty() ? 0 : values.size() / aoi_ids.size(); }
    std::size_t cols() const noexcept { return aoi_ids.size(); }
    double at(std::size_t t, std::size_t m) const { return values[t * cols() + m]; }
    double& at(std::size_t t, std::size_t m) { return values[t * cols() + m]; }

    friend bool operator==(const MultivariateSeries&, const MultivariateSeries&) = default;
};

inline std::size_t bin_count(double duration, double bin_width) {
    const auto n = static_cast<std::size_t>(std::ceil(duration / bin_width - 1e-12));
    return n == 0 ? 1 : n;
}

inline TimeSpan bin_span(std::size_t t, double bin_width, double duration) {
    const double lo = static_cast<double>(t) * bin_width;
    const double hi = static_cast<double>(t + 1) * bin_width;
    return {lo, hi < duration ? hi : duration};
}

struct HeatGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major, max-normalized to 1 unless all zero
    TimeSpan span;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    friend bool operator==(const HeatGrid&, const HeatGrid&) = default;
};

// Divides by the maximum when positive.
void normalize_max(HeatGrid& grid);

}  // namespace recapit
