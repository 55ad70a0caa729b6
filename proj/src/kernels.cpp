#include "recapit/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "recapit/series.hpp"

namespace recapit {

void normalize_max(HeatGrid& grid) {
    double peak = 0.0;
    for (double v : grid.values) peak = std::max(peak, v);
    if (peak <= 0.0) return;
    for (double& v : grid.values) v /= peak;
}

}  // namespace recapit

namespace recapit::kernels {

void bin_occupancy(std::span<const std::vector<LabelledInterval>> tracks, std::size_t columns, double bin_width,
                   double duration, std::vector<double>& out) {
    const std::size_t bins = bin_count(duration, bin_width);
    out.assign(bins * columns, 0.0);
    const auto n_bins = static_cast<long long>(bins);

#pragma omp parallel for schedule(static)
    for (long long b = 0; b < n_bins; ++b) {
        const TimeSpan bin = bin_span(static_cast<std::size_t>(b), bin_width, duration);
        const double len = bin.duration();
        if (len <= 0) continue;
        double* row = out.data() + static_cast<std::size_t>(b) * columns;
        for (const auto& track : tracks) {
            // first interval whose end lies past the bin start
            auto it = std::upper_bound(track.begin(), track.end(), bin.start,
                                       [](double s, const LabelledInterval& iv) { return s < iv.end; });
            for (; it != track.end() && it->start < bin.end; ++it) {
                if (it->column < 0) continue;
                const double ov = overlap(bin, {it->start, it->end});
                if (ov > 0) row[it->column] += ov / len;
            }
        }
    }
}

void gaussian_splat(std::span<const WeightedPoint> points, int width, int height, double sigma,
                    std::vector<double>& grid) {
    grid.assign(static_cast<std::size_t>(width) * height, 0.0);
    const double radius = 3.0 * sigma;
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        const double cy = y + 0.5;
        for (int x = 0; x < width; ++x) {
            const double cx = x + 0.5;
            double acc = 0.0;
            for (const auto& p : points) {
                const double dx = cx - p.x;
                const double dy = cy - p.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 > radius * radius) continue;
                acc += p.weight * std::exp(-d2 * inv_two_var);
            }
            grid[static_cast<std::size_t>(y) * width + x] = acc;
        }
    }
}

void background_update(std::span<double> mean, std::span<const std::uint8_t> pixels, double alpha, double threshold,
                       std::span<std::uint8_t> mask) {
    const auto n = static_cast<long long>(mean.size());

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const double v = pixels[i];
        mask[i] = std::abs(v - mean[i]) > threshold ? 1 : 0;
        mean[i] = (1.0 - alpha) * mean[i] + alpha * v;
    }
}

void count_in_groups(std::span<const std::uint8_t> mask, const PixelGroups& groups, std::vector<std::uint64_t>& counts) {
    const auto n = static_cast<long long>(groups.groups());
    counts.assign(groups.groups(), 0);

#pragma omp parallel for schedule(dynamic, 1)
    for (long long g = 0; g < n; ++g) {
        std::uint64_t c = 0;
        for (std::size_t k = groups.offsets[g]; k < groups.offsets[g + 1]; ++k) c += mask[groups.pixels[k]];
        counts[g] = c;
    }
}

}  // namespace recapit::kernels
