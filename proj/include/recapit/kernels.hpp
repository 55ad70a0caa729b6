#pragma once

// Data-parallel inner loops. Each kernel is written so that the OpenMP build
// produces bit-identical results to a single-threaded run: work is split over
// independent outputs and every output is reduced in a fixed order. Serial
// reference versions live in the test-only `recapit_reference` library.

#include <cstdint>
#include <span>
#include <vector>

namespace recapit::kernels {

// Half-open interval labelled with a column index, or -1 for "no column".
struct LabelledInterval {
    double start = 0.0;
    double end = 0.0;
    int column = -1;
};

// out[t*columns + c] = sum over tracks, then intervals, of
// overlap(interval, bin t) / |bin t|. Each track must be sorted and
// non-overlapping. `out` is resized to bins*columns.
void bin_occupancy(std::span<const std::vector<LabelledInterval>> tracks, std::size_t columns, double bin_width,
                   double duration, std::vector<double>& out);

struct WeightedPoint {
    double x = 0.0;  // cell coordinates, cell centres at integer + 0.5
    double y = 0.0;
    double weight = 0.0;
};

// Adds isotropic Gaussian bumps truncated at 3 sigma onto a width x height
// grid. Points are visited in input order for every cell.
void gaussian_splat(std::span<const WeightedPoint> points, int width, int height, double sigma,
                    std::vector<double>& grid);

// Running-mean background update. mask[i] = |pixel - mean| > threshold, then
// mean <- (1 - alpha) mean + alpha pixel.
void background_update(std::span<double> mean, std::span<const std::uint8_t> pixels, double alpha, double threshold,
                       std::span<std::uint8_t> mask);

// Compressed list of pixel indices per group (AOI or heatmap cell).
struct PixelGroups {
    std::vector<std::size_t> offsets;  // size groups + 1
    std::vector<std::uint32_t> pixels;

    std::size_t groups() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t size(std::size_t g) const { return offsets[g + 1] - offsets[g]; }
};

// counts[g] = number of mask pixels set within group g.
void count_in_groups(std::span<const std::uint8_t> mask, const PixelGroups& groups, std::vector<std::uint64_t>& counts);

}  // namespace recapit::kernels
