#include <doctest.h>

#include <omp.h>

#include <cstring>
#include <random>

#include "recapit/kernels.hpp"
#include "reference_kernels.hpp"

using namespace recapit;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

const int kThreadCounts[] = {1, 2, 3, 4, 7};

}  // namespace

TEST_CASE("bin occupancy matches the serial reference bit for bit") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 20; ++round) {
        const double duration = 20 + 60 * u(rng);
        const std::size_t columns = 1 + rng() % 5;
        std::vector<std::vector<kernels::LabelledInterval>> tracks(1 + rng() % 6);
        for (auto& track : tracks) {
            double t = 0;
            while (t < duration) {
                const double end = std::min(duration, t + 3 * u(rng));
                track.push_back({t, end, static_cast<int>(rng() % (columns + 1)) - 1});
                t = end;
            }
        }
        std::vector<double> expected;
        reference::bin_occupancy(tracks, columns, 0.7, duration, expected);
        for (int threads : kThreadCounts) {
            omp_set_num_threads(threads);
            std::vector<double> got;
            kernels::bin_occupancy(tracks, columns, 0.7, duration, got);
            CHECK(bitwise_equal(got, expected));
        }
    }
}

TEST_CASE("gaussian splat matches the serial reference bit for bit") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 10; ++round) {
        std::vector<kernels::WeightedPoint> pts(1 + rng() % 40);
        for (auto& p : pts) p = {u(rng) * 64, u(rng) * 48, u(rng) * 3};
        std::vector<double> expected;
        reference::gaussian_splat(pts, 64, 48, 2.0, expected);
        for (int threads : kThreadCounts) {
            omp_set_num_threads(threads);
            std::vector<double> got;
            kernels::gaussian_splat(pts, 64, 48, 2.0, got);
            CHECK(bitwise_equal(got, expected));
        }
    }
}

TEST_CASE("background update matches the serial reference bit for bit") {
    std::mt19937 rng(3);
    const std::size_t n = 97 * 61;
    std::vector<double> mean_ref(n, 0.0);
    for (auto& m : mean_ref) m = rng() % 256;
    for (int threads : kThreadCounts) {
        omp_set_num_threads(threads);
        auto mean_ref_copy = mean_ref;
        auto mean = mean_ref;
        for (int frame = 0; frame < 5; ++frame) {
            std::vector<std::uint8_t> px(n);
            for (auto& p : px) p = static_cast<std::uint8_t>(rng() % 256);
            std::vector<std::uint8_t> mask_ref(n), mask(n);
            reference::background_update(mean_ref_copy, px, 0.05, 25.0, mask_ref);
            kernels::background_update(mean, px, 0.05, 25.0, mask);
            CHECK(mask == mask_ref);
            CHECK(bitwise_equal(mean, mean_ref_copy));
        }
    }
}

TEST_CASE("group counts match the serial reference") {
    std::mt19937 rng(4);
    const std::size_t n = 5000;
    std::vector<std::uint8_t> mask(n);
    for (auto& m : mask) m = rng() % 2;
    kernels::PixelGroups groups;
    groups.offsets.push_back(0);
    for (int g = 0; g < 30; ++g) {
        const auto size = rng() % 400;
        for (std::size_t k = 0; k < size; ++k) groups.pixels.push_back(static_cast<std::uint32_t>(rng() % n));
        groups.offsets.push_back(groups.pixels.size());
    }
    std::vector<std::uint64_t> expected;
    reference::count_in_groups(mask, groups, expected);
    for (int threads : kThreadCounts) {
        omp_set_num_threads(threads);
        std::vector<std::uint64_t> got;
        kernels::count_in_groups(mask, groups, got);
        CHECK(got == expected);
    }
}
