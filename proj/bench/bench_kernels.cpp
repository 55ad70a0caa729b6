#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>

#include "recapit/kernels.hpp"
#include "reference_kernels.hpp"

using namespace recapit;

namespace {

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

template <class T>
bool same(const std::vector<T>& a, const std::vector<T>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

void report(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-18s serial %9.3f ms   openmp %9.3f ms   speedup %5.2fx   %s\n", name, serial, parallel,
                serial / parallel, equal ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::stoi(argv[1]) : 5;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);

    {
        const double duration = 3600.0;
        const std::size_t columns = 8;
        std::vector<std::vector<kernels::LabelledInterval>> tracks(12);
        for (auto& track : tracks) {
            for (double t = 0; t < duration;) {
                const double end = std::min(duration, t + 2 * u(rng));
                track.push_back({t, end, static_cast<int>(rng() % (columns + 1)) - 1});
                t = end;
            }
        }
        std::vector<double> a, b;
        const double s = best_of(reps, [&] { reference::bin_occupancy(tracks, columns, 0.5, duration, a); });
        const double p = best_of(reps, [&] { kernels::bin_occupancy(tracks, columns, 0.5, duration, b); });
        report("bin_occupancy", s, p, same(a, b));
    }
    {
        std::vector<kernels::WeightedPoint> points(2000);
        for (auto& pt : points) pt = {u(rng) * 160, u(rng) * 120, u(rng)};
        std::vector<double> a, b;
        const double s = best_of(reps, [&] { reference::gaussian_splat(points, 160, 120, 4.0, a); });
        const double p = best_of(reps, [&] { kernels::gaussian_splat(points, 160, 120, 4.0, b); });
        report("gaussian_splat", s, p, same(a, b));
    }
    {
        const std::size_t n = 1920 * 1080;
        std::vector<std::uint8_t> pixels(n);
        for (auto& x : pixels) x = static_cast<std::uint8_t>(rng() % 256);
        std::vector<double> init(n);
        for (auto& x : init) x = static_cast<double>(rng() % 256);
        std::vector<double> ma, mb;
        std::vector<std::uint8_t> ka(n), kb(n);
        const double s = best_of(reps, [&] {
            ma = init;
            reference::background_update(ma, pixels, 0.05, 25.0, ka);
        });
        const double p = best_of(reps, [&] {
            mb = init;
            kernels::background_update(mb, pixels, 0.05, 25.0, kb);
        });
        report("background_update", s, p, same(ma, mb) && same(ka, kb));
    }
    {
        const std::size_t n = 1920 * 1080, groups = 64;
        std::vector<std::uint8_t> mask(n);
        for (auto& x : mask) x = rng() % 3 == 0;
        kernels::PixelGroups g;
        g.offsets.push_back(0);
        for (std::size_t k = 0; k < groups; ++k) {
            for (std::size_t i = k; i < n; i += groups) g.pixels.push_back(static_cast<std::uint32_t>(i));
            g.offsets.push_back(g.pixels.size());
        }
        std::vector<std::uint64_t> a, b;
        const double s = best_of(reps, [&] { reference::count_in_groups(mask, g, a); });
        const double p = best_of(reps, [&] { kernels::count_in_groups(mask, g, b); });
        report("count_in_groups", s, p, same(a, b));
    }
    return 0;
}
