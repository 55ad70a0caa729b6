#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "recapit/geometry.hpp"
#include "recapit/image.hpp"
#include "recapit/ingest.hpp"
#include "recapit/kernels.hpp"
#include "recapit/model.hpp"
#include "recapit/series.hpp"

namespace recapit {

struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 1 = foreground

    std::size_t count() const;
    friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;
};

// Per-pixel exponential running mean in 8-bit intensity units.
struct BackgroundModel {
    int width = 0;
    int height = 0;
    std::vector<double> mean;
    double alpha = 0.05;
    double diff_threshold = 25.0;

    static BackgroundModel from_frame(const GrayImage& frame, double alpha, double diff_threshold);
    bool initialized() const noexcept { return !mean.empty(); }
};

// A pixel is foreground iff |intensity - mean| > diff_threshold; the mean is
// then blended toward the frame. An uninitialized model adopts the frame as
// its mean (empty mask).
std::pair<BackgroundModel, ForegroundMask> update_background(BackgroundModel model, const GrayImage& frame);
ForegroundMask update_background_in_place(BackgroundModel& model, const GrayImage& frame);

// Pixel centres (u + 0.5, v + 0.5) are mapped to working-area coordinates.
// Without a homography, the frame is taken to span the working area exactly.
Homography default_frame_homography(int width, int height);

kernels::PixelGroups aoi_pixel_groups(int width, int height, const Homography& h, std::span<const Aoi> aois);
kernels::PixelGroups cell_pixel_groups(int width, int height, const Homography& h, int grid_width, int grid_height);

// Index of the landmark frame nearest to t within tolerance (ties go to the
// earlier frame).
std::optional<std::size_t> nearest_landmarks(std::span<const LandmarkFrame> landmarks, double t, double tolerance);

struct ActivityOptions {
    double alpha = 0.05;
    double diff_threshold = 25.0;
    double landmark_tolerance = 0.2;
    double bin_width = 1.0;
    double duration = 0.0;
};

// Streaming activity computation. Frames must be pushed in time order; the
// background model sees every frame, while only frames inside [0, duration]
// contribute to the series.
class ActivityPipeline {
public:
    ActivityPipeline(std::vector<Aoi> aois, std::vector<LandmarkFrame> landmarks, std::optional<Homography> homography,
                     ActivityOptions options);

    // Returns the per-AOI activity of this frame (gated foreground share).
    const std::vector<double>& push(const GrayFrame& frame);
    const ForegroundMask& last_mask() const noexcept { return mask_; }
    const Homography& homography() const;
    std::size_t frames_in_span() const noexcept { return frames_in_span_; }

    // Throws ValidationError when no frame fell inside the session span.
    MultivariateSeries finish() const;

private:
    std::vector<Aoi> aois_;
    std::vector<LandmarkFrame> landmarks_;
    std::optional<Homography> homography_;
    ActivityOptions options_;
    BackgroundModel model_;
    kernels::PixelGroups groups_;
    ForegroundMask mask_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> frame_activity_;
    std::vector<double> bin_sums_;
    std::vector<std::size_t> bin_frames_;
    std::size_t frames_in_span_ = 0;
};

MultivariateSeries activity_series(std::span<const GrayFrame> frames, std::span<const LandmarkFrame> landmarks,
                                   std::span<const Aoi> aois, const std::optional<Homography>& homography,
                                   const ActivityOptions& options);

// Streams frames from disk. `on_frame` sees every frame's time and mask.
MultivariateSeries activity_series(const FrameIndex& index, std::span<const LandmarkFrame> landmarks,
                                   std::span<const Aoi> aois, const ActivityOptions& options,
                                   const std::function<void(double, const ForegroundMask&)>& on_frame = {});

// Per-cell foreground rate over the masks fed to it, max-normalized.
class ActivityHeatAccumulator {
public:
    ActivityHeatAccumulator(kernels::PixelGroups cells, int grid_width, int grid_height, TimeSpan span);

    void add(const ForegroundMask& mask);
    std::size_t frames() const noexcept { return frames_; }
    // Throws ValidationError when no mask was added.
    HeatGrid result() const;

private:
    kernels::PixelGroups cells_;
    int width_;
    int height_;
    TimeSpan span_;
    std::vector<std::uint64_t> sums_;
    std::vector<std::uint64_t> scratch_;
    std::size_t frames_ = 0;
};

HeatGrid activity_heatmap(std::span<const ForegroundMask> masks, const kernels::PixelGroups& cells, int grid_width,
                          int grid_height, TimeSpan span);

}  // namespace recapit
