#include "recapit/activity.hpp"

#include <algorithm>
#include <cmath>

#include "recapit/error.hpp"

namespace recapit {

std::size_t ForegroundMask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
}

BackgroundModel BackgroundModel::from_frame(const GrayImage& frame, double alpha, double diff_threshold) {
    if (!(alpha > 0 && alpha < 1)) throw ValidationError("background alpha must lie in (0,1)");
    BackgroundModel m;
    m.width = frame.width;
    m.height = frame.height;
    m.alpha = alpha;
    m.diff_threshold = diff_threshold;
    m.mean.assign(frame.pixels.begin(), frame.pixels.end());
    return m;
}

ForegroundMask update_background_in_place(BackgroundModel& model, const GrayImage& frame) {
    if (!model.initialized()) {
        model = BackgroundModel::from_frame(frame, model.alpha, model.diff_threshold);
    } else if (frame.width != model.width || frame.height != model.height) {
        throw ValidationError("frame is " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                              " but the background model is " + std::to_string(model.width) + "x" +
                              std::to_string(model.height));
    }
    ForegroundMask mask;
    mask.width = frame.width;
    mask.height = frame.height;
    mask.bits.assign(frame.pixels.size(), 0);
    kernels::background_update(model.mean, frame.pixels, model.alpha, model.diff_threshold, mask.bits);
    return mask;
}

std::pair<BackgroundModel, ForegroundMask> update_background(BackgroundModel model, const GrayImage& frame) {
    auto mask = update_background_in_place(model, frame);
    return {std::move(model), std::move(mask)};
}

Homography default_frame_homography(int width, int height) {
    return Homography::scale(1.0 / width, 1.0 / height);
}

kernels::PixelGroups aoi_pixel_groups(int width, int height, const Homography& h, std::span<const Aoi> aois) {
    kernels::PixelGroups groups;
    groups.offsets.push_back(0);
    std::vector<std::optional<Point>> mapped(static_cast<std::size_t>(width) * height);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            mapped[static_cast<std::size_t>(v) * width + u] = try_apply_homography(h, {u + 0.5, v + 0.5});
        }
    }
    for (const auto& aoi : aois) {
        for (std::size_t i = 0; i < mapped.size(); ++i) {
            if (mapped[i] && point_in_polygon(aoi.polygon, *mapped[i])) {
                groups.pixels.push_back(static_cast<std::uint32_t>(i));
            }
        }
        groups.offsets.push_back(groups.pixels.size());
    }
    return groups;
}

kernels::PixelGroups cell_pixel_groups(int width, int height, const Homography& h, int grid_width, int grid_height) {
    const std::size_t cells = static_cast<std::size_t>(grid_width) * grid_height;
    std::vector<std::vector<std::uint32_t>> members(cells);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            auto p = try_apply_homography(h, {u + 0.5, v + 0.5});
            if (!p || p->x < 0 || p->x >= 1 || p->y < 0 || p->y >= 1) continue;
            const auto cx = std::min(grid_width - 1, static_cast<int>(p->x * grid_width));
            const auto cy = std::min(grid_height - 1, static_cast<int>(p->y * grid_height));
            members[static_cast<std::size_t>(cy) * grid_width + cx].push_back(
                static_cast<std::uint32_t>(static_cast<std::size_t>(v) * width + u));
        }
    }
    kernels::PixelGroups groups;
    groups.offsets.push_back(0);
    for (const auto& m : members) {
        groups.pixels.insert(groups.pixels.end(), m.begin(), m.end());
        groups.offsets.push_back(groups.pixels.size());
    }
    return groups;
}

std::optional<std::size_t> nearest_landmarks(std::span<const LandmarkFrame> landmarks, double t, double tolerance) {
    if (landmarks.empty()) return std::nullopt;
    auto it = std::lower_bound(landmarks.begin(), landmarks.end(), t,
                               [](const LandmarkFrame& f, double v) { return f.t < v; });
    std::optional<std::size_t> best;
    double best_dt = INFINITY;
    if (it != landmarks.begin()) {
        const auto k = static_cast<std::size_t>(std::prev(it) - landmarks.begin());
        best_dt = t - landmarks[k].t;
        best = k;
    }
    if (it != landmarks.end() && it->t - t < best_dt) {
        best_dt = it->t - t;
        best = static_cast<std::size_t>(it - landmarks.begin());
    }
    if (!best || best_dt > tolerance) return std::nullopt;
    return best;
}

// ---------------------------------------------------------------------------

ActivityPipeline::ActivityPipeline(std::vector<Aoi> aois, std::vector<LandmarkFrame> landmarks,
                                   std::optional<Homography> homography, ActivityOptions options)
    : aois_(std::move(aois)), landmarks_(std::move(landmarks)), homography_(std::move(homography)), options_(options) {
    if (!(options_.duration > 0)) throw ValidationError("activity series needs a positive session duration");
    if (!(options_.bin_width > 0)) throw ValidationError("bin width must be positive");
    model_.alpha = options_.alpha;
    model_.diff_threshold = options_.diff_threshold;
    const auto bins = bin_count(options_.duration, options_.bin_width);
    bin_sums_.assign(bins * aois_.size(), 0.0);
    bin_frames_.assign(bins, 0);
    frame_activity_.assign(aois_.size(), 0.0);
}

const Homography& ActivityPipeline::homography() const {
    if (!homography_) throw ValidationError("no frame seen yet");
    return *homography_;
}

const std::vector<double>& ActivityPipeline::push(const GrayFrame& frame) {
    if (!model_.initialized()) {
        if (!homography_) homography_ = default_frame_homography(frame.image.width, frame.image.height);
        groups_ = aoi_pixel_groups(frame.image.width, frame.image.height, *homography_, aois_);
    }
    mask_ = update_background_in_place(model_, frame.image);
    kernels::count_in_groups(mask_.bits, groups_, counts_);

    const auto lm = nearest_landmarks(landmarks_, frame.t, options_.landmark_tolerance);
    for (std::size_t a = 0; a < aois_.size(); ++a) {
        bool gated_in = false;
        if (lm) {
            for (const auto& p : landmarks_[*lm].points) {
                if (point_in_polygon(aois_[a].polygon, p)) {
                    gated_in = true;
                    break;
                }
            }
        }
        const auto pixels = groups_.size(a);
        frame_activity_[a] = gated_in && pixels > 0
                                 ? static_cast<double>(counts_[a]) / static_cast<double>(pixels)
                                 : 0.0;
    }

    if (frame.t >= 0 && frame.t <= options_.duration) {
        const auto bins = bin_frames_.size();
        auto bin = static_cast<std::size_t>(std::floor(frame.t / options_.bin_width));
        bin = std::min(bin, bins - 1);
        for (std::size_t a = 0; a < aois_.size(); ++a) bin_sums_[bin * aois_.size() + a] += frame_activity_[a];
        ++bin_frames_[bin];
        ++frames_in_span_;
    }
    return frame_activity_;
}

MultivariateSeries ActivityPipeline::finish() const {
    if (frames_in_span_ == 0) throw ValidationError("no frames inside the session span");
    MultivariateSeries series;
    series.bin_width = options_.bin_width;
    series.start = 0.0;
    for (const auto& a : aois_) series.aoi_ids.push_back(a.id);
    series.values.assign(bin_sums_.size(), 0.0);
    const std::size_t m = aois_.size();
    for (std::size_t b = 0; b < bin_frames_.size(); ++b) {
        if (bin_frames_[b] == 0) continue;
        for (std::size_t a = 0; a < m; ++a) {
            series.values[b * m + a] = bin_sums_[b * m + a] / static_cast<double>(bin_frames_[b]);
        }
    }
    return series;
}

MultivariateSeries activity_series(std::span<const GrayFrame> frames, std::span<const LandmarkFrame> landmarks,
                                   std::span<const Aoi> aois, const std::optional<Homography>& homography,
                                   const ActivityOptions& options) {
    ActivityPipeline pipeline({aois.begin(), aois.end()}, {landmarks.begin(), landmarks.end()}, homography, options);
    for (const auto& f : frames) pipeline.push(f);
    return pipeline.finish();
}

MultivariateSeries activity_series(const FrameIndex& index, std::span<const LandmarkFrame> landmarks,
                                   std::span<const Aoi> aois, const ActivityOptions& options,
                                   const std::function<void(double, const ForegroundMask&)>& on_frame) {
    ActivityPipeline pipeline({aois.begin(), aois.end()}, {landmarks.begin(), landmarks.end()}, index.homography,
                              options);
    for (const auto& ref : index.frames) {
        const auto frame = load_frame(ref);
        pipeline.push(frame);
        if (on_frame) on_frame(frame.t, pipeline.last_mask());
    }
    return pipeline.finish();
}

// ---------------------------------------------------------------------------

ActivityHeatAccumulator::ActivityHeatAccumulator(kernels::PixelGroups cells, int grid_width, int grid_height,
                                                 TimeSpan span)
    : cells_(std::move(cells)), width_(grid_width), height_(grid_height), span_(span) {
    if (cells_.groups() != static_cast<std::size_t>(grid_width) * grid_height) {
        throw ValidationError("cell map does not match the heatmap grid");
    }
    sums_.assign(cells_.groups(), 0);
}

void ActivityHeatAccumulator::add(const ForegroundMask& mask) {
    kernels::count_in_groups(mask.bits, cells_, scratch_);
    for (std::size_t c = 0; c < sums_.size(); ++c) sums_[c] += scratch_[c];
    ++frames_;
}

HeatGrid ActivityHeatAccumulator::result() const {
    if (frames_ == 0) throw ValidationError("no frames inside the heatmap span");
    HeatGrid grid;
    grid.width = width_;
    grid.height = height_;
    grid.span = span_;
    grid.values.assign(sums_.size(), 0.0);
    for (std::size_t c = 0; c < sums_.size(); ++c) {
        const auto n = cells_.size(c);
        if (n == 0) continue;
        grid.values[c] = static_cast<double>(sums_[c]) / (static_cast<double>(frames_) * static_cast<double>(n));
    }
    normalize_max(grid);
    return grid;
}

HeatGrid activity_heatmap(std::span<const ForegroundMask> masks, const kernels::PixelGroups& cells, int grid_width,
                          int grid_height, TimeSpan span) {
    ActivityHeatAccumulator acc(cells, grid_width, grid_height, span);
    for (const auto& m : masks) acc.add(m);
    return acc.result();
}

}  // namespace recapit
