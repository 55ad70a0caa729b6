#include "recapit/attention.hpp"

#include <algorithm>
#include <cmath>

#include "recapit/error.hpp"
#include "recapit/kernels.hpp"

namespace recapit {

std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples, double dispersion_threshold,
                                       double min_duration) {
    std::vector<Fixation> out;
    const std::size_t n = samples.size();
    std::size_t i = 0;
    while (i < n) {
        if (!samples[i].valid) {
            ++i;
            continue;
        }
        double min_x = samples[i].x, max_x = samples[i].x;
        double min_y = samples[i].y, max_y = samples[i].y;
        std::size_t j = i;
        while (j + 1 < n && samples[j + 1].valid) {
            const auto& s = samples[j + 1];
            const double nx0 = std::min(min_x, s.x), nx1 = std::max(max_x, s.x);
            const double ny0 = std::min(min_y, s.y), ny1 = std::max(max_y, s.y);
            if ((nx1 - nx0) + (ny1 - ny0) > dispersion_threshold) break;
            min_x = nx0, max_x = nx1, min_y = ny0, max_y = ny1;
            ++j;
        }
        if (j > i && samples[j].t - samples[i].t >= min_duration) {
            Fixation f;
            f.participant_id = samples[i].participant_id;
            f.span = {samples[i].t, samples[j].t};
            double sx = 0.0, sy = 0.0;
            for (std::size_t k = i; k <= j; ++k) {
                sx += samples[k].x;
                sy += samples[k].y;
            }
            f.samples = j - i + 1;
            f.centroid = {sx / static_cast<double>(f.samples), sy / static_cast<double>(f.samples)};
            f.dispersion = (max_x - min_x) + (max_y - min_y);
            out.push_back(std::move(f));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

std::optional<std::string> aoi_hit(std::span<const Aoi> aois, Point p) {
    for (const auto& a : aois) {
        if (point_in_polygon(a.polygon, p)) return a.id;
    }
    return std::nullopt;
}

std::vector<ScarfInterval> scarf_sequence(const std::string& participant_id, std::span<const Fixation> fixations,
                                          std::span<const Aoi> aois, double duration) {
    std::vector<ScarfInterval> out;
    double cursor = 0.0;
    for (const auto& f : fixations) {
        const double start = std::max(f.span.start, cursor);
        const double end = std::min(f.span.end, duration);
        if (!(end > start)) continue;
        if (start > cursor) out.push_back({participant_id, {cursor, start}, std::nullopt});
        out.push_back({participant_id, {start, end}, aoi_hit(aois, f.centroid)});
        cursor = end;
    }
    if (cursor < duration) out.push_back({participant_id, {cursor, duration}, std::nullopt});
    return out;
}

MultivariateSeries attention_series(const std::map<std::string, std::vector<ScarfInterval>>& scarfs,
                                    std::size_t participant_count, const std::vector<std::string>& aoi_ids,
                                    double bin_width, double duration) {
    if (participant_count == 0) throw ValidationError("attention series needs at least one participant");
    if (scarfs.size() > participant_count) throw ValidationError("more scarf tracks than participants");
    std::map<std::string, int> column;
    for (std::size_t m = 0; m < aoi_ids.size(); ++m) column[aoi_ids[m]] = static_cast<int>(m);

    std::vector<std::vector<kernels::LabelledInterval>> tracks;
    tracks.reserve(scarfs.size());
    for (const auto& [pid, intervals] : scarfs) {
        auto& track = tracks.emplace_back();
        for (const auto& iv : intervals) {
            int c = -1;
            if (iv.aoi_id) {
                auto it = column.find(*iv.aoi_id);
                if (it != column.end()) c = it->second;
            }
            track.push_back({iv.span.start, iv.span.end, c});
        }
    }

    MultivariateSeries series;
    series.bin_width = bin_width;
    series.start = 0.0;
    series.aoi_ids = aoi_ids;
    kernels::bin_occupancy(tracks, aoi_ids.size(), bin_width, duration, series.values);
    const double p = static_cast<double>(participant_count);
    for (double& v : series.values) v /= p;
    return series;
}

HeatGrid attention_heatmap(std::span<const Fixation> fixations, TimeSpan span, int width, int height,
                           double sigma_cells) {
    if (!(sigma_cells > 0)) throw ValidationError("heatmap sigma must be positive");
    if (width < 1 || height < 1) throw ValidationError("heatmap grid must be at least 1x1");
    std::vector<kernels::WeightedPoint> points;
    for (const auto& f : fixations) {
        const double w = overlap(f.span, span);
        if (w <= 0) continue;
        points.push_back({f.centroid.x * width, f.centroid.y * height, w});
    }
    HeatGrid grid;
    grid.width = width;
    grid.height = height;
    grid.span = span;
    kernels::gaussian_splat(points, width, height, sigma_cells, grid.values);
    normalize_max(grid);
    return grid;
}

std::vector<SharedAttention> shared_attention_intervals(
    const std::map<std::string, std::vector<ScarfInterval>>& scarfs, std::size_t participant_count, std::size_t k) {
    if (k < 1 || k > participant_count) {
        throw ValidationError("k must lie between 1 and the participant count (" + std::to_string(participant_count) + ")");
    }
    std::vector<double> bounds;
    for (const auto& [pid, track] : scarfs) {
        for (const auto& iv : track) {
            bounds.push_back(iv.span.start);
            bounds.push_back(iv.span.end);
        }
    }
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    std::vector<SharedAttention> out;
    std::map<std::string, TimeSpan> open;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const double lo = bounds[b], hi = bounds[b + 1];
        const double mid = 0.5 * (lo + hi);
        std::map<std::string, std::size_t> counts;
        for (const auto& [pid, track] : scarfs) {
            auto it = std::upper_bound(track.begin(), track.end(), mid,
                                       [](double t, const ScarfInterval& iv) { return t < iv.span.end; });
            if (it != track.end() && it->span.start <= mid && it->aoi_id) ++counts[*it->aoi_id];
        }
        for (auto it = open.begin(); it != open.end();) {
            auto c = counts.find(it->first);
            if (c == counts.end() || c->second < k) {
                out.push_back({it->second, it->first});
                it = open.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto& [aoi, count] : counts) {
            if (count < k) continue;
            auto it = open.find(aoi);
            if (it == open.end()) {
                open[aoi] = {lo, hi};
            } else {
                it->second.end = hi;
            }
        }
    }
    for (const auto& [aoi, span] : open) out.push_back({span, aoi});
    std::sort(out.begin(), out.end(), [](const SharedAttention& a, const SharedAttention& b) {
        return a.span.start != b.span.start ? a.span.start < b.span.start : a.aoi_id < b.aoi_id;
    });
    return out;
}

}  // namespace recapit
