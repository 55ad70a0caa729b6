#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recapit/ingest.hpp"
#include "recapit/model.hpp"
#include "recapit/series.hpp"

namespace recapit {

struct Fixation {
    std::string participant_id;
    TimeSpan span;
    Point centroid;
    double dispersion = 0.0;  // (max x - min x) + (max y - min y)
    std::size_t samples = 0;

    friend bool operator==(const Fixation&, const Fixation&) = default;
};

struct ScarfInterval {
    std::string participant_id;
    TimeSpan span;
    std::optional<std::string> aoi_id;

    friend bool operator==(const ScarfInterval&, const ScarfInterval&) = default;
};

struct SharedAttention {
    TimeSpan span;
    std::string aoi_id;

    friend bool operator==(const SharedAttention&, const SharedAttention&) = default;
};

// Dispersion-threshold identification (I-DT). From the first unconsumed valid
// sample, the window grows while the next sample is valid and the window
// dispersion stays within the threshold. A maximal window spanning at least
// `min_duration` (and two samples) becomes a fixation and is consumed;
// otherwise the start advances by one sample.
std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples, double dispersion_threshold,
                                       double min_duration);

// First AOI in manifest order whose polygon contains p (boundary inclusive).
std::optional<std::string> aoi_hit(std::span<const Aoi> aois, Point p);

// Tiles [0, duration] for one participant: each fixation becomes an interval
// labelled by aoi_hit(centroid); gaps are unlabelled.
std::vector<ScarfInterval> scarf_sequence(const std::string& participant_id, std::span<const Fixation> fixations,
                                          std::span<const Aoi> aois, double duration);

// Per bin and AOI, the time-weighted share of participants whose scarf label
// is that AOI. `scarfs` maps participant id to that participant's tiling;
// participants absent from the map count as never fixating.
MultivariateSeries attention_series(const std::map<std::string, std::vector<ScarfInterval>>& scarfs,
                                    std::size_t participant_count, const std::vector<std::string>& aoi_ids,
                                    double bin_width, double duration);

// Duration-weighted Gaussian bumps at fixation centroids, max-normalized.
// Weights use the part of each fixation that overlaps `span`.
HeatGrid attention_heatmap(std::span<const Fixation> fixations, TimeSpan span, int width, int height,
                           double sigma_cells);

// Maximal intervals during which at least k participants share one AOI label.
std::vector<SharedAttention> shared_attention_intervals(
    const std::map<std::string, std::vector<ScarfInterval>>& scarfs, std::size_t participant_count, std::size_t k);

}  // namespace recapit
