#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recapit/ingest.hpp"
#include "recapit/model.hpp"
#include "recapit/series.hpp"

namespace recapit {

class EmbeddingProvider;

// Change points use 0-based bin indices: c means "a new segment begins at
// bin c", equivalently "the previous segment ends with 1-based bin c".
// Times follow as c * bin_width.
struct ChangePointResult {
    std::vector<std::size_t> changepoints;  // strictly increasing, each in [1, T-1]
    double objective = 0.0;                 // sum of segment costs + beta * changepoints

    friend bool operator==(const ChangePointResult&, const ChangePointResult&) = default;
};

// Column-wise prefix sums of x and x^2 over a series whose columns have been
// centred on their means (the L2 cost is shift invariant; centring keeps the
// subtraction well conditioned).
class PrefixSums {
public:
    explicit PrefixSums(const MultivariateSeries& series);

    std::size_t length() const noexcept { return length_; }
    std::size_t dims() const noexcept { return dims_; }

    // Sum over t in [a, b] (1-based, inclusive) of ||x_t - mean(x_a..x_b)||^2.
    double cost(std::size_t a, std::size_t b) const;

private:
    std::size_t length_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> sum_;     // (length + 1) x dims
    std::vector<double> sum_sq_;  // (length + 1) x dims
};

double segment_cost(const PrefixSums& sums, std::size_t a, std::size_t b);

// Exact minimiser of sum(cost) + beta * #changepoints subject to every
// segment spanning at least `min_segment_bins` bins (a series shorter than
// that stays one segment). Ties resolve to the earliest last change point.
ChangePointResult pelt_changepoints(const MultivariateSeries& series, double beta, int min_segment_bins);

struct DialogueChunk {
    std::string id;
    TimeSpan span;
    std::vector<std::string> utterance_ids;
    std::string text;
    std::optional<std::vector<double>> embedding;
    std::size_t segment_index = 0;  // initial segment the chunk belongs to

    friend bool operator==(const DialogueChunk&, const DialogueChunk&) = default;
};

// A chunk break precedes utterance k when start_k - end_{k-1} > gap_threshold.
std::vector<DialogueChunk> chunk_transcript(std::span<const Utterance> utterances, double gap_threshold,
                                            std::size_t segment_index = 0);

// Assigns each utterance to the initial segment containing its start time,
// then chunks within each segment.
std::vector<DialogueChunk> chunk_segments(std::span<const Utterance> utterances, const ChangePointResult& initial,
                                          double bin_width, double duration, double gap_threshold);

// Replaces each chunk's embedding with the provider's vector for its text.
// All vectors must share one dimension.
std::vector<DialogueChunk> embed_chunks(std::vector<DialogueChunk> chunks, EmbeddingProvider& provider);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct RefinedChangePoint {
    std::size_t bin = 0;
    SegmentOrigin origin = SegmentOrigin::initial;

    friend bool operator==(const RefinedChangePoint&, const RefinedChangePoint&) = default;
};

// Initial change points plus one refined point per adjacent chunk pair (inside
// one initial segment) whose cosine similarity falls below the threshold. The
// refined point is the bin containing the later chunk's start and must lie
// strictly between the enclosing initial change points.
std::vector<RefinedChangePoint> refine_changepoints(const ChangePointResult& initial,
                                                    std::span<const DialogueChunk> chunks,
                                                    double similarity_threshold, double bin_width,
                                                    std::size_t bins);

std::vector<TopicSegment> segments_from_changepoints(std::span<const RefinedChangePoint> points, double bin_width,
                                                     double duration);

std::vector<TopicSegment> refine_segments(const ChangePointResult& initial, std::span<const DialogueChunk> chunks,
                                          double similarity_threshold, double bin_width, double duration);

}  // namespace recapit
