#include "recapit/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "recapit/error.hpp"
#include "recapit/providers.hpp"

namespace recapit {

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
constexpr long long kParallelCandidates = 4096;

std::string segment_id(std::size_t index, std::size_t total) {
    const int width = std::max(3, static_cast<int>(std::to_string(total).size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "seg-%0*zu", width, index + 1);
    return buf;
}

}  // namespace

PrefixSums::PrefixSums(const MultivariateSeries& series) : length_(series.rows()), dims_(series.cols()) {
    std::vector<double> centre(dims_, 0.0);
    for (std::size_t t = 0; t < length_; ++t) {
        for (std::size_t d = 0; d < dims_; ++d) centre[d] += series.at(t, d);
    }
    for (auto& c : centre) c /= length_ == 0 ? 1.0 : static_cast<double>(length_);

    sum_.assign((length_ + 1) * dims_, 0.0);
    sum_sq_.assign((length_ + 1) * dims_, 0.0);
    for (std::size_t t = 0; t < length_; ++t) {
        for (std::size_t d = 0; d < dims_; ++d) {
            const double v = series.at(t, d) - centre[d];
            sum_[(t + 1) * dims_ + d] = sum_[t * dims_ + d] + v;
            sum_sq_[(t + 1) * dims_ + d] = sum_sq_[t * dims_ + d] + v * v;
        }
    }
}

double PrefixSums::cost(std::size_t a, std::size_t b) const {
    const double n = static_cast<double>(b - a + 1);
    double total = 0.0;
    for (std::size_t d = 0; d < dims_; ++d) {
        const double s = sum_[b * dims_ + d] - sum_[(a - 1) * dims_ + d];
        const double q = sum_sq_[b * dims_ + d] - sum_sq_[(a - 1) * dims_ + d];
        total += std::max(0.0, q - s * s / n);
    }
    return total;
}

double segment_cost(const PrefixSums& sums, std::size_t a, std::size_t b) {
    if (a < 1 || a > b || b > sums.length()) throw ValidationError("segment bounds must satisfy 1 <= a <= b <= T");
    return sums.cost(a, b);
}

ChangePointResult pelt_changepoints(const MultivariateSeries& series, double beta, int min_segment_bins) {
    if (!(beta > 0)) throw ValidationError("penalty beta must be positive");
    if (min_segment_bins < 1) throw ValidationError("min_segment_bins must be at least 1");
    const std::size_t T = series.rows();
    if (T == 0) throw ValidationError("series must hold at least one bin");
    const auto m = static_cast<std::size_t>(min_segment_bins);
    const PrefixSums sums(series);

    // F[t]: optimal penalised cost of x_1..x_t; last[t]: its final change point.
    std::vector<double> F(T + 1, INFINITY);
    std::vector<std::size_t> last(T + 1, 0);
    F[0] = -beta;

    // A candidate tau found dominated at time t can only be dropped once t
    // itself is an admissible change point, i.e. from t + m on.
    struct Candidate {
        std::size_t tau;
        std::size_t prune_at;
    };
    std::vector<Candidate> candidates{{0, kNever}};
    std::vector<double> values;

    for (std::size_t t = 1; t <= T; ++t) {
        if (t >= 2 * m) candidates.push_back({t - m, kNever});
        std::erase_if(candidates, [t](const Candidate& c) { return c.prune_at <= t; });

        // tau = 0 needs a first segment of length >= m, except for the whole series
        const bool zero_ok = t >= m || t == T;
        values.assign(candidates.size(), INFINITY);
        const auto n = static_cast<long long>(candidates.size());
#pragma omp parallel for schedule(static) if (n > kParallelCandidates)
        for (long long k = 0; k < n; ++k) {
            const auto tau = candidates[k].tau;
            if (tau == 0 && !zero_ok) continue;
            values[k] = F[tau] + sums.cost(tau + 1, t);
        }

        double best = INFINITY;
        std::size_t arg = 0;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            const double v = values[k] + beta;
            if (v < best) {
                best = v;
                arg = candidates[k].tau;
            }
        }
        F[t] = best;
        last[t] = arg;
        if (!std::isfinite(best)) continue;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (std::isfinite(values[k]) && values[k] > F[t]) {
                candidates[k].prune_at = std::min(candidates[k].prune_at, t + m);
            }
        }
    }

    ChangePointResult result;
    result.objective = F[T];
    for (std::size_t tau = last[T]; tau > 0; tau = last[tau]) result.changepoints.push_back(tau);
    std::reverse(result.changepoints.begin(), result.changepoints.end());
    return result;
}

// ---------------------------------------------------------------------------

std::vector<DialogueChunk> chunk_transcript(std::span<const Utterance> utterances, double gap_threshold,
                                            std::size_t segment_index) {
    std::vector<DialogueChunk> chunks;
    for (std::size_t k = 0; k < utterances.size(); ++k) {
        const auto& u = utterances[k];
        const bool split = k == 0 || u.span.start - utterances[k - 1].span.end > gap_threshold;
        if (split) {
            DialogueChunk c;
            c.id = "chunk-" + u.id;
            c.span = u.span;
            c.segment_index = segment_index;
            chunks.push_back(std::move(c));
        } else {
            auto& c = chunks.back();
            c.span.end = std::max(c.span.end, u.span.end);
            c.text += ' ';
        }
        auto& c = chunks.back();
        c.utterance_ids.push_back(u.id);
        c.text += u.text;
    }
    return chunks;
}

std::vector<DialogueChunk> chunk_segments(std::span<const Utterance> utterances, const ChangePointResult& initial,
                                          double bin_width, double duration, double gap_threshold) {
    std::vector<double> starts{0.0};
    for (auto c : initial.changepoints) starts.push_back(static_cast<double>(c) * bin_width);
    std::vector<std::vector<Utterance>> groups(starts.size());
    for (const auto& u : utterances) {
        if (u.span.start >= duration) {
            groups.back().push_back(u);
            continue;
        }
        auto it = std::upper_bound(starts.begin(), starts.end(), u.span.start);
        const auto idx = it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin()) - 1;
        groups[idx].push_back(u);
    }
    std::vector<DialogueChunk> out;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        auto chunks = chunk_transcript(groups[i], gap_threshold, i);
        out.insert(out.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
    }
    return out;
}

std::vector<DialogueChunk> embed_chunks(std::vector<DialogueChunk> chunks, EmbeddingProvider& provider) {
    std::size_t dim = 0;
    for (auto& c : chunks) {
        std::vector<double> v;
        try {
            v = provider.embed(c.id, c.text);
        } catch (const Error& e) {
            throw ProviderError("embedding failed for chunk " + c.id + ": " + e.what(), c.id);
        } catch (const std::exception& e) {
            throw ProviderError("embedding failed for chunk " + c.id + ": " + e.what(), c.id);
        }
        if (v.empty()) throw ProviderError("empty embedding for chunk " + c.id, c.id);
        if (dim == 0) dim = v.size();
        if (v.size() != dim) {
            throw ValidationError("embedding dimension mismatch at chunk " + c.id + " (" + std::to_string(v.size()) +
                                      " vs " + std::to_string(dim) + ")",
                                  c.id);
        }
        c.embedding = std::move(v);
    }
    return chunks;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("cosine similarity of vectors with different dimensions");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ValidationError("cosine similarity of a zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<RefinedChangePoint> refine_changepoints(const ChangePointResult& initial,
                                                    std::span<const DialogueChunk> chunks,
                                                    double similarity_threshold, double bin_width,
                                                    std::size_t bins) {
    auto norm_of = [](const DialogueChunk& c) {
        if (!c.embedding) throw ValidationError("chunk " + c.id + " has no embedding", c.id);
        double n = 0.0;
        for (double v : *c.embedding) n += v * v;
        if (n == 0.0) throw ValidationError("chunk " + c.id + " has a zero-norm embedding", c.id);
        return n;
    };
    for (const auto& c : chunks) norm_of(c);

    std::vector<std::size_t> bounds{0};
    bounds.insert(bounds.end(), initial.changepoints.begin(), initial.changepoints.end());
    bounds.push_back(bins);

    std::vector<RefinedChangePoint> out;
    for (auto c : initial.changepoints) out.push_back({c, SegmentOrigin::initial});
    for (std::size_t k = 0; k + 1 < chunks.size(); ++k) {
        const auto& a = chunks[k];
        const auto& b = chunks[k + 1];
        if (a.segment_index != b.segment_index) continue;
        if (a.segment_index + 1 >= bounds.size()) continue;
        if (a.embedding->size() != b.embedding->size()) {
            throw ValidationError("embedding dimension mismatch between " + a.id + " and " + b.id, b.id);
        }
        if (cosine_similarity(*a.embedding, *b.embedding) >= similarity_threshold) continue;
        const double start = std::max(0.0, b.span.start);
        const auto bin = static_cast<std::size_t>(std::floor(start / bin_width));
        const auto lo = bounds[a.segment_index];
        const auto hi = bounds[a.segment_index + 1];
        if (!(lo < bin && bin < hi)) continue;
        const bool dup = std::any_of(out.begin(), out.end(), [bin](const RefinedChangePoint& p) { return p.bin == bin; });
        if (!dup) out.push_back({bin, SegmentOrigin::refined});
    }
    std::sort(out.begin(), out.end(), [](const RefinedChangePoint& x, const RefinedChangePoint& y) { return x.bin < y.bin; });
    return out;
}

std::vector<TopicSegment> segments_from_changepoints(std::span<const RefinedChangePoint> points, double bin_width,
                                                     double duration) {
    std::vector<TopicSegment> out;
    const std::size_t total = points.size() + 1;
    double start = 0.0;
    SegmentOrigin origin = SegmentOrigin::initial;
    for (std::size_t i = 0; i <= points.size(); ++i) {
        const double end = i < points.size() ? static_cast<double>(points[i].bin) * bin_width : duration;
        TopicSegment s;
        s.id = segment_id(i, total);
        s.span = {start, end};
        s.origin = origin;
        out.push_back(std::move(s));
        if (i < points.size()) {
            start = end;
            origin = points[i].origin;
        }
    }
    return out;
}

std::vector<TopicSegment> refine_segments(const ChangePointResult& initial, std::span<const DialogueChunk> chunks,
                                          double similarity_threshold, double bin_width, double duration) {
    const auto bins = bin_count(duration, bin_width);
    const auto points = refine_changepoints(initial, chunks, similarity_threshold, bin_width, bins);
    return segments_from_changepoints(points, bin_width, duration);
}

}  // namespace recapit
