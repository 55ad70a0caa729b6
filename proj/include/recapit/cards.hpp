#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recapit/attention.hpp"
#include "recapit/geometry.hpp"
#include "recapit/ingest.hpp"
#include "recapit/model.hpp"
#include "recapit/series.hpp"

namespace recapit {

// speaking_by_role: per role, summed utterance overlap / segment duration.
// attention_by_aoi: summed dwell / (segment duration * participant count).
// activity_by_aoi: mean of the activity bins weighted by their overlap with
// the segment (zeros without an activity series).
CardStats card_statistics(TimeSpan segment, std::span<const Utterance> utterances,
                          std::span<const Participant> participants, std::span<const Role> roles,
                          const std::map<std::string, std::vector<ScarfInterval>>& scarfs,
                          std::size_t participant_count, const std::vector<std::string>& aoi_ids,
                          const MultivariateSeries* activity);

// Shares of the non-zero entries, summing to 1 (empty when all are zero).
std::map<std::string, double> donut_shares(const std::map<std::string, double>& values);

std::string render_quote(const Utterance& u);

// Utterances overlapping the segment qualify. Adding an utterance that is
// already quoted returns the card unchanged.
TopicCard add_quote(TopicCard card, const TopicSegment& segment, const Utterance& utterance);

// Ids of segments with an overlapping utterance that contains any keyword,
// compared case-insensitively.
std::vector<std::string> keyword_filter(std::span<const TopicSegment> segments, std::span<const Utterance> utterances,
                                        std::span<const std::string> keywords);

// Marked segments in temporal order.
std::vector<TopicSegment> compress_view(std::span<const TopicSegment> segments);

// ---------------------------------------------------------------------------
// Mutation log. Every authoring change is a Mutation applied by a pure
// function; replaying the log from an empty state rebuilds the state.

namespace mutation {
inline constexpr const char* set_segments = "set_segments";
inline constexpr const char* set_stats = "set_stats";
inline constexpr const char* set_title = "set_title";
inline constexpr const char* add_quote = "add_quote";
inline constexpr const char* add_note = "add_note";
inline constexpr const char* set_mark = "set_mark";
inline constexpr const char* add_screenshot = "add_screenshot";
}  // namespace mutation

// Applies `m` (whose seq must be state.version + 1) and appends it to the log.
AuthoringState apply_mutation(const AuthoringState& state, const Mutation& m);

AuthoringState replay(std::span<const Mutation> log);

// Builds the next mutation for `state` and applies it.
AuthoringState commit(const AuthoringState& state, std::string kind, std::string target, nlohmann::json payload);

AuthoringState set_segments(const AuthoringState& state, const std::vector<TopicSegment>& segments,
                            const std::vector<TopicCard>& cards);
AuthoringState set_stats(const AuthoringState& state, const std::map<std::string, CardStats>& stats);
AuthoringState set_title(const AuthoringState& state, const std::string& segment_id, const std::string& title);
AuthoringState add_quote(const AuthoringState& state, const std::string& card_id, const Utterance& utterance);
AuthoringState add_note(const AuthoringState& state, const std::string& card_id, const std::string& note);
AuthoringState set_mark(const AuthoringState& state, const std::string& card_id, bool marked);
// `image_size` is the (width, height) of the source image; the crop must lie
// inside it.
AuthoringState add_screenshot(const AuthoringState& state, const std::string& card_id, const Screenshot& shot,
                              std::pair<int, int> image_size);

const TopicCard* find_card(const AuthoringState& state, std::string_view id);
const TopicSegment* find_segment(const AuthoringState& state, std::string_view id);

// ---------------------------------------------------------------------------

struct OverlaySource {
    HeatGrid grid;
    Homography pixel_to_work;
};

using OverlayLookup = std::function<std::optional<OverlaySource>(const Screenshot&)>;

struct ReportOptions {
    std::string generated_at;  // ISO 8601, written on a line of its own
    OverlayLookup overlay;
};

// Self-contained HTML for the marked cards in temporal order. Screenshot
// sources are PGM frames resolved against `root`; crops are embedded as PNG.
std::string render_report(const WorkshopProject& project, const std::filesystem::path& root,
                          const ReportOptions& options);

void export_report(const WorkshopProject& project, const std::filesystem::path& root,
                   const std::filesystem::path& destination, const ReportOptions& options);

}  // namespace recapit
