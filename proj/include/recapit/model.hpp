#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "recapit/geometry.hpp"

namespace recapit {

// All times below are seconds from session start.
struct TimeSpan {
    double start = 0.0;
    double end = 0.0;

    double duration() const noexcept { return end - start; }
    bool contains(double t) const noexcept { return t >= start && t < end; }

    friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

inline double overlap(TimeSpan a, TimeSpan b) noexcept {
    const double lo = a.start > b.start ? a.start : b.start;
    const double hi = a.end < b.end ? a.end : b.end;
    return hi > lo ? hi - lo : 0.0;
}

struct Rgb {
    int r = 0;
    int g = 0;
    int b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Role {
    std::string id;
    std::string label;
    Rgb color;

    friend bool operator==(const Role&, const Role&) = default;
};

struct Participant {
    std::string id;
    std::string display_name;
    std::string role_id;
    Rgb color;

    friend bool operator==(const Participant&, const Participant&) = default;
};

struct Aoi {
    std::string id;
    std::string label;
    std::vector<Point> polygon;  // normalized working-area coordinates
    Rgb color;

    friend bool operator==(const Aoi&, const Aoi&) = default;
};

enum class SourceKind { transcript, gaze, frames, landmarks, notes, embeddings };

const char* to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);

// `path` is relative to the manifest directory unless absolute. Gaze, frames
// and notes sources point at directories; the others at files.
struct SourceDescriptor {
    SourceKind kind = SourceKind::transcript;
    std::string path;
    double time_offset = 0.0;

    friend bool operator==(const SourceDescriptor&, const SourceDescriptor&) = default;
};

enum class SignalKind { attention, activity };

const char* to_string(SignalKind kind);
std::optional<SignalKind> parse_signal_kind(std::string_view text);

struct SegmentationConfig {
    double penalty_beta = 10.0;
    double bin_width = 1.0;
    double gap_threshold = 1.5;
    double similarity_threshold = 0.5;
    int min_segment_bins = 2;
    SignalKind signal_kind = SignalKind::attention;

    friend bool operator==(const SegmentationConfig&, const SegmentationConfig&) = default;
};

// Parameters of the gaze, activity and heatmap stages.
struct AnalysisConfig {
    double dispersion_threshold = 0.05;   // normalized units, (max x - min x) + (max y - min y)
    double min_fixation_duration = 0.1;   // seconds
    double background_alpha = 0.05;
    double background_threshold = 25.0;   // 8-bit intensity units
    double landmark_tolerance = 0.2;      // seconds
    int heatmap_width = 64;
    int heatmap_height = 48;
    double heatmap_sigma = 2.0;           // cells

    friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

enum class SegmentOrigin { initial, refined };

struct TopicSegment {
    std::string id;
    TimeSpan span;
    std::string title;
    SegmentOrigin origin = SegmentOrigin::initial;
    bool marked = false;

    friend bool operator==(const TopicSegment&, const TopicSegment&) = default;
};

struct Quote {
    std::string utterance_id;
    std::string rendered;

    friend bool operator==(const Quote&, const Quote&) = default;
};

struct PixelRect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct HeatmapOverlay {
    SignalKind kind = SignalKind::attention;
    TimeSpan span;

    friend bool operator==(const HeatmapOverlay&, const HeatmapOverlay&) = default;
};

struct Screenshot {
    std::string image_path;
    PixelRect crop;
    std::optional<HeatmapOverlay> heatmap_overlay;

    friend bool operator==(const Screenshot&, const Screenshot&) = default;
};

struct CardStats {
    std::map<std::string, double> speaking_by_role;  // seconds / segment duration, may exceed 1
    std::map<std::string, double> attention_by_aoi;
    std::map<std::string, double> activity_by_aoi;

    friend bool operator==(const CardStats&, const CardStats&) = default;
};

enum class TitleSource { generated, fallback, user };

const char* to_string(TitleSource source);
std::optional<TitleSource> parse_title_source(std::string_view text);

struct TopicCard {
    std::string segment_id;
    std::string title;
    TitleSource title_source = TitleSource::fallback;
    std::vector<Quote> quotes;
    std::vector<std::string> notes;
    std::vector<Screenshot> screenshots;
    CardStats stats;
    bool marked = false;

    friend bool operator==(const TopicCard&, const TopicCard&) = default;
};

// One authoring step. `kind` names the transformation, `target` the card or
// segment it touches, `payload` its arguments.
struct Mutation {
    std::uint64_t seq = 0;
    std::string kind;
    std::string target;
    nlohmann::json payload;

    friend bool operator==(const Mutation&, const Mutation&) = default;
};

struct AuthoringState {
    std::uint64_t version = 0;
    std::vector<TopicSegment> segments;
    std::vector<TopicCard> cards;
    std::vector<Mutation> log;

    friend bool operator==(const AuthoringState&, const AuthoringState&) = default;
};

struct WorkshopProject {
    std::string id;
    std::string title;
    std::string session_start;  // ISO 8601
    double duration = 0.0;
    std::vector<Participant> participants;
    std::vector<Role> roles;
    std::vector<Aoi> aois;
    std::vector<SourceDescriptor> sources;
    SegmentationConfig segmentation_config;
    AnalysisConfig analysis_config;
    AuthoringState authoring;

    double session_start_epoch() const;
    TimeSpan session_span() const { return {0.0, duration}; }
    const SourceDescriptor* source(SourceKind kind) const;
    const Participant* participant(std::string_view id) const;
    const Role* role(std::string_view id) const;
    std::vector<std::string> aoi_ids() const;

    friend bool operator==(const WorkshopProject&, const WorkshopProject&) = default;
};

}  // namespace recapit
