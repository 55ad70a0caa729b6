#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recapit/activity.hpp"
#include "recapit/attention.hpp"
#include "recapit/cards.hpp"
#include "recapit/ingest.hpp"
#include "recapit/model.hpp"
#include "recapit/notes.hpp"
#include "recapit/providers.hpp"
#include "recapit/segmentation.hpp"

namespace recapit {

// Every stream of a project, parsed and aligned to session time, plus the
// gaze and note analyses that depend only on the streams.
struct Session {
    std::filesystem::path root;
    std::vector<Utterance> utterances;
    std::map<std::string, std::vector<GazeSample>> gaze;
    std::map<std::string, std::vector<Fixation>> fixations;
    std::map<std::string, std::vector<ScarfInterval>> scarfs;
    std::vector<LandmarkFrame> landmarks;
    std::optional<FrameIndex> frames;
    std::vector<NoteSnapshot> snapshots;
    std::vector<NoteEvent> note_events;
    std::optional<EmbeddingTable> embeddings;
};

Session load_session(const WorkshopProject& project, const std::filesystem::path& root);

MultivariateSeries attention_of(const WorkshopProject& project, const Session& session);
// Nullopt when the project has no frames source.
std::optional<MultivariateSeries> activity_of(const WorkshopProject& project, const Session& session);
MultivariateSeries signal_of(const WorkshopProject& project, const Session& session, SignalKind kind);

std::vector<HeatGrid> attention_heatmaps(const WorkshopProject& project, const Session& session,
                                         std::span<const TimeSpan> spans);
// One pass over the frames; spans without frames yield an all-zero grid.
std::vector<HeatGrid> activity_heatmaps(const WorkshopProject& project, const Session& session,
                                        std::span<const TimeSpan> spans);

// Homography used for the frames of this session (explicit or default).
std::optional<Homography> frame_homography(const Session& session);

// Dialogue of a segment: utterances whose start lies in it, joined by spaces.
std::string segment_dialogue(const TopicSegment& segment, std::span<const Utterance> utterances, double duration);

struct SegmentationRun {
    MultivariateSeries series;
    ChangePointResult initial;
    std::vector<DialogueChunk> chunks;
    std::vector<RefinedChangePoint> points;
    std::vector<TopicSegment> segments;
    std::vector<TopicCard> cards;
};

// Cards of unchanged segments (same id and span) keep their authoring; their
// titles are regenerated unless the user set them.
SegmentationRun run_segmentation(const WorkshopProject& project, const Session& session,
                                 EmbeddingProvider& embedder, TitleProvider* titler);

std::map<std::string, CardStats> compute_card_stats(const WorkshopProject& project, const Session& session,
                                                    const MultivariateSeries* activity);

// Derived files under `out`.
void write_ingest_outputs(const Session& session, const std::filesystem::path& out);
void write_segmentation_outputs(const WorkshopProject& project, const SegmentationRun& run,
                                const std::filesystem::path& out);
void write_stats_outputs(const WorkshopProject& project, const MultivariateSeries& attention,
                         const std::optional<MultivariateSeries>& activity,
                         const std::vector<HeatGrid>& attention_maps, const std::vector<HeatGrid>& activity_maps,
                         const std::map<std::string, CardStats>& stats, const std::filesystem::path& out);

// Serializations shared by the derived files and the HTTP service.
nlohmann::json to_json(const Utterance& u);
nlohmann::json to_json(const Fixation& f);
nlohmann::json to_json(const ScarfInterval& s);
nlohmann::json to_json(const NoteEvent& e);
nlohmann::json to_json(const DialogueChunk& c);
nlohmann::json to_json(const MultivariateSeries& s);
nlohmann::json to_json(const HeatGrid& g);
std::string series_csv(const MultivariateSeries& s);
GrayImage heat_image(const HeatGrid& g);

}  // namespace recapit
