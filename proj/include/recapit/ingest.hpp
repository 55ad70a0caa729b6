#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "recapit/geometry.hpp"
#include "recapit/image.hpp"
#include "recapit/model.hpp"

namespace recapit {

struct Utterance {
    std::string id;
    std::string speaker_id;
    TimeSpan span;
    std::string text;

    friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct GazeSample {
    std::string participant_id;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    bool valid = false;

    friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

struct LandmarkFrame {
    double t = 0.0;
    std::vector<Point> points;  // normalized working-area coordinates

    friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;
};

struct GrayFrame {
    double t = 0.0;
    GrayImage image;
};

struct FrameRef {
    double t = 0.0;
    std::filesystem::path file;
};

// Frames directory: `index.csv` (header `file,t`), the referenced P5 files,
// and an optional `homography.txt` with 9 row-major numbers mapping pixel
// centres to working-area coordinates.
struct FrameIndex {
    std::vector<FrameRef> frames;  // sorted by t
    std::optional<Homography> homography;
};

struct NoteSnapshot {
    std::string author;
    double t = 0.0;
    std::string text;

    friend bool operator==(const NoteSnapshot&, const NoteSnapshot&) = default;
};

using EmbeddingTable = std::map<std::string, std::vector<double>>;

// Transcript: one JSON object per line with `id`, `speaker`, `start`, `end`
// and `text`. Blank lines are ignored. An empty `known_speakers` set skips
// the speaker check.
std::vector<Utterance> parse_transcript_text(std::string_view content, double offset,
                                             const std::set<std::string>& known_speakers,
                                             const std::string& name = "<transcript>");
std::vector<Utterance> parse_transcript(const std::filesystem::path& path, double offset,
                                        const std::set<std::string>& known_speakers = {});

// Gaze: delimiter-separated values with header `t,x,y,valid`.
std::vector<GazeSample> parse_gaze_text(std::string_view content, const std::string& participant_id, double offset,
                                        const std::string& name = "<gaze>");
std::vector<GazeSample> parse_gaze(const std::filesystem::path& path, const std::string& participant_id, double offset);

// One `<participant id>.csv` per participant.
std::map<std::string, std::vector<GazeSample>> load_gaze_dir(const std::filesystem::path& dir,
                                                             const std::set<std::string>& participants, double offset);

// Landmarks: one record per line, `t,x1,y1,x2,y2,...`.
std::vector<LandmarkFrame> parse_landmarks_text(std::string_view content, double offset,
                                                const std::string& name = "<landmarks>");
std::vector<LandmarkFrame> parse_landmarks(const std::filesystem::path& path, double offset);

FrameIndex load_frame_index(const std::filesystem::path& dir, double offset);
GrayFrame load_frame(const FrameRef& ref);

// Directory of `<author>__<ISO 8601>.txt` files. Result is grouped by author
// (lexicographic) and sorted by time within each author.
std::vector<NoteSnapshot> load_note_snapshots(const std::filesystem::path& dir, double session_start_epoch,
                                              double offset);

// Offline embeddings: `chunk_id,v1,v2,...` per line.
EmbeddingTable parse_embeddings(const std::filesystem::path& path);

}  // namespace recapit
