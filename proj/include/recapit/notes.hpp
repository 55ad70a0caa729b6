#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recapit/ingest.hpp"

namespace recapit {

enum class EditKind { add, remove };

// `index` is the line position in the document as it stands when the op is
// applied; ops of one diff are applied in order.
struct EditOp {
    EditKind kind = EditKind::add;
    std::size_t index = 0;
    std::string line;

    friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct LineDiff {
    std::vector<std::string> added;
    std::vector<std::string> removed;
    std::vector<EditOp> ops;

    bool empty() const noexcept { return ops.empty(); }
    friend bool operator==(const LineDiff&, const LineDiff&) = default;
};

// Lines of `text` with trailing whitespace removed.
std::vector<std::string> normalized_lines(std::string_view text);

// Shortest edit script (Myers) between two line sequences.
LineDiff diff_lines(std::span<const std::string> prev, std::span<const std::string> next);
LineDiff diff_snapshots(std::string_view prev, std::string_view next);

std::vector<std::string> apply_ops(std::vector<std::string> lines, std::span<const EditOp> ops);

enum class NoteKind { added, removed, mixed };

const char* to_string(NoteKind kind);
std::optional<NoteKind> parse_note_kind(std::string_view text);

struct NoteEvent {
    std::string author;
    double t = 0.0;
    NoteKind kind = NoteKind::added;
    std::vector<std::string> added_lines;
    std::vector<std::string> removed_lines;
    std::vector<EditOp> ops;

    friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

NoteKind classify(const LineDiff& diff);

// One event per consecutive pair of one author's snapshots that differ,
// stamped with the later snapshot's time. Output is ordered by (t, author).
std::vector<NoteEvent> note_events(std::span<const NoteSnapshot> snapshots);

// Applies the events of `author` in order to `initial`.
std::vector<std::string> replay_notes(std::vector<std::string> initial, std::span<const NoteEvent> events,
                                      const std::string& author);

}  // namespace recapit
