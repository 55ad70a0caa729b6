#include "recapit/notes.hpp"

#include <algorithm>
#include <map>

#include "recapit/error.hpp"
#include "recapit/text.hpp"

namespace recapit {

namespace {

enum class Step { equal, insert, remove };

// Myers' greedy O(ND) search, keeping the frontier of every round for the
// backtrack. Round d stores V[k] for k in [-d-1, d+1].
std::vector<Step> shortest_edit(std::span<const std::string> a, std::span<const std::string> b) {
    const long n = static_cast<long>(a.size());
    const long m = static_cast<long>(b.size());
    const long max = n + m;
    std::vector<long> v(2 * max + 3, 0);
    const long off = max + 1;
    std::vector<std::vector<long>> trace;

    long final_d = 0;
    for (long d = 0; d <= max; ++d) {
        trace.emplace_back(v.begin() + (off - d - 1), v.begin() + (off + d + 2));
        bool done = false;
        for (long k = -d; k <= d; k += 2) {
            long x = (k == -d || (k != d && v[off + k - 1] < v[off + k + 1])) ? v[off + k + 1] : v[off + k - 1] + 1;
            long y = x - k;
            while (x < n && y < m && a[x] == b[y]) ++x, ++y;
            v[off + k] = x;
            if (x >= n && y >= m) {
                done = true;
                break;
            }
        }
        if (done) {
            final_d = d;
            break;
        }
    }

    std::vector<Step> steps;
    long x = n, y = m;
    for (long d = final_d; d > 0; --d) {
        const auto& vd = trace[d];
        auto at = [&](long k) { return vd[k + d + 1]; };
        const long k = x - y;
        const bool down = k == -d || (k != d && at(k - 1) < at(k + 1));
        const long pk = down ? k + 1 : k - 1;
        const long px = at(pk);
        const long py = px - pk;
        while (x > px && y > py) {
            steps.push_back(Step::equal);
            --x, --y;
        }
        steps.push_back(down ? Step::insert : Step::remove);
        x = px, y = py;
    }
    while (x > 0 && y > 0) {
        steps.push_back(Step::equal);
        --x, --y;
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

}  // namespace

std::vector<std::string> normalized_lines(std::string_view text) {
    std::vector<std::string> out;
    for (auto line : text::lines(text)) out.emplace_back(text::trim_right(line));
    return out;
}

LineDiff diff_lines(std::span<const std::string> prev, std::span<const std::string> next) {
    LineDiff diff;
    std::size_t i = 0, j = 0, pos = 0;
    for (auto s : shortest_edit(prev, next)) {
        switch (s) {
            case Step::equal:
                ++i, ++j, ++pos;
                break;
            case Step::remove:
                diff.removed.push_back(prev[i]);
                diff.ops.push_back({EditKind::remove, pos, prev[i]});
                ++i;
                break;
            case Step::insert:
                diff.added.push_back(next[j]);
                diff.ops.push_back({EditKind::add, pos, next[j]});
                ++j, ++pos;
                break;
        }
    }
    return diff;
}

LineDiff diff_snapshots(std::string_view prev, std::string_view next) {
    const auto a = normalized_lines(prev);
    const auto b = normalized_lines(next);
    return diff_lines(a, b);
}

std::vector<std::string> apply_ops(std::vector<std::string> lines, std::span<const EditOp> ops) {
    for (const auto& op : ops) {
        if (op.kind == EditKind::add) {
            if (op.index > lines.size()) throw ValidationError("edit op inserts past the end of the document");
            lines.insert(lines.begin() + static_cast<std::ptrdiff_t>(op.index), op.line);
        } else {
            if (op.index >= lines.size() || lines[op.index] != op.line) {
                throw ValidationError("edit op removes a line that is not there");
            }
            lines.erase(lines.begin() + static_cast<std::ptrdiff_t>(op.index));
        }
    }
    return lines;
}

const char* to_string(NoteKind kind) {
    switch (kind) {
        case NoteKind::added: return "added";
        case NoteKind::removed: return "removed";
        case NoteKind::mixed: return "mixed";
    }
    return "added";
}

std::optional<NoteKind> parse_note_kind(std::string_view text) {
    if (text == "added") return NoteKind::added;
    if (text == "removed") return NoteKind::removed;
    if (text == "mixed") return NoteKind::mixed;
    return std::nullopt;
}

NoteKind classify(const LineDiff& diff) {
    if (diff.removed.empty()) return NoteKind::added;
    if (diff.added.empty()) return NoteKind::removed;
    return NoteKind::mixed;
}

std::vector<NoteEvent> note_events(std::span<const NoteSnapshot> snapshots) {
    std::map<std::string, std::vector<const NoteSnapshot*>> by_author;
    for (const auto& s : snapshots) by_author[s.author].push_back(&s);

    std::vector<NoteEvent> events;
    for (auto& [author, list] : by_author) {
        std::stable_sort(list.begin(), list.end(), [](const NoteSnapshot* a, const NoteSnapshot* b) { return a->t < b->t; });
        for (std::size_t k = 1; k < list.size(); ++k) {
            auto diff = diff_snapshots(list[k - 1]->text, list[k]->text);
            if (diff.empty()) continue;
            NoteEvent e;
            e.author = author;
            e.t = list[k]->t;
            e.kind = classify(diff);
            e.added_lines = std::move(diff.added);
            e.removed_lines = std::move(diff.removed);
            e.ops = std::move(diff.ops);
            events.push_back(std::move(e));
        }
    }
    std::stable_sort(events.begin(), events.end(), [](const NoteEvent& a, const NoteEvent& b) {
        return a.t != b.t ? a.t < b.t : a.author < b.author;
    });
    return events;
}

std::vector<std::string> replay_notes(std::vector<std::string> initial, std::span<const NoteEvent> events,
                                      const std::string& author) {
    for (const auto& e : events) {
        if (e.author == author) initial = apply_ops(std::move(initial), e.ops);
    }
    return initial;
}

}  // namespace recapit
