#include "recapit/ingest.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "recapit/error.hpp"
#include "recapit/project_io.hpp"
#include "recapit/text.hpp"
#include "recapit/time.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace recapit {

namespace {

constexpr double kGazeJitter = 1e-3;

std::string where(const std::string& name, std::size_t line_no) { return name + ":" + std::to_string(line_no); }

[[noreturn]] void malformed(const std::string& name, std::size_t line_no, const std::string& what) {
    throw ValidationError(name + " line " + std::to_string(line_no) + ": " + what, where(name, line_no));
}

double line_number(const json& obj, const char* key, const std::string& name, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) malformed(name, line_no, std::string("'") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) malformed(name, line_no, std::string("'") + key + "' must be finite");
    return v;
}

std::string line_string(const json& obj, const char* key, const std::string& name, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) malformed(name, line_no, std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

std::optional<bool> parse_flag(std::string_view s) {
    const auto v = text::lower(text::trim(s));
    if (v == "1" || v == "true" || v == "t" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "f" || v == "no") return false;
    return std::nullopt;
}

}  // namespace

std::vector<Utterance> parse_transcript_text(std::string_view content, double offset,
                                             const std::set<std::string>& known_speakers, const std::string& name) {
    std::vector<Utterance> out;
    std::set<std::string> ids;
    const auto rows = text::lines(content);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto row = text::trim(rows[i]);
        if (row.empty()) continue;
        json obj;
        try {
            obj = json::parse(row);
        } catch (const json::parse_error&) {
            malformed(name, line_no, "not a JSON record");
        }
        if (!obj.is_object()) malformed(name, line_no, "not a JSON object");
        for (const auto& [k, v] : obj.items()) {
            if (k != "id" && k != "speaker" && k != "start" && k != "end" && k != "text") {
                malformed(name, line_no, "unknown field '" + k + "'");
            }
        }
        Utterance u;
        u.id = line_string(obj, "id", name, line_no);
        u.speaker_id = line_string(obj, "speaker", name, line_no);
        u.span.start = line_number(obj, "start", name, line_no) + offset;
        u.span.end = line_number(obj, "end", name, line_no) + offset;
        u.text = std::string(text::trim(line_string(obj, "text", name, line_no)));
        if (u.id.empty()) malformed(name, line_no, "empty utterance id");
        if (!ids.insert(u.id).second) malformed(name, line_no, "duplicate utterance id '" + u.id + "'");
        if (!(u.span.start < u.span.end)) malformed(name, line_no, "utterance must have start < end");
        if (u.text.empty()) malformed(name, line_no, "utterance text is empty");
        if (!known_speakers.empty() && !known_speakers.count(u.speaker_id)) {
            throw ValidationError(name + " line " + std::to_string(line_no) + ": unknown speaker '" + u.speaker_id + "'",
                                  where(name, line_no));
        }
        out.push_back(std::move(u));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Utterance& a, const Utterance& b) { return a.span.start < b.span.start; });
    return out;
}

std::vector<Utterance> parse_transcript(const fs::path& path, double offset, const std::set<std::string>& known_speakers) {
    return parse_transcript_text(read_file(path), offset, known_speakers, path.string());
}

std::vector<GazeSample> parse_gaze_text(std::string_view content, const std::string& participant_id, double offset,
                                        const std::string& name) {
    const auto rows = text::lines(content);
    std::size_t i = 0;
    while (i < rows.size() && text::trim(rows[i]).empty()) ++i;
    if (i == rows.size()) return {};
    {
        const auto header = text::split(rows[i], ',');
        const char* expected[] = {"t", "x", "y", "valid"};
        bool ok = header.size() == 4;
        for (std::size_t k = 0; ok && k < 4; ++k) ok = text::lower(text::trim(header[k])) == expected[k];
        if (!ok) malformed(name, i + 1, "expected header 't,x,y,valid'");
    }
    std::vector<GazeSample> out;
    double latest = -INFINITY;
    for (++i; i < rows.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (text::trim(rows[i]).empty()) continue;
        const auto cols = text::split(rows[i], ',');
        if (cols.size() != 4) malformed(name, line_no, "expected 4 columns");
        auto t = text::parse_double(cols[0]);
        if (!t || !std::isfinite(*t)) malformed(name, line_no, "timestamp is not a finite number");
        auto valid = parse_flag(cols[3]);
        if (!valid) malformed(name, line_no, "valid must be 0/1 or true/false");
        GazeSample s;
        s.participant_id = participant_id;
        s.t = *t + offset;
        const auto x = text::trim(cols[1]).empty() ? std::optional<double>(NAN) : text::parse_double(cols[1]);
        const auto y = text::trim(cols[2]).empty() ? std::optional<double>(NAN) : text::parse_double(cols[2]);
        if (!x || !y) malformed(name, line_no, "coordinates must be numbers");
        s.x = *x;
        s.y = *y;
        s.valid = *valid && std::isfinite(s.x) && std::isfinite(s.y);
        if (*t < latest - kGazeJitter) malformed(name, line_no, "timestamps go backwards beyond 1 ms jitter");
        latest = std::max(latest, *t);
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const GazeSample& a, const GazeSample& b) { return a.t < b.t; });
    return out;
}

std::vector<GazeSample> parse_gaze(const fs::path& path, const std::string& participant_id, double offset) {
    return parse_gaze_text(read_file(path), participant_id, offset, path.string());
}

std::map<std::string, std::vector<GazeSample>> load_gaze_dir(const fs::path& dir, const std::set<std::string>& participants,
                                                             double offset) {
    if (!fs::is_directory(dir)) throw IoError("gaze source must be a directory: " + dir.string(), dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, std::vector<GazeSample>> out;
    for (const auto& f : files) {
        const auto pid = f.stem().string();
        if (!participants.count(pid)) {
            throw ValidationError("gaze file for unknown participant '" + pid + "'", f.string());
        }
        out[pid] = parse_gaze(f, pid, offset);
    }
    return out;
}

std::vector<LandmarkFrame> parse_landmarks_text(std::string_view content, double offset, const std::string& name) {
    std::vector<LandmarkFrame> out;
    const auto rows = text::lines(content);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto row = text::trim(rows[i]);
        if (row.empty() || row.front() == '#') continue;
        const auto cols = text::split(row, ',');
        if (cols.size() % 2 != 1) malformed(name, line_no, "expected t followed by x,y pairs");
        std::vector<double> values;
        for (auto c : cols) {
            auto v = text::parse_double(c);
            if (!v || !std::isfinite(*v)) malformed(name, line_no, "non-numeric value");
            values.push_back(*v);
        }
        LandmarkFrame f;
        f.t = values[0] + offset;
        for (std::size_t k = 1; k < values.size(); k += 2) {
            const Point p{values[k], values[k + 1]};
            if (p.x < -0.5 || p.x > 1.5 || p.y < -0.5 || p.y > 1.5) {
                malformed(name, line_no, "landmark outside [-0.5,1.5]^2");
            }
            f.points.push_back(p);
        }
        out.push_back(std::move(f));
    }
    std::stable_sort(out.begin(), out.end(), [](const LandmarkFrame& a, const LandmarkFrame& b) { return a.t < b.t; });
    return out;
}

std::vector<LandmarkFrame> parse_landmarks(const fs::path& path, double offset) {
    return parse_landmarks_text(read_file(path), offset, path.string());
}

FrameIndex load_frame_index(const fs::path& dir, double offset) {
    const auto index_file = dir / "index.csv";
    if (!fs::exists(index_file)) throw IoError("missing frame index " + index_file.string(), index_file.string());
    const auto content = read_file(index_file);
    const auto rows = text::lines(content);
    const auto name = index_file.string();
    FrameIndex index;
    bool header_seen = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto row = text::trim(rows[i]);
        if (row.empty()) continue;
        const auto cols = text::split(row, ',');
        if (cols.size() != 2) malformed(name, i + 1, "expected 'file,t'");
        if (!header_seen) {
            header_seen = true;
            if (text::trim(cols[0]) == "file" && text::trim(cols[1]) == "t") continue;
            malformed(name, i + 1, "expected header 'file,t'");
        }
        auto t = text::parse_double(cols[1]);
        if (!t || !std::isfinite(*t)) malformed(name, i + 1, "timestamp is not a finite number");
        const auto file = dir / std::string(text::trim(cols[0]));
        if (!fs::exists(file)) throw IoError("missing frame " + file.string(), file.string());
        index.frames.push_back({*t + offset, file});
    }
    std::stable_sort(index.frames.begin(), index.frames.end(),
                     [](const FrameRef& a, const FrameRef& b) { return a.t < b.t; });

    const auto h_file = dir / "homography.txt";
    if (fs::exists(h_file)) {
        std::array<double, 9> m{};
        std::size_t n = 0;
        const auto h_text = read_file(h_file);
        for (auto line : text::lines(h_text)) {
            for (auto tok : text::split(text::trim(line), ' ')) {
                if (text::trim(tok).empty()) continue;
                auto v = text::parse_double(tok);
                if (!v || n >= 9) throw ValidationError("homography.txt must hold 9 numbers", h_file.string());
                m[n++] = *v;
            }
        }
        if (n != 9) throw ValidationError("homography.txt must hold 9 numbers", h_file.string());
        index.homography = Homography(m);
    }
    return index;
}

GrayFrame load_frame(const FrameRef& ref) { return {ref.t, read_pgm(ref.file)}; }

std::vector<NoteSnapshot> load_note_snapshots(const fs::path& dir, double session_start_epoch, double offset) {
    if (!fs::is_directory(dir)) throw IoError("notes source must be a directory: " + dir.string(), dir.string());
    std::vector<NoteSnapshot> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto filename = entry.path().filename().string();
        if (entry.path().extension() != ".txt") continue;
        const auto stem = entry.path().stem().string();
        const auto sep = stem.find("__");
        if (sep == std::string::npos || sep == 0) {
            throw ValidationError("note snapshot name must be '<author>__<timestamp>.txt': " + filename, filename);
        }
        const auto author = stem.substr(0, sep);
        const auto stamp = stem.substr(sep + 2);
        auto epoch = parse_iso8601(stamp);
        if (!epoch) throw ValidationError("unparseable timestamp in note snapshot name: " + filename, filename);
        const double t = *epoch - session_start_epoch + offset;
        if (t < 0) throw ValidationError("note snapshot precedes session start: " + filename, filename);
        out.push_back({author, t, read_file(entry.path())});
    }
    std::sort(out.begin(), out.end(), [](const NoteSnapshot& a, const NoteSnapshot& b) {
        return a.author != b.author ? a.author < b.author : a.t < b.t;
    });
    return out;
}

EmbeddingTable parse_embeddings(const fs::path& path) {
    EmbeddingTable table;
    const auto content = read_file(path);
    const auto rows = text::lines(content);
    std::size_t dim = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto row = text::trim(rows[i]);
        if (row.empty()) continue;
        const auto cols = text::split(row, ',');
        if (cols.size() < 2) malformed(path.string(), i + 1, "expected chunk_id followed by vector components");
        std::vector<double> v;
        for (std::size_t k = 1; k < cols.size(); ++k) {
            auto x = text::parse_double(cols[k]);
            if (!x || !std::isfinite(*x)) malformed(path.string(), i + 1, "non-numeric vector component");
            v.push_back(*x);
        }
        if (dim == 0) dim = v.size();
        if (v.size() != dim) malformed(path.string(), i + 1, "embedding dimension mismatch");
        table[std::string(text::trim(cols[0]))] = std::move(v);
    }
    return table;
}

}  // namespace recapit
