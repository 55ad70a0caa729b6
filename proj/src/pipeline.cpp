#include "recapit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "recapit/error.hpp"
#include "recapit/json_codec.hpp"
#include "recapit/project_io.hpp"
#include "recapit/text.hpp"

namespace fs = std::filesystem;

namespace recapit {

Session load_session(const WorkshopProject& project, const fs::path& root) {
    validate_project(project);
    check_sources_exist(project, root);
    Session s;
    s.root = root;

    std::set<std::string> participants;
    for (const auto& p : project.participants) participants.insert(p.id);

    if (const auto* src = project.source(SourceKind::transcript)) {
        s.utterances = parse_transcript(resolve_source(root, *src), src->time_offset, participants);
    }
    if (const auto* src = project.source(SourceKind::gaze)) {
        s.gaze = load_gaze_dir(resolve_source(root, *src), participants, src->time_offset);
    }
    if (const auto* src = project.source(SourceKind::landmarks)) {
        s.landmarks = parse_landmarks(resolve_source(root, *src), src->time_offset);
    }
    if (const auto* src = project.source(SourceKind::frames)) {
        s.frames = load_frame_index(resolve_source(root, *src), src->time_offset);
    }
    if (const auto* src = project.source(SourceKind::notes)) {
        s.snapshots = load_note_snapshots(resolve_source(root, *src), project.session_start_epoch(), src->time_offset);
        s.note_events = note_events(s.snapshots);
    }
    if (const auto* src = project.source(SourceKind::embeddings)) {
        s.embeddings = parse_embeddings(resolve_source(root, *src));
    }

    const auto& ac = project.analysis_config;
    for (const auto& [pid, samples] : s.gaze) {
        auto fx = detect_fixations(samples, ac.dispersion_threshold, ac.min_fixation_duration);
        s.scarfs[pid] = scarf_sequence(pid, fx, project.aois, project.duration);
        s.fixations[pid] = std::move(fx);
    }
    return s;
}

MultivariateSeries attention_of(const WorkshopProject& project, const Session& session) {
    return attention_series(session.scarfs, project.participants.size(), project.aoi_ids(),
                            project.segmentation_config.bin_width, project.duration);
}

std::optional<MultivariateSeries> activity_of(const WorkshopProject& project, const Session& session) {
    if (!session.frames) return std::nullopt;
    const auto& ac = project.analysis_config;
    ActivityOptions options{ac.background_alpha, ac.background_threshold, ac.landmark_tolerance,
                            project.segmentation_config.bin_width, project.duration};
    return activity_series(*session.frames, session.landmarks, project.aois, options);
}

MultivariateSeries signal_of(const WorkshopProject& project, const Session& session, SignalKind kind) {
    if (kind == SignalKind::attention) return attention_of(project, session);
    auto activity = activity_of(project, session);
    if (!activity) throw ValidationError("activity signal needs a frames source", "segmentation_config.signal_kind");
    return std::move(*activity);
}

std::optional<Homography> frame_homography(const Session& session) {
    if (!session.frames) return std::nullopt;
    if (session.frames->homography) return session.frames->homography;
    if (session.frames->frames.empty()) return std::nullopt;
    const auto [w, h] = image_dimensions(session.frames->frames.front().file);
    return default_frame_homography(w, h);
}

std::vector<HeatGrid> attention_heatmaps(const WorkshopProject& project, const Session& session,
                                         std::span<const TimeSpan> spans) {
    std::vector<Fixation> all;
    for (const auto& [_, fx] : session.fixations) all.insert(all.end(), fx.begin(), fx.end());
    const auto& ac = project.analysis_config;
    std::vector<HeatGrid> out;
    for (const auto& span : spans) {
        out.push_back(attention_heatmap(all, span, ac.heatmap_width, ac.heatmap_height, ac.heatmap_sigma));
    }
    return out;
}

std::vector<HeatGrid> activity_heatmaps(const WorkshopProject& project, const Session& session,
                                        std::span<const TimeSpan> spans) {
    const auto& ac = project.analysis_config;
    std::vector<HeatGrid> out;
    auto empty_grid = [&](TimeSpan span) {
        HeatGrid g;
        g.width = ac.heatmap_width;
        g.height = ac.heatmap_height;
        g.values.assign(static_cast<std::size_t>(g.width) * g.height, 0.0);
        g.span = span;
        return g;
    };
    if (!session.frames) {
        for (const auto& span : spans) out.push_back(empty_grid(span));
        return out;
    }

    ActivityOptions options{ac.background_alpha, ac.background_threshold, ac.landmark_tolerance,
                            project.segmentation_config.bin_width, project.duration};
    ActivityPipeline pipeline(project.aois, session.landmarks, session.frames->homography, options);
    std::vector<ActivityHeatAccumulator> acc;
    for (const auto& ref : session.frames->frames) {
        const auto frame = load_frame(ref);
        pipeline.push(frame);
        if (acc.empty()) {
            const auto cells = cell_pixel_groups(frame.image.width, frame.image.height, pipeline.homography(),
                                                 ac.heatmap_width, ac.heatmap_height);
            for (const auto& span : spans) acc.emplace_back(cells, ac.heatmap_width, ac.heatmap_height, span);
        }
        for (std::size_t i = 0; i < spans.size(); ++i) {
            const bool inside = spans[i].contains(frame.t) || (frame.t == spans[i].end && spans[i].end >= project.duration);
            if (inside) acc[i].add(pipeline.last_mask());
        }
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (i < acc.size() && acc[i].frames() > 0) {
            out.push_back(acc[i].result());
        } else {
            out.push_back(empty_grid(spans[i]));
        }
    }
    return out;
}

std::string segment_dialogue(const TopicSegment& segment, std::span<const Utterance> utterances, double duration) {
    std::string out;
    for (const auto& u : utterances) {
        const bool after = u.span.start >= segment.span.start || segment.span.start <= 0;
        const bool before = u.span.start < segment.span.end || segment.span.end >= duration;
        if (!(after && before)) continue;
        if (!out.empty()) out += ' ';
        out += u.text;
    }
    return out;
}

SegmentationRun run_segmentation(const WorkshopProject& project, const Session& session,
                                 EmbeddingProvider& embedder, TitleProvider* titler) {
    const auto& cfg = project.segmentation_config;
    SegmentationRun run;
    run.series = signal_of(project, session, cfg.signal_kind);
    run.initial = pelt_changepoints(run.series, cfg.penalty_beta, cfg.min_segment_bins);
    run.chunks = chunk_segments(session.utterances, run.initial, cfg.bin_width, project.duration, cfg.gap_threshold);
    run.chunks = embed_chunks(std::move(run.chunks), embedder);
    run.points = refine_changepoints(run.initial, run.chunks, cfg.similarity_threshold, cfg.bin_width,
                                     run.series.rows());
    run.segments = segments_from_changepoints(run.points, cfg.bin_width, project.duration);

    std::vector<std::string> corpus;
    for (const auto& s : run.segments) corpus.push_back(segment_dialogue(s, session.utterances, project.duration));

    for (std::size_t i = 0; i < run.segments.size(); ++i) {
        auto& seg = run.segments[i];
        const auto* old_seg = find_segment(project.authoring, seg.id);
        const auto* old_card = find_card(project.authoring, seg.id);
        TopicCard card;
        if (old_seg && old_card && old_seg->span == seg.span) card = *old_card;
        card.segment_id = seg.id;
        if (card.title_source != TitleSource::user || card.title.empty()) {
            auto t = generate_title(corpus[i], corpus, titler);
            card.title = std::move(t.title);
            card.title_source = t.source;
        }
        seg.title = card.title;
        seg.marked = card.marked;
        run.cards.push_back(std::move(card));
    }
    return run;
}

std::map<std::string, CardStats> compute_card_stats(const WorkshopProject& project, const Session& session,
                                                    const MultivariateSeries* activity) {
    std::map<std::string, CardStats> out;
    const auto aoi_ids = project.aoi_ids();
    for (const auto& seg : project.authoring.segments) {
        out[seg.id] = card_statistics(seg.span, session.utterances, project.participants, project.roles,
                                      session.scarfs, project.participants.size(), aoi_ids, activity);
    }
    return out;
}

// ---------------------------------------------------------------------------

json to_json(const Utterance& u) {
    return {{"id", u.id}, {"speaker", u.speaker_id}, {"start", u.span.start}, {"end", u.span.end}, {"text", u.text}};
}

json to_json(const Fixation& f) {
    return {{"participant", f.participant_id}, {"start", f.span.start}, {"end", f.span.end},
            {"x", f.centroid.x},               {"y", f.centroid.y},     {"dispersion", f.dispersion},
            {"samples", f.samples}};
}

json to_json(const ScarfInterval& s) {
    return {{"participant", s.participant_id},
            {"start", s.span.start},
            {"end", s.span.end},
            {"aoi", s.aoi_id ? json(*s.aoi_id) : json(nullptr)}};
}

namespace {

json lines_json(const std::vector<std::string>& lines) { return json(lines); }

json ops_json(const std::vector<EditOp>& ops) {
    auto j = json::array();
    for (const auto& op : ops) {
        j.push_back({{"op", op.kind == EditKind::add ? "add" : "remove"}, {"index", op.index}, {"line", op.line}});
    }
    return j;
}

std::string dump_pretty(const json& j) { return j.dump(2) + "\n"; }

std::string dump_lines(const json& array) {
    std::string out;
    for (const auto& item : array) out += item.dump() + "\n";
    return out;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

json to_json(const NoteEvent& e) {
    return {{"author", e.author},
            {"t", e.t},
            {"kind", to_string(e.kind)},
            {"added_lines", lines_json(e.added_lines)},
            {"removed_lines", lines_json(e.removed_lines)},
            {"ops", ops_json(e.ops)}};
}

json to_json(const DialogueChunk& c) {
    json j = {{"id", c.id},
              {"start", c.span.start},
              {"end", c.span.end},
              {"segment_index", c.segment_index},
              {"utterance_ids", c.utterance_ids},
              {"text", c.text}};
    if (c.embedding) j["embedding"] = *c.embedding;
    return j;
}

json to_json(const MultivariateSeries& s) {
    auto rows = json::array();
    for (std::size_t t = 0; t < s.rows(); ++t) {
        auto row = json::array();
        for (std::size_t m = 0; m < s.cols(); ++m) row.push_back(s.at(t, m));
        rows.push_back(std::move(row));
    }
    return {{"bin_width", s.bin_width}, {"start", s.start}, {"aoi_ids", s.aoi_ids}, {"values", rows}};
}

json to_json(const HeatGrid& g) {
    return {{"width", g.width}, {"height", g.height}, {"span", recapit::to_json(g.span)}, {"values", g.values}};
}

std::string series_csv(const MultivariateSeries& s) {
    std::string out = "t";
    for (const auto& id : s.aoi_ids) out += "," + csv_field(id);
    out += "\n";
    for (std::size_t t = 0; t < s.rows(); ++t) {
        out += text::format_double(s.start + static_cast<double>(t) * s.bin_width);
        for (std::size_t m = 0; m < s.cols(); ++m) out += "," + text::format_double(s.at(t, m));
        out += "\n";
    }
    return out;
}

GrayImage heat_image(const HeatGrid& g) {
    GrayImage img;
    img.width = g.width;
    img.height = g.height;
    img.pixels.reserve(g.values.size());
    for (double v : g.values) {
        img.pixels.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
    return img;
}

void write_ingest_outputs(const Session& session, const fs::path& out) {
    fs::create_directories(out);
    auto utterances = json::array();
    for (const auto& u : session.utterances) utterances.push_back(to_json(u));
    write_file_atomic(out / "utterances.jsonl", dump_lines(utterances));

    std::string fixations = "participant,start,end,x,y,dispersion,samples\n";
    for (const auto& [pid, list] : session.fixations) {
        for (const auto& f : list) {
            fixations += csv_field(pid) + "," + text::format_double(f.span.start) + "," +
                         text::format_double(f.span.end) + "," + text::format_double(f.centroid.x) + "," +
                         text::format_double(f.centroid.y) + "," + text::format_double(f.dispersion) + "," +
                         std::to_string(f.samples) + "\n";
        }
    }
    write_file_atomic(out / "fixations.csv", fixations);

    std::string scarf = "participant,start,end,aoi\n";
    for (const auto& [pid, list] : session.scarfs) {
        for (const auto& s : list) {
            scarf += csv_field(pid) + "," + text::format_double(s.span.start) + "," + text::format_double(s.span.end) +
                     "," + (s.aoi_id ? csv_field(*s.aoi_id) : std::string()) + "\n";
        }
    }
    write_file_atomic(out / "scarf.csv", scarf);

    auto events = json::array();
    for (const auto& e : session.note_events) events.push_back(to_json(e));
    write_file_atomic(out / "note_events.jsonl", dump_lines(events));
}

void write_segmentation_outputs(const WorkshopProject& project, const SegmentationRun& run, const fs::path& out) {
    fs::create_directories(out);
    const auto& cfg = project.segmentation_config;
    auto refined = json::array();
    for (const auto& p : run.points) {
        refined.push_back({{"bin", p.bin}, {"origin", p.origin == SegmentOrigin::initial ? "initial" : "refined"}});
    }
    const json cps = {{"signal", to_string(cfg.signal_kind)},
                      {"penalty_beta", cfg.penalty_beta},
                      {"bin_width", cfg.bin_width},
                      {"min_segment_bins", cfg.min_segment_bins},
                      {"bins", run.series.rows()},
                      {"initial", run.initial.changepoints},
                      {"objective", run.initial.objective},
                      {"changepoints", refined}};
    write_file_atomic(out / "changepoints.json", dump_pretty(cps));

    auto chunks = json::array();
    for (const auto& c : run.chunks) chunks.push_back(to_json(c));
    write_file_atomic(out / "chunks.jsonl", dump_lines(chunks));

    auto segments = json::array();
    for (const auto& s : run.segments) segments.push_back(recapit::to_json(s));
    write_file_atomic(out / "segments.json", dump_pretty(segments));
}

void write_stats_outputs(const WorkshopProject& project, const MultivariateSeries& attention,
                         const std::optional<MultivariateSeries>& activity,
                         const std::vector<HeatGrid>& attention_maps, const std::vector<HeatGrid>& activity_maps,
                         const std::map<std::string, CardStats>& stats, const fs::path& out) {
    fs::create_directories(out / "heatmaps");
    write_file_atomic(out / "attention.csv", series_csv(attention));
    if (activity) write_file_atomic(out / "activity.csv", series_csv(*activity));
    const auto& segments = project.authoring.segments;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i < attention_maps.size()) {
            write_file_atomic(out / "heatmaps" / (segments[i].id + "_attention.pgm"), encode_pgm(heat_image(attention_maps[i])));
        }
        if (activity && i < activity_maps.size()) {
            write_file_atomic(out / "heatmaps" / (segments[i].id + "_activity.pgm"), encode_pgm(heat_image(activity_maps[i])));
        }
    }
    auto j = json::object();
    for (const auto& [id, s] : stats) j[id] = recapit::to_json(s);
    write_file_atomic(out / "card_stats.json", dump_pretty(j));
}

}  // namespace recapit
