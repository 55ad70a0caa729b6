#include "recapit/cli.hpp"

#include <chrono>
#include <ostream>

#include <CLI11.hpp>

#include "recapit/error.hpp"
#include "recapit/pipeline.hpp"
#include "recapit/project_io.hpp"
#include "recapit/service.hpp"
#include "recapit/time.hpp"

namespace fs = std::filesystem;

namespace recapit {

namespace {

struct Options {
    std::string project;
    std::string out;
    std::optional<double> beta;
    std::optional<std::string> signal;
    std::optional<double> gap;
    std::optional<double> threshold;
    std::optional<int> min_bins;
    std::optional<double> bin_width;
    std::string output;
    std::string host = "127.0.0.1";
    int port = 8080;
};

fs::path out_dir(const Options& o) { return o.out.empty() ? project_root(o.project) / "derived" : fs::path(o.out); }

std::string now_iso8601() {
    using namespace std::chrono;
    const auto now = duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
    return format_iso8601(static_cast<double>(now));
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto project = load_project(o.project);
    check_sources_exist(project, project_root(o.project));
    out << "ok: " << project.id << " (" << project.participants.size() << " participants, " << project.aois.size()
        << " AOIs, " << project.sources.size() << " sources)\n";
    return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out) {
    const auto project = load_project(o.project);
    const auto session = load_session(project, project_root(o.project));
    write_ingest_outputs(session, out_dir(o));
    std::size_t fixations = 0;
    for (const auto& [_, f] : session.fixations) fixations += f.size();
    out << "utterances: " << session.utterances.size() << ", fixations: " << fixations
        << ", note events: " << session.note_events.size() << "\n";
    return kExitOk;
}

int cmd_segment(const Options& o, std::ostream& out) {
    auto project = load_project(o.project);
    auto& cfg = project.segmentation_config;
    if (o.beta) cfg.penalty_beta = *o.beta;
    if (o.signal) cfg.signal_kind = *parse_signal_kind(*o.signal);
    if (o.gap) cfg.gap_threshold = *o.gap;
    if (o.threshold) cfg.similarity_threshold = *o.threshold;
    if (o.min_bins) cfg.min_segment_bins = *o.min_bins;
    if (o.bin_width) cfg.bin_width = *o.bin_width;
    validate_project(project);

    const auto session = load_session(project, project_root(o.project));
    const auto providers = ProviderConfig::from_environment();
    auto embedder = make_embedding_provider(providers, session.embeddings ? &*session.embeddings : nullptr);
    auto titler = make_title_provider(providers);
    const auto run = run_segmentation(project, session, *embedder, titler.get());

    write_segmentation_outputs(project, run, out_dir(o));
    project.authoring = set_segments(project.authoring, run.segments, run.cards);
    save_project(project, manifest_path(o.project));

    const auto refined = run.points.size() - run.initial.changepoints.size();
    out << "segments: " << run.segments.size() << " (" << run.initial.changepoints.size() << " initial change points, "
        << refined << " refined)\n";
    return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
    auto project = load_project(o.project);
    if (project.authoring.segments.empty()) throw ValidationError("project has no segments; run segment first");
    const auto session = load_session(project, project_root(o.project));
    const auto attention = attention_of(project, session);
    const auto activity = activity_of(project, session);

    std::vector<TimeSpan> spans;
    for (const auto& s : project.authoring.segments) spans.push_back(s.span);
    const auto attention_maps = attention_heatmaps(project, session, spans);
    const auto activity_maps = activity ? activity_heatmaps(project, session, spans) : std::vector<HeatGrid>{};
    const auto stats = compute_card_stats(project, session, activity ? &*activity : nullptr);

    write_stats_outputs(project, attention, activity, attention_maps, activity_maps, stats, out_dir(o));
    project.authoring = set_stats(project.authoring, stats);
    save_project(project, manifest_path(o.project));
    out << "card statistics: " << stats.size() << "\n";
    return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out) {
    const auto project = load_project(o.project);
    const auto root = project_root(o.project);
    const fs::path destination = o.output.empty() ? out_dir(o) / "report.html" : fs::path(o.output);

    bool overlays = false;
    for (const auto& c : project.authoring.cards) {
        for (const auto& s : c.screenshots) overlays = overlays || (c.marked && s.heatmap_overlay.has_value());
    }
    std::optional<Session> session;
    if (overlays) session = load_session(project, root);

    ReportOptions options;
    options.generated_at = now_iso8601();
    options.overlay = [&](const Screenshot& shot) -> std::optional<OverlaySource> {
        if (!session || !shot.heatmap_overlay) return std::nullopt;
        const auto h = frame_homography(*session);
        if (!h) return std::nullopt;
        const TimeSpan spans[] = {shot.heatmap_overlay->span};
        auto grids = shot.heatmap_overlay->kind == SignalKind::attention
                         ? attention_heatmaps(project, *session, spans)
                         : activity_heatmaps(project, *session, spans);
        return OverlaySource{std::move(grids.front()), *h};
    };
    if (!destination.parent_path().empty()) fs::create_directories(destination.parent_path());
    export_report(project, root, destination, options);
    out << "report: " << destination.string() << "\n";
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
    Service service(o.project);
    serve(service, o.host, o.port, [&](int port) { out << "listening on port " << port << std::endl; });
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multimodal workshop analysis: ingest, segment, summarize and serve a recorded session."};
    app.name("recapit");
    app.require_subcommand(1, 1);

    Options o;
    auto add_project = [&](CLI::App* sub) {
        sub->add_option("--project", o.project, "Project directory or manifest file")->required();
    };
    auto add_out = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "Directory for derived files (default <project>/derived)");
    };

    auto* validate = app.add_subcommand("validate", "Check a manifest and its sources");
    add_project(validate);

    auto* ingest = app.add_subcommand("ingest", "Parse every source and write the derived streams");
    add_project(ingest);
    add_out(ingest);

    auto* segment = app.add_subcommand("segment", "Detect and refine topic segments");
    add_project(segment);
    add_out(segment);
    segment->add_option("--beta", o.beta, "PELT penalty")->check(CLI::PositiveNumber);
    segment->add_option("--signal", o.signal, "Series fed to PELT")->check(CLI::IsMember({"attention", "activity"}));
    segment->add_option("--gap", o.gap, "Pause (s) that starts a new dialogue chunk")->check(CLI::PositiveNumber);
    segment->add_option("--threshold", o.threshold, "Cosine similarity below which a chunk boundary splits")
        ->check(CLI::Range(-1.0, 1.0));
    segment->add_option("--min-bins", o.min_bins, "Minimum segment length in bins")->check(CLI::PositiveNumber);
    segment->add_option("--bin-width", o.bin_width, "Bin width in seconds")->check(CLI::PositiveNumber);

    auto* stats = app.add_subcommand("stats", "Write series, heatmaps and card statistics");
    add_project(stats);
    add_out(stats);

    auto* exp = app.add_subcommand("export", "Write the report of the marked cards");
    add_project(exp);
    add_out(exp);
    exp->add_option("--output", o.output, "Report file (default <out>/report.html)");

    auto* srv = app.add_subcommand("serve", "Serve the project over HTTP");
    add_project(srv);
    srv->add_option("--host", o.host, "Address to bind");
    srv->add_option("--port", o.port, "Port to bind (0 picks a free one)")->check(CLI::Range(0, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(o, out);
        if (ingest->parsed()) return cmd_ingest(o, out);
        if (segment->parsed()) return cmd_segment(o, out);
        if (stats->parsed()) return cmd_stats(o, out);
        if (exp->parsed()) return cmd_export(o, out);
        if (srv->parsed()) return cmd_serve(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what();
        if (!e.detail().empty()) err << " [" << e.detail() << "]";
        err << "\n";
        return e.code() == ErrorCode::io ? kExitIo : kExitValidation;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace recapit
