#include "recapit/json_codec.hpp"

#include <algorithm>
#include <cmath>

#include "recapit/error.hpp"

namespace recapit {

namespace {

constexpr int kManifestVersion = 1;

std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

const json& require_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError("expected an array", path);
    return j;
}

Rgb rgb_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) throw ValidationError("expected an [r, g, b] triple", path);
    Rgb c;
    int* channels[] = {&c.r, &c.g, &c.b};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!j[i].is_number_integer()) throw ValidationError("color channel must be an integer", index_path(path, i));
        *channels[i] = j[i].get<int>();
    }
    return c;
}

Point point_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("expected an [x, y] pair", path);
    return {json_number(j[0], index_path(path, 0)), json_number(j[1], index_path(path, 1))};
}

Role role_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Role role{r.string("id"), r.string("label"), rgb_from_json(r.required("color"), r.field("color"))};
    r.finish();
    return role;
}

Participant participant_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Participant p{r.string("id"), r.string("display_name"), r.string("role_id"),
                  rgb_from_json(r.required("color"), r.field("color"))};
    r.finish();
    return p;
}

Aoi aoi_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Aoi a;
    a.id = r.string("id");
    a.label = r.string("label");
    const auto& poly = require_array(r.required("polygon"), r.field("polygon"));
    for (std::size_t i = 0; i < poly.size(); ++i) {
        a.polygon.push_back(point_from_json(poly[i], index_path(r.field("polygon"), i)));
    }
    a.color = rgb_from_json(r.required("color"), r.field("color"));
    r.finish();
    return a;
}

SourceDescriptor source_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    SourceDescriptor s;
    const auto kind = r.string("kind");
    auto parsed = parse_source_kind(kind);
    if (!parsed) throw ValidationError("unknown source kind '" + kind + "'", r.field("kind"));
    s.kind = *parsed;
    s.path = r.string("path");
    s.time_offset = r.number_or("time_offset", 0.0);
    r.finish();
    return s;
}

SegmentationConfig segmentation_config_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    SegmentationConfig c;
    c.penalty_beta = r.number_or("penalty_beta", c.penalty_beta);
    c.bin_width = r.number_or("bin_width", c.bin_width);
    c.gap_threshold = r.number_or("gap_threshold", c.gap_threshold);
    c.similarity_threshold = r.number_or("similarity_threshold", c.similarity_threshold);
    if (r.optional("min_segment_bins")) c.min_segment_bins = static_cast<int>(r.integer("min_segment_bins"));
    if (r.optional("signal_kind")) {
        const auto kind = r.string("signal_kind");
        auto parsed = parse_signal_kind(kind);
        if (!parsed) throw ValidationError("signal_kind must be attention or activity", r.field("signal_kind"));
        c.signal_kind = *parsed;
    }
    r.finish();
    return c;
}

AnalysisConfig analysis_config_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    AnalysisConfig c;
    c.dispersion_threshold = r.number_or("dispersion_threshold", c.dispersion_threshold);
    c.min_fixation_duration = r.number_or("min_fixation_duration", c.min_fixation_duration);
    c.background_alpha = r.number_or("background_alpha", c.background_alpha);
    c.background_threshold = r.number_or("background_threshold", c.background_threshold);
    c.landmark_tolerance = r.number_or("landmark_tolerance", c.landmark_tolerance);
    if (r.optional("heatmap_width")) c.heatmap_width = static_cast<int>(r.integer("heatmap_width"));
    if (r.optional("heatmap_height")) c.heatmap_height = static_cast<int>(r.integer("heatmap_height"));
    c.heatmap_sigma = r.number_or("heatmap_sigma", c.heatmap_sigma);
    r.finish();
    return c;
}

Quote quote_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Quote q{r.string("utterance_id"), r.string("rendered")};
    r.finish();
    return q;
}

std::map<std::string, double> number_map_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError("expected an object", path);
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.items()) out[k] = json_number(v, path + "." + k);
    return out;
}

Mutation mutation_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Mutation m;
    const auto seq = r.integer("seq");
    if (seq < 0) throw ValidationError("seq must be non-negative", r.field("seq"));
    m.seq = static_cast<std::uint64_t>(seq);
    m.kind = r.string("kind");
    m.target = r.string("target");
    m.payload = r.required("payload");
    r.finish();
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------

ObjectReader::ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("expected an object", path_.empty() ? "$" : path_);
}

std::string ObjectReader::field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
}

const json* ObjectReader::optional(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) seen_.push_back(key);
    return &*it;
}

const json& ObjectReader::required(const std::string& key) {
    const json* v = optional(key);
    if (!v) throw ValidationError("missing required field", field(key));
    return *v;
}

std::string ObjectReader::string(const std::string& key) { return json_string(required(key), field(key)); }

double ObjectReader::number(const std::string& key) { return json_number(required(key), field(key)); }

double ObjectReader::number_or(const std::string& key, double fallback) {
    const json* v = optional(key);
    return v ? json_number(*v, field(key)) : fallback;
}

long long ObjectReader::integer(const std::string& key) {
    const json& v = required(key);
    if (!v.is_number_integer()) throw ValidationError("expected an integer", field(key));
    return v.get<long long>();
}

bool ObjectReader::boolean(const std::string& key) {
    const json& v = required(key);
    if (!v.is_boolean()) throw ValidationError("expected a boolean", field(key));
    return v.get<bool>();
}

bool ObjectReader::boolean_or(const std::string& key, bool fallback) {
    const json* v = optional(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ValidationError("expected a boolean", field(key));
    return v->get<bool>();
}

void ObjectReader::finish() const {
    for (const auto& [k, v] : j_.items()) {
        if (std::find(seen_.begin(), seen_.end(), k) == seen_.end() && !v.is_null()) {
            throw ValidationError("unknown field", field(k));
        }
    }
}

std::string json_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError("expected a string", path);
    return j.get<std::string>();
}

double json_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError("expected a number", path);
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError("expected a finite number", path);
    return v;
}

// ---------------------------------------------------------------------------

json to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

json to_json(const TimeSpan& s) { return {{"start", s.start}, {"end", s.end}}; }

json to_json(const Role& r) { return {{"id", r.id}, {"label", r.label}, {"color", to_json(r.color)}}; }

json to_json(const Participant& p) {
    return {{"id", p.id}, {"display_name", p.display_name}, {"role_id", p.role_id}, {"color", to_json(p.color)}};
}

json to_json(const Aoi& a) {
    json poly = json::array();
    for (const auto& p : a.polygon) poly.push_back({p.x, p.y});
    return {{"id", a.id}, {"label", a.label}, {"polygon", poly}, {"color", to_json(a.color)}};
}

json to_json(const SourceDescriptor& s) {
    return {{"kind", to_string(s.kind)}, {"path", s.path}, {"time_offset", s.time_offset}};
}

json to_json(const SegmentationConfig& c) {
    return {{"penalty_beta", c.penalty_beta},
            {"bin_width", c.bin_width},
            {"gap_threshold", c.gap_threshold},
            {"similarity_threshold", c.similarity_threshold},
            {"min_segment_bins", c.min_segment_bins},
            {"signal_kind", to_string(c.signal_kind)}};
}

json to_json(const AnalysisConfig& c) {
    return {{"dispersion_threshold", c.dispersion_threshold},
            {"min_fixation_duration", c.min_fixation_duration},
            {"background_alpha", c.background_alpha},
            {"background_threshold", c.background_threshold},
            {"landmark_tolerance", c.landmark_tolerance},
            {"heatmap_width", c.heatmap_width},
            {"heatmap_height", c.heatmap_height},
            {"heatmap_sigma", c.heatmap_sigma}};
}

json to_json(const TopicSegment& s) {
    return {{"id", s.id},
            {"span", to_json(s.span)},
            {"title", s.title},
            {"origin", s.origin == SegmentOrigin::initial ? "initial" : "refined"},
            {"marked", s.marked}};
}

json to_json(const Quote& q) { return {{"utterance_id", q.utterance_id}, {"rendered", q.rendered}}; }

json to_json(const PixelRect& r) {
    return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

json to_json(const Screenshot& s) {
    json j{{"image_path", s.image_path}, {"crop", to_json(s.crop)}};
    if (s.heatmap_overlay) {
        j["heatmap_overlay"] = {{"kind", to_string(s.heatmap_overlay->kind)},
                                {"span", to_json(s.heatmap_overlay->span)}};
    }
    return j;
}

json to_json(const CardStats& s) {
    return {{"speaking_by_role", s.speaking_by_role},
            {"attention_by_aoi", s.attention_by_aoi},
            {"activity_by_aoi", s.activity_by_aoi}};
}

json to_json(const TopicCard& c) {
    json quotes = json::array();
    for (const auto& q : c.quotes) quotes.push_back(to_json(q));
    json shots = json::array();
    for (const auto& s : c.screenshots) shots.push_back(to_json(s));
    return {{"segment_id", c.segment_id},
            {"title", c.title},
            {"title_source", to_string(c.title_source)},
            {"quotes", quotes},
            {"notes", c.notes},
            {"screenshots", shots},
            {"stats", to_json(c.stats)},
            {"marked", c.marked}};
}

json to_json(const Mutation& m) {
    return {{"seq", m.seq}, {"kind", m.kind}, {"target", m.target}, {"payload", m.payload}};
}

json to_json(const AuthoringState& a) {
    json segs = json::array();
    for (const auto& s : a.segments) segs.push_back(to_json(s));
    json cards = json::array();
    for (const auto& c : a.cards) cards.push_back(to_json(c));
    json log = json::array();
    for (const auto& m : a.log) log.push_back(to_json(m));
    return {{"version", a.version}, {"segments", segs}, {"cards", cards}, {"log", log}};
}

json to_json(const WorkshopProject& p) {
    json parts = json::array();
    for (const auto& x : p.participants) parts.push_back(to_json(x));
    json roles = json::array();
    for (const auto& x : p.roles) roles.push_back(to_json(x));
    json aois = json::array();
    for (const auto& x : p.aois) aois.push_back(to_json(x));
    json sources = json::array();
    for (const auto& x : p.sources) sources.push_back(to_json(x));
    return {{"version", kManifestVersion},
            {"id", p.id},
            {"title", p.title},
            {"session_start", p.session_start},
            {"duration", p.duration},
            {"participants", parts},
            {"roles", roles},
            {"aois", aois},
            {"sources", sources},
            {"segmentation_config", to_json(p.segmentation_config)},
            {"analysis_config", to_json(p.analysis_config)},
            {"authoring", to_json(p.authoring)}};
}

// ---------------------------------------------------------------------------

TimeSpan time_span_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    TimeSpan s{r.number("start"), r.number("end")};
    r.finish();
    return s;
}

TopicSegment segment_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    TopicSegment s;
    s.id = r.string("id");
    s.span = time_span_from_json(r.required("span"), r.field("span"));
    s.title = r.optional("title") ? r.string("title") : std::string{};
    if (r.optional("origin")) {
        const auto origin = r.string("origin");
        if (origin == "initial") {
            s.origin = SegmentOrigin::initial;
        } else if (origin == "refined") {
            s.origin = SegmentOrigin::refined;
        } else {
            throw ValidationError("origin must be initial or refined", r.field("origin"));
        }
    }
    s.marked = r.boolean_or("marked", false);
    r.finish();
    return s;
}

PixelRect pixel_rect_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    PixelRect rect{static_cast<int>(r.integer("x")), static_cast<int>(r.integer("y")),
                   static_cast<int>(r.integer("width")), static_cast<int>(r.integer("height"))};
    r.finish();
    return rect;
}

Screenshot screenshot_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    Screenshot s;
    s.image_path = r.string("image_path");
    s.crop = pixel_rect_from_json(r.required("crop"), r.field("crop"));
    if (const json* o = r.optional("heatmap_overlay")) {
        ObjectReader ro(*o, r.field("heatmap_overlay"));
        const auto kind = ro.string("kind");
        auto parsed = parse_signal_kind(kind);
        if (!parsed) throw ValidationError("overlay kind must be attention or activity", ro.field("kind"));
        s.heatmap_overlay = HeatmapOverlay{*parsed, time_span_from_json(ro.required("span"), ro.field("span"))};
        ro.finish();
    }
    r.finish();
    return s;
}

CardStats card_stats_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    CardStats s;
    if (auto* v = r.optional("speaking_by_role")) s.speaking_by_role = number_map_from_json(*v, r.field("speaking_by_role"));
    if (auto* v = r.optional("attention_by_aoi")) s.attention_by_aoi = number_map_from_json(*v, r.field("attention_by_aoi"));
    if (auto* v = r.optional("activity_by_aoi")) s.activity_by_aoi = number_map_from_json(*v, r.field("activity_by_aoi"));
    r.finish();
    return s;
}

TopicCard card_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    TopicCard c;
    c.segment_id = r.string("segment_id");
    c.title = r.optional("title") ? r.string("title") : std::string{};
    if (r.optional("title_source")) {
        const auto src = r.string("title_source");
        auto parsed = parse_title_source(src);
        if (!parsed) throw ValidationError("unknown title_source '" + src + "'", r.field("title_source"));
        c.title_source = *parsed;
    }
    if (auto* v = r.optional("quotes")) {
        require_array(*v, r.field("quotes"));
        for (std::size_t i = 0; i < v->size(); ++i) c.quotes.push_back(quote_from_json((*v)[i], index_path(r.field("quotes"), i)));
    }
    if (auto* v = r.optional("notes")) {
        require_array(*v, r.field("notes"));
        for (std::size_t i = 0; i < v->size(); ++i) c.notes.push_back(json_string((*v)[i], index_path(r.field("notes"), i)));
    }
    if (auto* v = r.optional("screenshots")) {
        require_array(*v, r.field("screenshots"));
        for (std::size_t i = 0; i < v->size(); ++i) {
            c.screenshots.push_back(screenshot_from_json((*v)[i], index_path(r.field("screenshots"), i)));
        }
    }
    if (auto* v = r.optional("stats")) c.stats = card_stats_from_json(*v, r.field("stats"));
    c.marked = r.boolean_or("marked", false);
    r.finish();
    return c;
}

AuthoringState authoring_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    AuthoringState a;
    if (r.optional("version")) {
        const auto v = r.integer("version");
        if (v < 0) throw ValidationError("version must be non-negative", r.field("version"));
        a.version = static_cast<std::uint64_t>(v);
    }
    if (auto* v = r.optional("segments")) {
        require_array(*v, r.field("segments"));
        for (std::size_t i = 0; i < v->size(); ++i) a.segments.push_back(segment_from_json((*v)[i], index_path(r.field("segments"), i)));
    }
    if (auto* v = r.optional("cards")) {
        require_array(*v, r.field("cards"));
        for (std::size_t i = 0; i < v->size(); ++i) a.cards.push_back(card_from_json((*v)[i], index_path(r.field("cards"), i)));
    }
    if (auto* v = r.optional("log")) {
        require_array(*v, r.field("log"));
        for (std::size_t i = 0; i < v->size(); ++i) a.log.push_back(mutation_from_json((*v)[i], index_path(r.field("log"), i)));
    }
    r.finish();
    return a;
}

WorkshopProject project_from_json(const json& j) {
    ObjectReader r(j, "");
    const auto version = r.integer("version");
    if (version != kManifestVersion) {
        throw ValidationError("unsupported manifest version " + std::to_string(version), "version");
    }
    WorkshopProject p;
    p.id = r.string("id");
    p.title = r.string("title");
    p.session_start = r.string("session_start");
    p.duration = r.number("duration");

    auto read_list = [&](const std::string& key, auto&& decode, auto& out) {
        const json* v = r.optional(key);
        if (!v) return;
        require_array(*v, key);
        for (std::size_t i = 0; i < v->size(); ++i) out.push_back(decode((*v)[i], index_path(key, i)));
    };
    read_list("participants", participant_from_json, p.participants);
    read_list("roles", role_from_json, p.roles);
    read_list("aois", aoi_from_json, p.aois);
    read_list("sources", source_from_json, p.sources);
    if (auto* v = r.optional("segmentation_config")) p.segmentation_config = segmentation_config_from_json(*v, "segmentation_config");
    if (auto* v = r.optional("analysis_config")) p.analysis_config = analysis_config_from_json(*v, "analysis_config");
    if (auto* v = r.optional("authoring")) p.authoring = authoring_from_json(*v, "authoring");
    r.finish();
    return p;
}

}  // namespace recapit
