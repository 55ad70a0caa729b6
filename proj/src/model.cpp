#include "recapit/model.hpp"

#include "recapit/error.hpp"
#include "recapit/time.hpp"

namespace recapit {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::invalid_input: return "invalid_input";
        case ErrorCode::conflict: return "conflict";
        case ErrorCode::io: return "io";
    }
    return "io";
}

const char* to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::transcript: return "transcript";
        case SourceKind::gaze: return "gaze";
        case SourceKind::frames: return "frames";
        case SourceKind::landmarks: return "landmarks";
        case SourceKind::notes: return "notes";
        case SourceKind::embeddings: return "embeddings";
    }
    return "transcript";
}

std::optional<SourceKind> parse_source_kind(std::string_view text) {
    for (auto k : {SourceKind::transcript, SourceKind::gaze, SourceKind::frames, SourceKind::landmarks,
                   SourceKind::notes, SourceKind::embeddings}) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

const char* to_string(SignalKind kind) {
    return kind == SignalKind::attention ? "attention" : "activity";
}

std::optional<SignalKind> parse_signal_kind(std::string_view text) {
    if (text == "attention") return SignalKind::attention;
    if (text == "activity") return SignalKind::activity;
    return std::nullopt;
}

const char* to_string(TitleSource source) {
    switch (source) {
        case TitleSource::generated: return "generated";
        case TitleSource::fallback: return "fallback";
        case TitleSource::user: return "user";
    }
    return "fallback";
}

std::optional<TitleSource> parse_title_source(std::string_view text) {
    for (auto s : {TitleSource::generated, TitleSource::fallback, TitleSource::user}) {
        if (text == to_string(s)) return s;
    }
    return std::nullopt;
}

double WorkshopProject::session_start_epoch() const {
    auto t = parse_iso8601(session_start);
    if (!t) throw ValidationError("session_start is not an ISO 8601 timestamp", "session_start");
    return *t;
}

const SourceDescriptor* WorkshopProject::source(SourceKind kind) const {
    for (const auto& s : sources) {
        if (s.kind == kind) return &s;
    }
    return nullptr;
}

const Participant* WorkshopProject::participant(std::string_view pid) const {
    for (const auto& p : participants) {
        if (p.id == pid) return &p;
    }
    return nullptr;
}

const Role* WorkshopProject::role(std::string_view rid) const {
    for (const auto& r : roles) {
        if (r.id == rid) return &r;
    }
    return nullptr;
}

std::vector<std::string> WorkshopProject::aoi_ids() const {
    std::vector<std::string> ids;
    ids.reserve(aois.size());
    for (const auto& a : aois) ids.push_back(a.id);
    return ids;
}

}  // namespace recapit
