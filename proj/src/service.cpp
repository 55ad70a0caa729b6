#include "recapit/service.hpp"

#include <httplib.h>

#include "recapit/error.hpp"
#include "recapit/json_codec.hpp"
#include "recapit/project_io.hpp"
#include "recapit/text.hpp"

namespace fs = std::filesystem;

namespace recapit {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return 404;
        case ErrorCode::invalid_input: return 400;
        case ErrorCode::conflict: return 409;
        case ErrorCode::io: return 500;
    }
    return 500;
}

json error_json(const Error& e) {
    json err = {{"code", to_string(e.code())}, {"message", e.what()}};
    if (!e.detail().empty()) err["detail"] = e.detail();
    return {{"error", err}};
}

namespace {

Response ok(const json& j) { return {200, j.dump(), "application/json"}; }

std::vector<std::string> path_parts(const std::string& path) {
    std::vector<std::string> parts;
    for (auto p : text::split(path, '/')) {
        if (!p.empty()) parts.emplace_back(p);
    }
    return parts;
}

std::optional<std::string> param(const std::map<std::string, std::string>& query, const std::string& key) {
    auto it = query.find(key);
    if (it == query.end()) return std::nullopt;
    return it->second;
}

double number_param(const std::map<std::string, std::string>& query, const std::string& key, double fallback) {
    auto v = param(query, key);
    if (!v) return fallback;
    auto d = text::parse_double(*v);
    if (!d || !std::isfinite(*d)) throw ValidationError("query parameter '" + key + "' must be a number", key);
    return *d;
}

SignalKind kind_param(const std::map<std::string, std::string>& query) {
    auto v = param(query, "kind");
    if (!v) return SignalKind::attention;
    auto k = parse_signal_kind(*v);
    if (!k) throw ValidationError("kind must be attention or activity", "kind");
    return *k;
}

}  // namespace

Service::Service(const fs::path& project) : manifest_(manifest_path(project)), root_(project_root(project)) {
    project_ = load_project(manifest_);
    session_ = load_session(project_, root_);
    attention_ = attention_of(project_, session_);
    activity_ = activity_of(project_, session_);
}

WorkshopProject Service::snapshot() const {
    std::shared_lock lock(mutex_);
    return project_;
}

Response Service::handle(const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const std::string& body) {
    try {
        if (method == "GET") return get(path, query);
        if (method == "POST") {
            json j;
            try {
                j = body.empty() ? json::object() : json::parse(body);
            } catch (const json::exception& e) {
                throw ValidationError(std::string("request body is not JSON: ") + e.what(), "body");
            }
            if (!j.is_object()) throw ValidationError("request body must be a JSON object", "body");
            return post(path, j);
        }
        return {405, error_json(ValidationError("method not allowed: " + method)).dump(), "application/json"};
    } catch (const Error& e) {
        return {http_status(e.code()), error_json(e).dump(), "application/json"};
    } catch (const std::exception& e) {
        return {500, error_json(IoError(e.what())).dump(), "application/json"};
    }
}

const HeatGrid& Service::heatmap(SignalKind kind, TimeSpan span) {
    const auto key = std::make_tuple(static_cast<int>(kind), span.start, span.end);
    std::lock_guard lock(cache_mutex_);
    auto it = heat_cache_.find(key);
    if (it != heat_cache_.end()) return it->second;
    const TimeSpan spans[] = {span};
    auto grids = kind == SignalKind::attention ? attention_heatmaps(project_, session_, spans)
                                               : activity_heatmaps(project_, session_, spans);
    return heat_cache_.emplace(key, std::move(grids.front())).first->second;
}

Response Service::get(const std::string& path, const std::map<std::string, std::string>& query) {
    std::shared_lock lock(mutex_);
    const auto parts = path_parts(path);
    if (parts.empty()) throw NotFoundError("no such resource: " + path, path);
    const auto& head = parts[0];

    if (parts.size() == 1 && head == "project") return ok(to_json(project_));
    if (parts.size() == 1 && head == "segments") {
        auto j = json::array();
        for (const auto& s : project_.authoring.segments) j.push_back(to_json(s));
        return ok(j);
    }
    if (parts.size() == 2 && head == "segments") {
        const auto* s = find_segment(project_.authoring, parts[1]);
        if (!s) throw NotFoundError("no segment " + parts[1], parts[1]);
        return ok(to_json(*s));
    }
    if (parts.size() == 1 && head == "cards") {
        auto j = json::array();
        for (const auto& c : project_.authoring.cards) j.push_back(to_json(c));
        return ok(j);
    }
    if (parts.size() == 2 && head == "cards") {
        const auto* c = find_card(project_.authoring, parts[1]);
        if (!c) throw NotFoundError("no card " + parts[1], parts[1]);
        return ok(to_json(*c));
    }
    if (parts.size() == 1 && head == "compressed") {
        auto j = json::array();
        for (const auto& s : compress_view(project_.authoring.segments)) j.push_back(to_json(s));
        return ok(j);
    }
    if (parts.size() == 1 && head == "series") {
        if (kind_param(query) == SignalKind::attention) return ok(to_json(attention_));
        if (!activity_) throw NotFoundError("project has no frames source", "kind");
        return ok(to_json(*activity_));
    }
    if (parts.size() == 1 && head == "scarf") {
        auto j = json::object();
        for (const auto& [pid, track] : session_.scarfs) {
            auto arr = json::array();
            for (const auto& iv : track) arr.push_back(to_json(iv));
            j[pid] = std::move(arr);
        }
        return ok(j);
    }
    if (parts.size() == 1 && head == "shared") {
        const auto k = static_cast<std::size_t>(number_param(query, "k", 2));
        auto j = json::array();
        for (const auto& s : shared_attention_intervals(session_.scarfs, project_.participants.size(), k)) {
            j.push_back({{"start", s.span.start}, {"end", s.span.end}, {"aoi", s.aoi_id}});
        }
        return ok(j);
    }
    if (parts.size() == 1 && head == "utterances") {
        const double from = number_param(query, "from", 0.0);
        const double to = number_param(query, "to", project_.duration);
        if (from > to) throw ValidationError("from must not exceed to", "from");
        auto j = json::array();
        for (const auto& u : session_.utterances) {
            if (u.span.end > from && u.span.start < to) j.push_back(to_json(u));
        }
        return ok(j);
    }
    if (parts.size() == 1 && head == "notes") {
        auto j = json::array();
        for (const auto& e : session_.note_events) j.push_back(to_json(e));
        return ok(j);
    }
    if (parts.size() == 1 && head == "heatmap") {
        const auto id = param(query, "segment");
        if (!id) throw ValidationError("segment parameter is required", "segment");
        const auto* s = find_segment(project_.authoring, *id);
        if (!s) throw NotFoundError("no segment " + *id, *id);
        const auto kind = kind_param(query);
        if (kind == SignalKind::activity && !session_.frames) throw NotFoundError("project has no frames source", "kind");
        return ok(to_json(heatmap(kind, s->span)));
    }
    if (parts.size() == 1 && head == "search") {
        const auto q = param(query, "q");
        if (!q) throw ValidationError("q parameter is required", "q");
        std::vector<std::string> keywords;
        for (auto k : text::split(*q, ',')) keywords.emplace_back(text::trim(k));
        return ok(keyword_filter(project_.authoring.segments, session_.utterances, keywords));
    }
    throw NotFoundError("no such resource: " + path, path);
}

Response Service::post(const std::string& path, const json& body) {
    std::unique_lock lock(mutex_);
    const auto parts = path_parts(path);
    if (parts.size() != 3 || (parts[0] != "segments" && parts[0] != "cards")) {
        throw NotFoundError("no such resource: " + path, path);
    }
    const auto& id = parts[1];
    const auto& action = parts[2];

    json payload = body;
    if (auto it = payload.find("base_version"); it != payload.end()) {
        if (!it->is_number_unsigned()) throw ValidationError("base_version must be a non-negative integer", "base_version");
        const auto base = it->get<std::uint64_t>();
        if (base != project_.authoring.version) {
            throw ConflictError("project is at version " + std::to_string(project_.authoring.version) +
                                    ", request was based on " + std::to_string(base),
                                "base_version");
        }
        payload.erase(it);
    }

    AuthoringState next;
    const auto& state = project_.authoring;
    if (parts[0] == "segments" && action == "title") {
        if (!find_segment(state, id)) throw NotFoundError("no segment " + id, id);
        ObjectReader r(payload, "body");
        const auto title = r.string("title");
        r.finish();
        next = set_title(state, id, title);
    } else if (parts[0] == "cards" && action == "quotes") {
        if (!find_card(state, id)) throw NotFoundError("no card " + id, id);
        ObjectReader r(payload, "body");
        const auto uid = r.string("utterance_id");
        r.finish();
        const Utterance* u = nullptr;
        for (const auto& x : session_.utterances) {
            if (x.id == uid) u = &x;
        }
        if (!u) throw NotFoundError("no utterance " + uid, "body.utterance_id");
        next = add_quote(state, id, *u);
    } else if (parts[0] == "cards" && action == "notes") {
        if (!find_card(state, id)) throw NotFoundError("no card " + id, id);
        ObjectReader r(payload, "body");
        const auto note = r.string("text");
        r.finish();
        next = add_note(state, id, note);
    } else if (parts[0] == "cards" && action == "mark") {
        if (!find_card(state, id)) throw NotFoundError("no card " + id, id);
        ObjectReader r(payload, "body");
        const bool marked = r.boolean("marked");
        r.finish();
        next = set_mark(state, id, marked);
    } else if (parts[0] == "cards" && action == "screenshots") {
        if (!find_card(state, id)) throw NotFoundError("no card " + id, id);
        const auto shot = screenshot_from_json(payload, "body");
        auto file = fs::path(shot.image_path);
        if (file.is_relative()) file = root_ / file;
        if (!fs::is_regular_file(file)) throw NotFoundError("no image " + shot.image_path, "body.image_path");
        next = add_screenshot(state, id, shot, image_dimensions(file));
    } else {
        throw NotFoundError("no such resource: " + path, path);
    }

    auto updated = project_;
    updated.authoring = std::move(next);
    save_project(updated, manifest_);
    project_ = std::move(updated);

    json out = {{"version", project_.authoring.version}};
    if (const auto* c = find_card(project_.authoring, id)) out["card"] = to_json(*c);
    if (const auto* s = find_segment(project_.authoring, id)) out["segment"] = to_json(*s);
    return ok(out);
}

void serve(Service& service, const std::string& host, int port, const std::function<void(int)>& on_listen) {
    httplib::Server server;
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const auto r = service.handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
        res.set_header("Access-Control-Allow-Origin", "*");
    };
    server.Get(R"(/.*)", dispatch);
    server.Post(R"(/.*)", dispatch);
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    if (on_listen) on_listen(bound);
    if (!server.listen_after_bind()) throw IoError("server stopped unexpectedly");
}

}  // namespace recapit
