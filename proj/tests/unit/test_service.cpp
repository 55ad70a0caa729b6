#include <doctest.h>

#include <atomic>
#include <thread>

#include "recapit/json_codec.hpp"
#include "recapit/project_io.hpp"
#include "recapit/service.hpp"
#include "recapit/text.hpp"
#include "test_support.hpp"

using namespace recapit;
using nlohmann::json;

namespace {

struct Prepared {
    testing::TempDir dir;
    std::filesystem::path project;

    Prepared() : project(dir / "workshop") {
        testing::copy_fixture(project);
        REQUIRE(testing::run({"segment", "--project", project.string()}).code == kExitOk);
    }
};

json get(Service& s, const std::string& path, std::map<std::string, std::string> query = {}) {
    const auto r = s.handle("GET", path, query, "");
    REQUIRE(r.status == 200);
    return json::parse(r.body);
}

int status(Service& s, const std::string& method, const std::string& path, const std::string& body = "",
           std::map<std::string, std::string> query = {}) {
    return s.handle(method, path, query, body).status;
}

}  // namespace

TEST_CASE("segments and cards are listed in temporal order") {
    Prepared p;
    Service s(p.project);
    const auto segments = get(s, "/segments");
    REQUIRE(segments.size() >= 2);
    const auto& saved = load_project(p.project).authoring.segments;
    CHECK(segments.size() == saved.size());
    for (std::size_t i = 1; i < segments.size(); ++i) {
        CHECK(segments[i - 1]["span"]["end"].get<double>() == segments[i]["span"]["start"].get<double>());
    }
    CHECK(segments[0]["id"] == "seg-001");
    CHECK(get(s, "/cards").size() == segments.size());
    CHECK(get(s, "/segments/seg-001")["id"] == "seg-001");
    CHECK(get(s, "/cards/seg-001")["segment_id"] == "seg-001");
    CHECK(get(s, "/project")["id"] == load_project(p.project).id);
    CHECK(get(s, "/compressed").size() <= segments.size());
}

TEST_CASE("mutations persist across service instances") {
    Prepared p;
    {
        Service s(p.project);
        const auto r = s.handle("POST", "/cards/seg-001/mark", {}, R"({"marked": true})");
        REQUIRE(r.status == 200);
        const auto body = json::parse(r.body);
        CHECK(body["card"]["marked"] == true);
        CHECK(get(s, "/cards/seg-001")["marked"] == true);
        REQUIRE(status(s, "POST", "/segments/seg-001/title", R"({"title": "Warm-up"})") == 200);
        REQUIRE(status(s, "POST", "/cards/seg-001/notes", R"({"text": "follow up on colors"})") == 200);
    }
    Service again(p.project);
    const auto card = get(again, "/cards/seg-001");
    CHECK(card["marked"] == true);
    CHECK(card["title"] == "Warm-up");
    CHECK(card["notes"].size() == 1);
    CHECK(get(again, "/segments/seg-001")["title"] == "Warm-up");
    const auto state = again.snapshot().authoring;
    CHECK(replay(state.log) == state);
}

TEST_CASE("quotes come from the segment's utterances") {
    Prepared p;
    Service s(p.project);
    const auto seg = get(s, "/segments/seg-001");
    const auto utterances =
        get(s, "/utterances", {{"from", std::to_string(seg["span"]["start"].get<double>())},
                               {"to", std::to_string(seg["span"]["end"].get<double>())}});
    REQUIRE(!utterances.empty());
    const auto uid = utterances[0]["id"].get<std::string>();
    REQUIRE(status(s, "POST", "/cards/seg-001/quotes", json{{"utterance_id", uid}}.dump()) == 200);
    const auto quotes = get(s, "/cards/seg-001")["quotes"];
    REQUIRE(quotes.size() == 1);
    CHECK(quotes[0]["utterance_id"] == uid);
    CHECK(quotes[0]["rendered"].get<std::string>().rfind(uid, 0) == 0);
    CHECK(status(s, "POST", "/cards/seg-001/quotes", R"({"utterance_id": "nope"})") == 404);
}

TEST_CASE("search matches the library keyword filter") {
    Prepared p;
    Service s(p.project);
    const auto project = load_project(p.project);
    const auto session = load_session(project, project_root(p.project));
    for (const std::string q : {"segment", "board", "board,color", "zebra"}) {
        std::vector<std::string> keys;
        for (auto k : text::split(q, ',')) keys.emplace_back(k);
        const auto expected = keyword_filter(project.authoring.segments, session.utterances, keys);
        CHECK(get(s, "/search", {{"q", q}}).get<std::vector<std::string>>() == expected);
    }
}

TEST_CASE("error statuses") {
    Prepared p;
    Service s(p.project);
    CHECK(status(s, "GET", "/nothing") == 404);
    CHECK(status(s, "GET", "/") == 404);
    CHECK(status(s, "GET", "/segments/seg-999") == 404);
    CHECK(status(s, "GET", "/cards/seg-999") == 404);
    CHECK(status(s, "POST", "/cards/seg-999/mark", R"({"marked": true})") == 404);
    CHECK(status(s, "GET", "/heatmap") == 400);
    CHECK(status(s, "GET", "/heatmap", "", {{"segment", "seg-001"}, {"kind", "smell"}}) == 400);
    CHECK(status(s, "GET", "/utterances", "", {{"from", "abc"}}) == 400);
    CHECK(status(s, "GET", "/utterances", "", {{"from", "10"}, {"to", "5"}}) == 400);
    CHECK(status(s, "GET", "/search") == 400);
    CHECK(status(s, "POST", "/cards/seg-001/mark", "{not json") == 400);
    CHECK(status(s, "POST", "/cards/seg-001/mark", R"({"marked": "yes"})") == 400);
    CHECK(status(s, "POST", "/cards/seg-001/mark", R"({"marked": true, "extra": 1})") == 400);
    CHECK(status(s, "POST", "/segments/seg-001/title", R"({"title": ""})") == 400);
    CHECK(status(s, "DELETE", "/cards/seg-001") == 405);

    const auto r = json::parse(s.handle("GET", "/segments/seg-999", {}, "").body);
    CHECK(r["error"]["code"] == "not_found");
    CHECK(r["error"]["detail"] == "seg-999");

    const auto version = s.snapshot().authoring.version;
    CHECK(status(s, "POST", "/cards/seg-001/mark", json{{"marked", true}, {"base_version", version + 5}}.dump()) == 409);
    CHECK(s.snapshot().authoring.version == version);
    CHECK(status(s, "POST", "/cards/seg-001/mark", json{{"marked", true}, {"base_version", version}}.dump()) == 200);
    CHECK(s.snapshot().authoring.version == version + 1);
    CHECK(status(s, "POST", "/cards/seg-001/mark", json{{"marked", false}, {"base_version", version}}.dump()) == 409);
}

TEST_CASE("visualization endpoints") {
    Prepared p;
    Service s(p.project);
    const auto project = s.snapshot();

    const auto heat = get(s, "/heatmap", {{"segment", "seg-001"}});
    CHECK(heat["width"].get<int>() > 0);
    CHECK(heat["values"].size() == heat["width"].get<std::size_t>() * heat["height"].get<std::size_t>());
    CHECK(get(s, "/heatmap", {{"segment", "seg-001"}}) == heat);
    CHECK(get(s, "/heatmap", {{"segment", "seg-001"}, {"kind", "activity"}})["width"].get<int>() > 0);

    const auto series = get(s, "/series");
    CHECK(series["values"].size() > 0);
    CHECK(get(s, "/series", {{"kind", "activity"}})["values"].size() > 0);

    const auto scarf = get(s, "/scarf");
    CHECK(scarf.size() == project.participants.size());
    for (const auto& [pid, track] : scarf.items()) {
        REQUIRE(!track.empty());
        for (std::size_t i = 1; i < track.size(); ++i) CHECK(track[i - 1]["end"] == track[i]["start"]);
    }

    const auto all = get(s, "/utterances");
    CHECK(all.size() == 42);
    const auto early = get(s, "/utterances", {{"to", "10"}});
    CHECK(early.size() < all.size());
    for (const auto& u : early) CHECK(u["start"].get<double>() < 10);

    CHECK(get(s, "/notes").size() > 0);
    for (const auto& iv : get(s, "/shared", {{"k", "2"}})) CHECK(iv["end"].get<double>() > iv["start"].get<double>());
}

TEST_CASE("concurrent writes are serialized") {
    Prepared p;
    Service s(p.project);
    const auto before = s.snapshot().authoring.version;
    std::vector<std::thread> threads;
    std::atomic<int> ok{0};
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int k = 0; k < 5; ++k) {
                const auto body = json{{"text", "note " + std::to_string(t) + "." + std::to_string(k)}}.dump();
                if (s.handle("POST", "/cards/seg-001/notes", {}, body).status == 200) ++ok;
                s.handle("GET", "/cards/seg-001", {}, "");
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(ok == 20);
    const auto after = s.snapshot().authoring;
    CHECK(after.version == before + 20);
    CHECK(find_card(after, "seg-001")->notes.size() == 20);
    CHECK(load_project(p.project).authoring == after);
    CHECK(replay(after.log) == after);
}
