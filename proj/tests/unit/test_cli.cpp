#include <doctest.h>

#include "recapit/cards.hpp"
#include "recapit/json_codec.hpp"
#include "recapit/project_io.hpp"
#include "test_support.hpp"

using namespace recapit;
namespace fs = std::filesystem;

TEST_CASE("validate accepts the fixture") {
    const auto r = testing::run({"validate", "--project", testing::fixture_dir().string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("3 participants") != std::string::npos);
}

TEST_CASE("usage errors exit 64") {
    CHECK(testing::run({"frobnicate"}).code == kExitUsage);
    CHECK(testing::run({"validate"}).code == kExitUsage);
    CHECK(testing::run({"segment", "--project", ".", "--beta", "-1"}).code == kExitUsage);
    CHECK(testing::run({"segment", "--project", ".", "--signal", "smell"}).code == kExitUsage);
    CHECK(testing::run({}).code == kExitUsage);
}

TEST_CASE("missing files exit 2 and invalid manifests exit 1") {
    testing::TempDir dir;
    CHECK(testing::run({"validate", "--project", dir.path().string()}).code == kExitIo);
    write_file_atomic(dir / "project.json", "{\"id\": 3}");
    const auto r = testing::run({"validate", "--project", dir.path().string()});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("error:") == 0);
}

TEST_CASE("the pipeline commands write their outputs") {
    testing::TempDir dir;
    const auto project = dir / "workshop";
    testing::copy_fixture(project);
    const auto p = project.string();

    CHECK(testing::run({"stats", "--project", p}).code == kExitValidation);

    auto r = testing::run({"ingest", "--project", p});
    REQUIRE(r.code == kExitOk);
    for (const auto* f : {"utterances.jsonl", "fixations.csv", "scarf.csv", "note_events.jsonl"}) {
        CHECK(fs::exists(project / "derived" / f));
    }

    r = testing::run({"segment", "--project", p, "--beta", "10", "--signal", "attention"});
    REQUIRE(r.code == kExitOk);
    const auto segments = nlohmann::json::parse(read_file(project / "derived" / "segments.json"));
    CHECK(segments.size() >= 1);
    CHECK(fs::exists(project / "derived" / "changepoints.json"));
    CHECK(fs::exists(project / "derived" / "chunks.jsonl"));
    const auto loaded = load_project(project);
    CHECK(loaded.segmentation_config.penalty_beta == 10.0);
    CHECK(loaded.authoring.segments.size() == segments.size());

    const auto other = dir / "elsewhere";
    r = testing::run({"stats", "--project", p, "--out", other.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(fs::exists(other / "attention.csv"));
    CHECK(fs::exists(other / "activity.csv"));
    CHECK(fs::exists(other / "card_stats.json"));
    CHECK(fs::exists(other / "heatmaps" / "seg-001_attention.pgm"));

    r = testing::run({"export", "--project", p});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("no marked cards") != std::string::npos);

    auto marked = load_project(project);
    marked.authoring = set_mark(marked.authoring, "seg-001", true);
    save_project(marked, manifest_path(project));
    r = testing::run({"export", "--project", p, "--output", (dir / "out" / "r.html").string()});
    CHECK(r.code == kExitOk);
    CHECK(read_file(dir / "out" / "r.html").find("<section id=\"seg-001\">") != std::string::npos);
}

TEST_CASE("segmenting again keeps user edits on unchanged segments") {
    testing::TempDir dir;
    const auto project = dir / "workshop";
    testing::copy_fixture(project);
    const auto p = project.string();
    REQUIRE(testing::run({"segment", "--project", p}).code == kExitOk);
    auto edited = load_project(project);
    const auto id = edited.authoring.segments.front().id;
    edited.authoring = set_title(edited.authoring, id, "Kick-off");
    edited.authoring = set_mark(edited.authoring, id, true);
    save_project(edited, manifest_path(project));

    REQUIRE(testing::run({"segment", "--project", p}).code == kExitOk);
    const auto again = load_project(project);
    const auto* card = find_card(again.authoring, id);
    REQUIRE(card);
    CHECK(card->title == "Kick-off");
    CHECK(card->title_source == TitleSource::user);
    CHECK(card->marked);
    CHECK(find_segment(again.authoring, id)->title == "Kick-off");
    CHECK(replay(again.authoring.log) == again.authoring);
}
