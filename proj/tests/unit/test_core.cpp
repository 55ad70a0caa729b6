#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "recapit/cards.hpp"
#include "recapit/error.hpp"
#include "recapit/geometry.hpp"
#include "recapit/json_codec.hpp"
#include "recapit/project_io.hpp"
#include "recapit/text.hpp"
#include "recapit/time.hpp"
#include "test_support.hpp"

using namespace recapit;

TEST_CASE("point in polygon counts the boundary as inside") {
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(point_in_polygon(square, {0.5, 0.5}));
    CHECK(point_in_polygon(square, {1.0, 0.5}));
    CHECK(point_in_polygon(square, {0.0, 0.0}));
    CHECK_FALSE(point_in_polygon(square, {1.0001, 0.5}));
    CHECK_FALSE(point_in_polygon(square, {-0.2, 0.2}));
}

TEST_CASE("point in polygon agrees with half-planes on convex polygons") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 20; ++round) {
        // Regular polygon with a random centre, radius and vertex count.
        const int n = 3 + static_cast<int>(u(rng) * 6);
        const double cx = 0.3 + 0.4 * u(rng), cy = 0.3 + 0.4 * u(rng), r = 0.1 + 0.2 * u(rng), phase = u(rng);
        std::vector<Point> poly;
        for (int k = 0; k < n; ++k) {
            const double a = phase + 2 * M_PI * k / n;
            poly.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
        }
        for (int i = 0; i < 500; ++i) {
            const Point p{u(rng), u(rng)};
            bool inside = true;
            for (int k = 0; k < n; ++k) {
                const auto& a = poly[k];
                const auto& b = poly[(k + 1) % n];
                inside = inside && ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)) >= 0;
            }
            CHECK(point_in_polygon(poly, p) == inside);
        }
    }
}

TEST_CASE("self-intersection detection") {
    const std::vector<Point> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(polygon_self_intersects(bowtie));
    CHECK_FALSE(polygon_self_intersects(square));
}

TEST_CASE("homography application") {
    const auto p = apply_homography(Homography(), {0.3, 0.7});
    CHECK(p.x == 0.3);
    CHECK(p.y == 0.7);
    const auto q = apply_homography(Homography({2, 0, 0, 0, 2, 0, 0, 0, 1}), {0.2, 0.1});
    CHECK(q.x == doctest::Approx(0.4));
    CHECK(q.y == doctest::Approx(0.2));
    CHECK_THROWS_AS(apply_homography(Homography({1, 0, 0, 0, 1, 0, 1, 0, 0.5}), {-0.5, 0.0}), ValidationError);
    CHECK_THROWS_AS(Homography({1, 2, 3, 2, 4, 6, 0, 0, 1}), ValidationError);
}

TEST_CASE("homography inverse round trip") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 200) {
        std::array<double, 9> m{};
        for (auto& v : m) v = u(rng);
        m[8] += 2.0;
        if (std::abs(m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6])) < 0.05) {
            continue;
        }
        const Homography h(m);
        const Point p{u(rng), u(rng)};
        const double hw = m[6] * p.x + m[7] * p.y + m[8];
        if (std::abs(hw) < 0.1) continue;
        const auto q = try_apply_homography(h, p);
        if (!q) continue;
        const auto back = try_apply_homography(h.inverse(), *q);
        REQUIRE(back);
        CHECK(std::abs(back->x - p.x) < 1e-9);
        CHECK(std::abs(back->y - p.y) < 1e-9);
        ++checked;
    }
}

TEST_CASE("ISO 8601 parsing accepts extended and basic forms") {
    const auto a = parse_iso8601("2024-05-01T10:00:00Z");
    const auto b = parse_iso8601("20240501T100000Z");
    const auto c = parse_iso8601("2024-05-01T12:00:00+02:00");
    const auto d = parse_iso8601("2024-05-01T10:00:00.5Z");
    REQUIRE(a);
    CHECK(*a == 1714557600.0);
    CHECK(b == a);
    CHECK(c == a);
    CHECK(*d == *a + 0.5);
    CHECK_FALSE(parse_iso8601("yesterday"));
    CHECK_FALSE(parse_iso8601("2024-13-01T00:00:00Z"));
    CHECK(format_iso8601(*a) == "2024-05-01T10:00:00Z");
    CHECK(format_clock(75) == "01:15");
    CHECK(format_clock(3725) == "1:02:05");
}

TEST_CASE("text helpers") {
    CHECK(text::trim("  a b \t") == "a b");
    CHECK(text::trim_right("  a  ") == "  a");
    CHECK(text::split("a,,b", ',').size() == 3);
    CHECK(text::lines("a\r\nb\n").size() == 2);
    CHECK(text::lines("").empty());
    CHECK(text::lower("SegMent") == "segment");
    CHECK(text::tokenize("Hello, wide-World 42!") == std::vector<std::string>{"hello", "wide", "world", "42"});
    CHECK(text::html_escape("<a & \"b\">") == "&lt;a &amp; &quot;b&quot;&gt;");
    CHECK(text::parse_double("1.5") == 1.5);
    CHECK_FALSE(text::parse_double("1.5x"));
    CHECK(text::format_double(0.1) == "0.1");
}

TEST_CASE("validation names the offending AOI") {
    auto p = testing::small_project();
    p.aois[1].polygon[0] = {1.2, 0.5};
    try {
        validate_project(p);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("screen") != std::string::npos);
        CHECK(e.detail().find("aois[1]") != std::string::npos);
    }
}

TEST_CASE("validation rejects broken references") {
    auto p = testing::small_project();
    p.participants[0].role_id = "ghost";
    CHECK_THROWS_AS(validate_project(p), ValidationError);
    p = testing::small_project();
    p.duration = 0;
    CHECK_THROWS_AS(validate_project(p), ValidationError);
    p = testing::small_project();
    p.segmentation_config.penalty_beta = -1;
    CHECK_THROWS_AS(validate_project(p), ValidationError);
}

TEST_CASE("load reports a missing source with its path") {
    testing::TempDir dir;
    auto p = testing::small_project();
    p.sources.push_back({SourceKind::gaze, "gaze", 0.0});
    write_file_atomic(dir / "project.json", to_json(p).dump());
    try {
        load_project(dir.path());
        FAIL("expected an io error");
    } catch (const IoError& e) {
        CHECK(e.detail().find("gaze") != std::string::npos);
    }
}

TEST_CASE("load of a valid manifest keeps participants and AOIs") {
    testing::TempDir dir;
    save_project(testing::small_project(), dir / "project.json");
    const auto p = load_project(dir.path());
    CHECK(p.participants.size() == 2);
    CHECK(p.aois.size() == 3);
}

TEST_CASE("unknown manifest fields are rejected with their path") {
    auto j = to_json(testing::small_project());
    j["aois"][0]["colour"] = "red";
    try {
        project_from_json(j);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.detail().find("aois[0]") != std::string::npos);
    }
}

namespace {

WorkshopProject random_authored_project(std::mt19937& rng, std::size_t segments) {
    auto p = testing::small_project();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cuts;
    for (std::size_t i = 1; i < segments; ++i) cuts.push_back(p.duration * static_cast<double>(i) / segments);
    std::vector<TopicSegment> segs;
    std::vector<TopicCard> cards;
    double start = 0;
    for (std::size_t i = 0; i < segments; ++i) {
        const double end = i + 1 < segments ? cuts[i] : p.duration;
        TopicSegment s{"seg-00" + std::to_string(i + 1), {start, end}, "Title " + std::to_string(u(rng)),
                       u(rng) < 0.5 ? SegmentOrigin::initial : SegmentOrigin::refined, false};
        TopicCard c;
        c.segment_id = s.id;
        c.title = s.title;
        c.stats.speaking_by_role["facilitator"] = u(rng);
        c.stats.attention_by_aoi["board"] = u(rng);
        segs.push_back(s);
        cards.push_back(c);
        start = end;
    }
    p.authoring = set_segments(p.authoring, segs, cards);
    p.authoring = set_mark(p.authoring, "seg-001", true);
    p.authoring = add_note(p.authoring, "seg-001", "remember \"this\"");
    return p;
}

}  // namespace

TEST_CASE("save then load is the identity") {
    std::mt19937 rng(3);
    for (int round = 0; round < 10; ++round) {
        testing::TempDir dir;
        const auto p = random_authored_project(rng, 5);
        save_project(p, dir / "project.json");
        const auto q = load_project(dir.path());
        CHECK(q == p);
        CHECK(q.authoring.segments.size() == 5);
        CHECK(q.authoring.cards[0].marked);
    }
}

TEST_CASE("an interrupted save leaves the original untouched") {
    testing::TempDir dir;
    auto p = testing::small_project();
    save_project(p, dir / "project.json");
    const auto before = read_file(dir / "project.json");
    p.title = "changed";
    CHECK_THROWS(write_file_atomic(dir / "project.json", to_json(p).dump(),
                                   [] { throw std::runtime_error("crash before rename"); }));
    CHECK(read_file(dir / "project.json") == before);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
    CHECK(files == 1);
}
