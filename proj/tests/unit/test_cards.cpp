#include <doctest.h>

#include <random>
#include <regex>

#include "oracles.hpp"
#include "recapit/cards.hpp"
#include "recapit/error.hpp"
#include "recapit/image.hpp"
#include "recapit/project_io.hpp"
#include "test_support.hpp"

using namespace recapit;

namespace {

std::vector<TopicSegment> even_segments(std::size_t n, double duration) {
    std::vector<TopicSegment> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({"seg-00" + std::to_string(i + 1),
                       {duration * i / n, i + 1 == n ? duration : duration * (i + 1) / n},
                       "Topic " + std::to_string(i + 1),
                       SegmentOrigin::initial,
                       false});
    }
    return out;
}

std::vector<TopicCard> cards_for(const std::vector<TopicSegment>& segs) {
    std::vector<TopicCard> out;
    for (const auto& s : segs) {
        TopicCard c;
        c.segment_id = s.id;
        c.title = s.title;
        out.push_back(c);
    }
    return out;
}

WorkshopProject authored_project(std::size_t n) {
    auto p = testing::small_project();
    const auto segs = even_segments(n, p.duration);
    p.authoring = set_segments(p.authoring, segs, cards_for(segs));
    return p;
}

// Prefix of a vocabulary word with its case scrambled.
std::string key_from(const std::string& word, std::mt19937& rng) {
    std::string k = word.substr(0, 3 + rng() % (word.size() - 2));
    for (auto& c : k) c = rng() % 2 ? static_cast<char>(std::toupper(c)) : static_cast<char>(std::tolower(c));
    return k;
}

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("card statistics examples") {
    const auto p = testing::small_project();
    const std::vector<Utterance> utts{{"u1", "p1", {0, 10}, "hi"}};
    std::map<std::string, std::vector<ScarfInterval>> scarfs;
    scarfs["p1"] = {{"p1", {0, 10}, "board"}};
    scarfs["p2"] = {{"p2", {0, 10}, "board"}};
    const auto stats = card_statistics({0, 10}, utts, p.participants, p.roles, scarfs, 2, p.aoi_ids(), nullptr);
    CHECK(stats.speaking_by_role.at("facilitator") == 1.0);
    CHECK(stats.speaking_by_role.at("participant") == 0.0);
    CHECK(stats.attention_by_aoi.at("board") == 1.0);
    CHECK(stats.activity_by_aoi.at("board") == 0.0);
    CHECK(donut_shares(stats.speaking_by_role) == std::map<std::string, double>{{"facilitator", 1.0}});
    CHECK_THROWS_AS(card_statistics({5, 5}, utts, p.participants, p.roles, scarfs, 2, p.aoi_ids(), nullptr),
                    ValidationError);
}

TEST_CASE("card statistics match interval arithmetic") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto p = testing::small_project();
    const auto aois = p.aoi_ids();
    for (int round = 0; round < 50; ++round) {
        std::vector<Utterance> utts;
        for (int k = 0; k < 20; ++k) {
            const double s = 60 * u(rng);
            utts.push_back({"u" + std::to_string(k), k % 3 ? "p1" : "p2", {s, s + 5 * u(rng) + 0.1}, "w"});
        }
        std::map<std::string, std::vector<ScarfInterval>> scarfs;
        for (const auto& part : p.participants) {
            double t = 0;
            while (t < 60) {
                const double e = std::min(60.0, t + 4 * u(rng));
                const auto pick = rng() % 4;
                scarfs[part.id].push_back({part.id, {t, e}, pick < 3 ? std::optional(aois[pick]) : std::nullopt});
                t = e;
            }
        }
        MultivariateSeries activity;
        activity.aoi_ids = aois;
        for (int t = 0; t < 60; ++t) {
            for (std::size_t m = 0; m < aois.size(); ++m) activity.values.push_back(u(rng));
        }
        const double a = 50 * u(rng), b = a + 1 + 9 * u(rng);
        const auto stats = card_statistics({a, b}, utts, p.participants, p.roles, scarfs, 2, aois, &activity);

        double fac = 0, par = 0;
        for (const auto& x : utts) (x.speaker_id == "p1" ? fac : par) += oracle::intersect(x.span.start, x.span.end, a, b);
        CHECK(std::abs(stats.speaking_by_role.at("facilitator") - fac / (b - a)) < 1e-9);
        CHECK(std::abs(stats.speaking_by_role.at("participant") - par / (b - a)) < 1e-9);
        for (std::size_t m = 0; m < aois.size(); ++m) {
            double dwell = 0;
            for (const auto& [_, track] : scarfs) {
                for (const auto& iv : track) {
                    if (iv.aoi_id == aois[m]) dwell += oracle::intersect(iv.span.start, iv.span.end, a, b);
                }
            }
            CHECK(std::abs(stats.attention_by_aoi.at(aois[m]) - dwell / ((b - a) * 2)) < 1e-9);
            double num = 0, den = 0;
            for (int t = 0; t < 60; ++t) {
                const double w = oracle::intersect(t, t + 1, a, b);
                num += w * activity.at(t, m);
                den += w;
            }
            CHECK(std::abs(stats.activity_by_aoi.at(aois[m]) - num / den) < 1e-9);
        }
        const auto shares = donut_shares(stats.speaking_by_role);
        double total = 0;
        for (const auto& [_, v] : shares) total += v;
        if (!shares.empty()) CHECK(total == doctest::Approx(1.0));
    }
}

TEST_CASE("quotes") {
    const TopicSegment seg{"seg-001", {0, 10}, "t", SegmentOrigin::initial, false};
    TopicCard card;
    card.segment_id = seg.id;
    const Utterance u7{"u7", "p1", {2, 4}, "we need a legend"};
    card = add_quote(card, seg, u7);
    REQUIRE(card.quotes.size() == 1);
    CHECK(card.quotes[0].rendered == "u7: _we need a legend_");
    CHECK(add_quote(card, seg, u7).quotes.size() == 1);
    CHECK_THROWS_AS(add_quote(card, seg, Utterance{"u9", "p1", {12, 14}, "later"}), ValidationError);
}

TEST_CASE("keyword search") {
    const auto segs = even_segments(2, 20);
    const std::vector<Utterance> utts{{"u1", "p1", {1, 2}, "The Segmentation looks right"},
                                      {"u2", "p1", {12, 13}, "colours and legends"}};
    CHECK(keyword_filter(segs, utts, std::vector<std::string>{"segment"}) == std::vector<std::string>{"seg-001"});
    CHECK(keyword_filter(segs, utts, std::vector<std::string>{"gaze"}).empty());
    CHECK(keyword_filter(segs, utts, std::vector<std::string>{"LEGEND", "segment"}) ==
          std::vector<std::string>{"seg-001", "seg-002"});
    CHECK_THROWS_AS(keyword_filter(segs, utts, std::vector<std::string>{}), ValidationError);
    CHECK_THROWS_AS(keyword_filter(segs, utts, std::vector<std::string>{""}), ValidationError);
}

TEST_CASE("keyword search equals a naive scan and is monotone") {
    std::mt19937 rng(4);
    const std::vector<std::string> vocab{"Segment", "segmentation", "GAZE", "board", "Map", "legend", "idea"};
    for (int round = 0; round < 100; ++round) {
        const auto segs = even_segments(1 + rng() % 6, 60);
        std::vector<Utterance> utts;
        for (int k = 0; k < 15; ++k) {
            const double s = (rng() % 580) / 10.0;
            std::string t;
            for (int w = 0; w < 3; ++w) t += vocab[rng() % vocab.size()] + " ";
            utts.push_back({"u" + std::to_string(k), "p1", {s, s + 1.5}, t});
        }
        std::vector<std::string> keys{key_from(vocab[rng() % vocab.size()], rng)};
        const auto first = keyword_filter(segs, utts, keys);
        CHECK(first == oracle::keyword_scan(segs, utts, keys));
        keys.push_back("ide");
        const auto more = keyword_filter(segs, utts, keys);
        CHECK(more == oracle::keyword_scan(segs, utts, keys));
        for (const auto& id : first) CHECK(std::find(more.begin(), more.end(), id) != more.end());
    }
}

TEST_CASE("compressed view keeps marked segments in order") {
    auto segs = even_segments(6, 60);
    CHECK(compress_view(segs).empty());
    segs[1].marked = segs[4].marked = true;
    const auto view = compress_view(segs);
    REQUIRE(view.size() == 2);
    CHECK(view[0].id == "seg-002");
    CHECK(view[1].id == "seg-005");

    std::mt19937 rng(5);
    for (int round = 0; round < 50; ++round) {
        for (auto& s : segs) s.marked = rng() % 2;
        std::vector<std::string> all, picked;
        for (const auto& s : segs) all.push_back(s.id);
        for (const auto& s : compress_view(segs)) picked.push_back(s.id);
        CHECK(oracle::is_subsequence(picked, all));
        CHECK(picked.size() == static_cast<std::size_t>(std::count_if(segs.begin(), segs.end(), [](const auto& s) { return s.marked; })));
    }
}

TEST_CASE("authoring changes replay from the log") {
    auto p = authored_project(3);
    const Utterance u{"u1", "p1", {1, 2}, "quote me"};
    auto s = p.authoring;
    s = set_title(s, "seg-002", "From Annotation to Segmentation");
    s = add_quote(s, "seg-001", u);
    s = add_quote(s, "seg-001", u);
    s = add_note(s, "seg-003", "follow up");
    s = set_mark(s, "seg-001", true);
    s = set_stats(s, {{"seg-002", CardStats{{{"facilitator", 0.5}}, {}, {}}}});
    CHECK(s.version == 7);
    CHECK(s.log.size() == 7);
    CHECK(find_card(s, "seg-002")->title_source == TitleSource::user);
    CHECK(find_segment(s, "seg-002")->title == "From Annotation to Segmentation");
    CHECK(find_card(s, "seg-001")->quotes.size() == 1);
    CHECK(find_segment(s, "seg-001")->marked);
    CHECK(replay(s.log) == s);
    // the earlier snapshot is untouched
    CHECK(p.authoring.version == 1);
    CHECK_FALSE(find_card(p.authoring, "seg-001")->marked);

    CHECK_THROWS_AS(set_mark(s, "seg-404", true), NotFoundError);
    CHECK_THROWS_AS(set_title(s, "seg-001", "   "), ValidationError);
    CHECK_THROWS_AS(add_quote(s, "seg-003", u), ValidationError);
    auto bad = s.log.back();
    CHECK_THROWS_AS(apply_mutation(s, bad), ValidationError);
}

TEST_CASE("screenshot crops must fit the image") {
    auto s = authored_project(2).authoring;
    const Screenshot shot{"frames/f.pgm", {10, 10, 20, 20}, std::nullopt};
    CHECK(add_screenshot(s, "seg-001", shot, {48, 32}).cards[0].screenshots.size() == 1);
    CHECK_THROWS_AS(add_screenshot(s, "seg-001", shot, {25, 32}), ValidationError);
    CHECK_THROWS_AS(add_screenshot(s, "seg-001", Screenshot{"f.pgm", {0, 0, 0, 5}, std::nullopt}, {48, 32}),
                    ValidationError);
}

TEST_CASE("report contents") {
    testing::TempDir dir;
    GrayImage frame{8, 6, std::vector<std::uint8_t>(48, 128)};
    write_file_atomic(dir / "frame.pgm", encode_pgm(frame));

    auto p = authored_project(3);
    ReportOptions options;
    options.generated_at = "2024-05-01T12:00:00Z";
    CHECK_THROWS_AS(render_report(p, dir.path(), options), ValidationError);

    auto& s = p.authoring;
    s = set_mark(s, "seg-002", true);
    s = add_quote(s, "seg-002", Utterance{"u3", "p1", {21, 22}, "first <quote>"});
    s = add_quote(s, "seg-002", Utterance{"u4", "p2", {23, 24}, "second"});
    s = add_screenshot(s, "seg-002", Screenshot{"frame.pgm", {1, 1, 4, 3}, std::nullopt}, {8, 6});
    const auto html = render_report(p, dir.path(), options);
    CHECK(count(html, "<section") == 1);
    CHECK(count(html, "<li class=\"quote\">") == 2);
    CHECK(html.find("first &lt;quote&gt;") != std::string::npos);
    CHECK(html.find("\nGenerated 2024-05-01T12:00:00Z\n") != std::string::npos);
    CHECK(count(html, "data:image/png;base64,") == 1);

    std::mt19937 rng(6);
    for (int round = 0; round < 20; ++round) {
        auto q = authored_project(6);
        std::vector<int> picks;
        for (int i = 0; i < 6; ++i) {
            if (rng() % 2) picks.push_back(i);
        }
        if (picks.empty()) continue;
        std::vector<std::string> marked;
        for (int i : picks) marked.push_back("seg-00" + std::to_string(i + 1));
        std::shuffle(picks.begin(), picks.end(), rng);
        for (int i : picks) q.authoring = set_mark(q.authoring, "seg-00" + std::to_string(i + 1), true);
        const auto out = render_report(q, dir.path(), options);
        std::vector<std::string> order;
        const std::regex section("<section id=\"([^\"]+)\">");
        for (auto it = std::sregex_iterator(out.begin(), out.end(), section); it != std::sregex_iterator(); ++it) {
            order.push_back((*it)[1]);
        }
        CHECK(order == marked);
    }

    export_report(p, dir.path(), dir / "report.html", options);
    CHECK(read_file(dir / "report.html") == html);
}
