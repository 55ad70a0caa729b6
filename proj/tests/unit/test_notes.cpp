#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "recapit/error.hpp"
#include "recapit/notes.hpp"

using namespace recapit;

namespace {

using Lines = std::vector<std::string>;

std::string join(const Lines& lines) {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

Lines random_edit(std::mt19937& rng, Lines doc) {
    const int edits = static_cast<int>(rng() % 5);
    for (int e = 0; e < edits; ++e) {
        const auto op = rng() % 3;
        if (op == 0 || doc.empty()) {
            doc.insert(doc.begin() + static_cast<long>(rng() % (doc.size() + 1)), "line " + std::to_string(rng() % 8));
        } else if (op == 1) {
            doc.erase(doc.begin() + static_cast<long>(rng() % doc.size()));
        } else {
            doc[rng() % doc.size()] = "line " + std::to_string(rng() % 8);
        }
    }
    return doc;
}

}  // namespace

TEST_CASE("line diff examples") {
    CHECK(diff_snapshots("a\nb\n", "a\nb\n").empty());
    const auto add = diff_snapshots("", "a\nb");
    CHECK(add.added == Lines{"a", "b"});
    CHECK(add.removed.empty());
    const auto rm = diff_snapshots("a\nb", "b");
    CHECK(rm.removed == Lines{"a"});
    CHECK(rm.added.empty());
    CHECK(diff_snapshots("a  \nb\t", "a\nb").empty());
}

TEST_CASE("diffs are shortest edit scripts") {
    std::mt19937 rng(1);
    for (int round = 0; round < 300; ++round) {
        Lines a(rng() % 10);
        for (auto& l : a) l = "line " + std::to_string(rng() % 6);
        const auto b = random_edit(rng, a);
        const auto d = diff_lines(a, b);
        const auto lcs = oracle::lcs_length(a, b);
        CHECK(d.removed.size() == a.size() - lcs);
        CHECK(d.added.size() == b.size() - lcs);
        CHECK(oracle::is_subsequence(d.removed, a));
        CHECK(oracle::is_subsequence(d.added, b));
        CHECK(apply_ops(a, d.ops) == b);
    }
}

TEST_CASE("inconsistent ops are rejected") {
    const std::vector<EditOp> bad{{EditKind::remove, 0, "x"}};
    CHECK_THROWS_AS(apply_ops({"y"}, bad), ValidationError);
    const std::vector<EditOp> past{{EditKind::add, 3, "x"}};
    CHECK_THROWS_AS(apply_ops({"y"}, past), ValidationError);
}

TEST_CASE("kind truth table") {
    LineDiff d;
    d.added = {"a"};
    CHECK(classify(d) == NoteKind::added);
    d.removed = {"b"};
    CHECK(classify(d) == NoteKind::mixed);
    d.added.clear();
    CHECK(classify(d) == NoteKind::removed);
    CHECK(parse_note_kind("mixed") == NoteKind::mixed);
    CHECK(std::string(to_string(NoteKind::removed)) == "removed");
    CHECK_FALSE(parse_note_kind("other"));
}

TEST_CASE("note events per consecutive snapshot pair") {
    const std::vector<NoteSnapshot> adds{{"m", 0, ""}, {"m", 10, "a"}, {"m", 20, "a"}};
    const auto e1 = note_events(adds);
    REQUIRE(e1.size() == 1);
    CHECK(e1[0].kind == NoteKind::added);
    CHECK(e1[0].t == 10);

    const std::vector<NoteSnapshot> rm{{"m", 0, "a\nb"}, {"m", 5, "b"}};
    CHECK(note_events(rm).at(0).kind == NoteKind::removed);

    const std::vector<NoteSnapshot> mixed{{"m", 0, "a"}, {"m", 5, "b"}};
    const auto e3 = note_events(mixed);
    CHECK(e3.at(0).kind == NoteKind::mixed);
    CHECK(e3.at(0).removed_lines == Lines{"a"});
    CHECK(e3.at(0).added_lines == Lines{"b"});
}

TEST_CASE("authors never share a diff and events are time ordered") {
    const std::vector<NoteSnapshot> snaps{{"ann", 0, "x"}, {"ann", 30, "x\ny"}, {"bob", 10, "p"}, {"bob", 20, "q"}};
    const auto events = note_events(snaps);
    REQUIRE(events.size() == 2);
    CHECK(events[0].author == "bob");
    CHECK(events[0].t == 20);
    CHECK(events[0].kind == NoteKind::mixed);
    CHECK(events[1].author == "ann");
    CHECK(events[1].added_lines == Lines{"y"});
}

TEST_CASE("replaying events rebuilds the last snapshot") {
    std::mt19937 rng(2);
    for (int round = 0; round < 100; ++round) {
        std::vector<NoteSnapshot> snaps;
        Lines doc;
        for (int k = 0; k < 1 + static_cast<int>(rng() % 8); ++k) {
            doc = random_edit(rng, doc);
            snaps.push_back({"mod", 10.0 * k, join(doc)});
        }
        const auto events = note_events(snaps);
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK_FALSE(events[i].ops.empty());
            if (i > 0) CHECK(events[i - 1].t < events[i].t);
        }
        CHECK(replay_notes(normalized_lines(snaps.front().text), events, "mod") == normalized_lines(snaps.back().text));
    }
}
