// Writes the synthetic workshop used by the tests and the README walkthrough:
// three participants discuss goals at a whiteboard, explore data on a screen,
// then sketch a prototype. Output is a pure function of the seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "recapit/image.hpp"
#include "recapit/model.hpp"
#include "recapit/project_io.hpp"
#include "recapit/text.hpp"
#include "recapit/time.hpp"

namespace fs = std::filesystem;
using namespace recapit;

namespace {

// Raw mt19937 output mapped to doubles without std distributions.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_()) / 4294967296.0; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int pick(int n) { return static_cast<int>(uniform() * n); }
    double normal(double sigma) {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937 gen_;
};

struct Rect {
    double x0, y0, x1, y1;
};

constexpr double kDuration = 180.0;
constexpr int kFrameW = 48;
constexpr int kFrameH = 32;

const Rect kBoard{0.05, 0.05, 0.45, 0.45};
const Rect kScreen{0.55, 0.05, 0.95, 0.45};
const Rect kSketch{0.25, 0.55, 0.75, 0.95};
const Rect kAreas[] = {kBoard, kScreen, kSketch};

struct Phase {
    double start, end;
    int area;                          // index into kAreas
    std::vector<std::string> words;    // topic vocabulary
    std::vector<std::string> openers;  // sentence starts
};

const std::vector<Phase> kPhases = {
    {0, 60, 0,
     {"goals", "stakeholders", "opportunities", "workshop", "priorities", "audience"},
     {"Let us collect the", "We should rank the", "Write down the", "Cluster the"}},
    {60, 92, 1,
     {"dataset", "columns", "missing", "values", "filter", "records"},
     {"Open the", "Check the", "Look at the", "Count the"}},
    {92, 120, 1,
     {"color", "palette", "legend", "encoding", "contrast", "hue"},
     {"Try another", "Change the", "Compare the", "Darken the"}},
    {120, 180, 2,
     {"sketch", "prototype", "timeline", "segmentation", "annotation", "layout"},
     {"Draw the", "Refine the", "Place the", "Label the"}},
};

const Phase& phase_at(double t) {
    for (const auto& p : kPhases) {
        if (t < p.end) return p;
    }
    return kPhases.back();
}

Point inside(Rng& rng, const Rect& r, double inset) {
    return {rng.uniform(r.x0 + inset, r.x1 - inset), rng.uniform(r.y0 + inset, r.y1 - inset)};
}

void write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string transcript(Rng& rng) {
    const char* speakers[] = {"p1", "p2", "p3"};
    std::string out;
    double t = 1.0;
    int n = 0;
    const Phase* current = &kPhases.front();
    while (t < kDuration - 4.0) {
        const auto& phase = phase_at(t);
        if (&phase != current) {
            t = phase.start + rng.uniform(0.2, 0.8);
            current = &phase;
        }
        const double len = rng.uniform(2.0, 4.5);
        if (t + len > phase.end - 0.3 && phase.end < kDuration) {
            t = phase.end;
            continue;
        }
        std::string text = phase.openers[rng.pick(static_cast<int>(phase.openers.size()))];
        const int words = 2 + rng.pick(2);
        for (int w = 0; w < words; ++w) {
            text += (w == 0 ? " " : (w + 1 == words ? " and " : ", ")) +
                    phase.words[rng.pick(static_cast<int>(phase.words.size()))];
        }
        text += ".";
        ++n;
        nlohmann::json u = {{"id", "u" + std::to_string(n)},
                            {"speaker", speakers[rng.pick(3)]},
                            {"start", std::round(t * 1000) / 1000},
                            {"end", std::round((t + len) * 1000) / 1000},
                            {"text", text}};
        out += u.dump() + "\n";
        const double pause = rng.uniform() < 0.12 ? rng.uniform(1.7, 2.4) : rng.uniform(0.2, 1.0);
        t += len + pause;
    }
    return out;
}

std::string gaze(Rng& rng, int participant) {
    std::string out = "t,x,y,valid\n";
    const double dt = 0.05;
    const auto samples = static_cast<int>(kDuration / dt);
    int k = 0;
    while (k < samples) {
        const double t = k * dt;
        const auto& phase = phase_at(t);
        const double roll = rng.uniform();
        Point target;
        if (roll < 0.72 + 0.04 * participant) {
            target = inside(rng, kAreas[phase.area], 0.05);
        } else if (roll < 0.92) {
            target = inside(rng, kAreas[(phase.area + 1 + rng.pick(2)) % 3], 0.05);
        } else {
            target = {rng.uniform(0.47, 0.53), rng.uniform(0.47, 0.53)};
        }
        const int dwell = 8 + rng.pick(22);
        for (int s = 0; s < dwell && k < samples; ++s, ++k) {
            const double ts = k * dt;
            if (rng.uniform() < 0.02) {
                out += num(ts) + ",,,0\n";
                continue;
            }
            out += num(ts) + "," + num(target.x + rng.normal(0.004)) + "," + num(target.y + rng.normal(0.004)) + ",1\n";
        }
        for (int s = 0; s < 2 && k < samples; ++s, ++k) {
            out += num(k * dt) + "," + num(rng.uniform(0.1, 0.9)) + "," + num(rng.uniform(0.1, 0.9)) + ",1\n";
        }
    }
    return out;
}

void frames_and_landmarks(Rng& rng, const fs::path& dir, const fs::path& landmarks_file) {
    std::string index = "file,t\n";
    std::string landmarks = "# t,x1,y1,x2,y2\n";
    Point hand = {0.25, 0.25};
    Point stray = {0.5, 0.75};
    for (int f = 0; f < static_cast<int>(kDuration); ++f) {
        const double t = f;
        const auto& phase = phase_at(t);
        const auto& area = kAreas[phase.area];
        if (hand.x < area.x0 || hand.x > area.x1 || hand.y < area.y0 || hand.y > area.y1) {
            hand = inside(rng, area, 0.1);
        }
        hand.x = std::clamp(hand.x + rng.normal(0.03), area.x0 + 0.06, area.x1 - 0.06);
        hand.y = std::clamp(hand.y + rng.normal(0.03), area.y0 + 0.06, area.y1 - 0.06);
        // a passer-by crosses the sketch table in the first phase, with no hand landmarks there
        const bool passer = phase.area == 0 && f % 20 < 6;
        if (passer) stray = {0.3 + 0.07 * (f % 20), 0.75};

        GrayImage img;
        img.width = kFrameW;
        img.height = kFrameH;
        img.pixels.resize(kFrameW * kFrameH);
        for (int y = 0; y < kFrameH; ++y) {
            for (int x = 0; x < kFrameW; ++x) {
                const double u = (x + 0.5) / kFrameW, v = (y + 0.5) / kFrameH;
                double value = 70 + 40 * u + 20 * v + rng.normal(2.0);
                if (std::hypot(u - hand.x, (v - hand.y) * kFrameH / kFrameW) < 0.07) value = 215 + rng.normal(4.0);
                if (passer && std::hypot(u - stray.x, (v - stray.y) * kFrameH / kFrameW) < 0.06) value = 20;
                img.pixels[y * kFrameW + x] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
            }
        }
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03d.pgm", f);
        write(dir / name, encode_pgm(img));
        index += std::string(name) + "," + num(t) + "\n";

        for (double lt : {t, t + 0.5}) {
            landmarks += num(lt) + "," + num(hand.x - 0.02) + "," + num(hand.y + 0.02) + "," + num(hand.x + 0.02) +
                         "," + num(hand.y + 0.02) + "\n";
        }
    }
    write(dir / "index.csv", index);
    write(landmarks_file, landmarks);
}

void notes(const fs::path& dir, double session_start) {
    struct Snap {
        const char* author;
        double t;
        std::vector<std::string> lines;
    };
    const std::vector<Snap> snaps = {
        {"p1", 20, {"Goals", "- understand stakeholders"}},
        {"p1", 50, {"Goals", "- understand stakeholders", "- rank opportunities"}},
        {"p1", 80, {"Goals", "- understand stakeholders", "- rank opportunities", "", "Data", "- dataset has missing values"}},
        {"p1", 110, {"Goals", "- rank opportunities", "", "Data", "- dataset has missing values", "- palette lacks contrast"}},
        {"p1", 140, {"Goals", "- rank opportunities", "", "Data", "- dataset has missing values", "- palette lacks contrast"}},
        {"p1", 170, {"Goals", "- rank opportunities", "", "Data", "- palette lacks contrast", "", "Prototype", "- timeline with segmentation"}},
        {"p2", 30, {"workshop audience: analysts"}},
        {"p2", 70, {"workshop audience: analysts", "filter records by year"}},
        {"p2", 100, {"workshop audience: designers", "filter records by year"}},
        {"p2", 150, {"filter records by year", "sketch annotation layer"}},
        {"p2", 175, {"filter records by year", "sketch annotation layer", "layout: cards on the right"}},
    };
    for (const auto& s : snaps) {
        std::string body;
        for (const auto& l : s.lines) body += l + "\n";
        auto stamp = format_iso8601(session_start + s.t);
        std::string basic;
        for (char c : stamp) {
            if (c != '-' && c != ':') basic += c;
        }
        write(dir / (std::string(s.author) + "__" + basic + ".txt"), body);
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixture <output-dir>\n";
        return 64;
    }
    const fs::path out = argv[1];
    fs::create_directories(out);
    Rng rng(20240514);

    WorkshopProject p;
    p.id = "workshop-demo";
    p.title = "Synthetic visualization workshop";
    p.session_start = "2024-05-14T09:30:00Z";
    p.duration = kDuration;
    p.roles = {{"facilitator", "Facilitator", {230, 159, 0}}, {"participant", "Participant", {86, 180, 233}}};
    p.participants = {{"p1", "Alex", "facilitator", {230, 159, 0}},
                      {"p2", "Sam", "participant", {0, 158, 115}},
                      {"p3", "Kim", "participant", {204, 121, 167}}};
    auto poly = [](const Rect& r) {
        return std::vector<Point>{{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
    };
    p.aois = {{"board", "Whiteboard", poly(kBoard), {0, 114, 178}},
              {"screen", "Screen", poly(kScreen), {213, 94, 0}},
              {"sketch", "Sketch table", poly(kSketch), {0, 158, 115}}};
    p.sources = {{SourceKind::transcript, "transcript.jsonl", 0.0},
                 {SourceKind::gaze, "gaze", 0.0},
                 {SourceKind::frames, "frames", 0.0},
                 {SourceKind::landmarks, "landmarks.csv", 0.0},
                 {SourceKind::notes, "notes", 0.0}};

    write(out / "transcript.jsonl", transcript(rng));
    for (int i = 0; i < 3; ++i) write(out / "gaze" / ("p" + std::to_string(i + 1) + ".csv"), gaze(rng, i));
    frames_and_landmarks(rng, out / "frames", out / "landmarks.csv");
    notes(out / "notes", *parse_iso8601(p.session_start));
    save_project(p, out / kManifestName);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}
