#include "recapit/cards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "recapit/error.hpp"
#include "recapit/image.hpp"
#include "recapit/json_codec.hpp"
#include "recapit/project_io.hpp"
#include "recapit/text.hpp"
#include "recapit/time.hpp"

namespace recapit {

CardStats card_statistics(TimeSpan segment, std::span<const Utterance> utterances,
                          std::span<const Participant> participants, std::span<const Role> roles,
                          const std::map<std::string, std::vector<ScarfInterval>>& scarfs,
                          std::size_t participant_count, const std::vector<std::string>& aoi_ids,
                          const MultivariateSeries* activity) {
    const double duration = segment.duration();
    if (!(duration > 0)) throw ValidationError("segment has zero duration");

    CardStats stats;
    for (const auto& r : roles) stats.speaking_by_role[r.id] = 0.0;
    for (const auto& a : aoi_ids) {
        stats.attention_by_aoi[a] = 0.0;
        stats.activity_by_aoi[a] = 0.0;
    }

    std::map<std::string, std::string> role_of;
    for (const auto& p : participants) role_of[p.id] = p.role_id;
    for (const auto& u : utterances) {
        auto it = role_of.find(u.speaker_id);
        if (it == role_of.end()) continue;
        stats.speaking_by_role[it->second] += overlap(u.span, segment);
    }
    for (auto& [_, v] : stats.speaking_by_role) v /= duration;

    if (participant_count > 0) {
        for (const auto& [_, track] : scarfs) {
            for (const auto& iv : track) {
                if (!iv.aoi_id) continue;
                auto it = stats.attention_by_aoi.find(*iv.aoi_id);
                if (it != stats.attention_by_aoi.end()) it->second += overlap(iv.span, segment);
            }
        }
        const double denom = duration * static_cast<double>(participant_count);
        for (auto& [_, v] : stats.attention_by_aoi) v /= denom;
    }

    if (activity && activity->rows() > 0) {
        for (std::size_t m = 0; m < activity->cols(); ++m) {
            auto it = stats.activity_by_aoi.find(activity->aoi_ids[m]);
            if (it == stats.activity_by_aoi.end()) continue;
            double sum = 0.0, weight = 0.0;
            for (std::size_t t = 0; t < activity->rows(); ++t) {
                const TimeSpan bin{activity->start + static_cast<double>(t) * activity->bin_width,
                                   activity->start + static_cast<double>(t + 1) * activity->bin_width};
                const double w = overlap(bin, segment);
                if (w <= 0) continue;
                sum += activity->at(t, m) * w;
                weight += w;
            }
            it->second = weight > 0 ? sum / weight : 0.0;
        }
    }
    return stats;
}

std::map<std::string, double> donut_shares(const std::map<std::string, double>& values) {
    double total = 0.0;
    for (const auto& [_, v] : values) {
        if (v > 0) total += v;
    }
    std::map<std::string, double> out;
    if (total <= 0) return out;
    for (const auto& [k, v] : values) {
        if (v > 0) out[k] = v / total;
    }
    return out;
}

std::string render_quote(const Utterance& u) { return u.id + ": _" + u.text + "_"; }

TopicCard add_quote(TopicCard card, const TopicSegment& segment, const Utterance& utterance) {
    if (card.segment_id != segment.id) throw ValidationError("card and segment do not match", segment.id);
    if (!(overlap(utterance.span, segment.span) > 0)) {
        throw ValidationError("utterance " + utterance.id + " lies outside segment " + segment.id, utterance.id);
    }
    const bool present = std::any_of(card.quotes.begin(), card.quotes.end(),
                                     [&](const Quote& q) { return q.utterance_id == utterance.id; });
    if (!present) card.quotes.push_back({utterance.id, render_quote(utterance)});
    return card;
}

std::vector<std::string> keyword_filter(std::span<const TopicSegment> segments, std::span<const Utterance> utterances,
                                        std::span<const std::string> keywords) {
    if (keywords.empty()) throw ValidationError("at least one keyword is required");
    std::vector<std::string> needles;
    for (const auto& k : keywords) {
        if (k.empty()) throw ValidationError("keywords must not be empty");
        needles.push_back(text::lower(k));
    }
    std::vector<std::string> folded;
    folded.reserve(utterances.size());
    for (const auto& u : utterances) folded.push_back(text::lower(u.text));

    std::vector<std::string> out;
    for (const auto& s : segments) {
        bool hit = false;
        for (std::size_t i = 0; i < utterances.size() && !hit; ++i) {
            if (!(overlap(utterances[i].span, s.span) > 0)) continue;
            for (const auto& n : needles) {
                if (folded[i].find(n) != std::string::npos) {
                    hit = true;
                    break;
                }
            }
        }
        if (hit) out.push_back(s.id);
    }
    return out;
}

std::vector<TopicSegment> compress_view(std::span<const TopicSegment> segments) {
    std::vector<TopicSegment> out;
    for (const auto& s : segments) {
        if (s.marked) out.push_back(s);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TopicSegment& a, const TopicSegment& b) { return a.span.start < b.span.start; });
    return out;
}

// ---------------------------------------------------------------------------

namespace {

TopicCard& card_ref(AuthoringState& state, const std::string& id) {
    for (auto& c : state.cards) {
        if (c.segment_id == id) return c;
    }
    throw NotFoundError("no card " + id, id);
}

TopicSegment& segment_ref(AuthoringState& state, const std::string& id) {
    for (auto& s : state.segments) {
        if (s.id == id) return s;
    }
    throw NotFoundError("no segment " + id, id);
}

}  // namespace

const TopicCard* find_card(const AuthoringState& state, std::string_view id) {
    for (const auto& c : state.cards) {
        if (c.segment_id == id) return &c;
    }
    return nullptr;
}

const TopicSegment* find_segment(const AuthoringState& state, std::string_view id) {
    for (const auto& s : state.segments) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

AuthoringState apply_mutation(const AuthoringState& state, const Mutation& m) {
    if (m.seq != state.version + 1) {
        throw ValidationError("mutation " + std::to_string(m.seq) + " does not follow version " +
                                  std::to_string(state.version),
                              "log");
    }
    AuthoringState next = state;
    const std::string path = "log[" + std::to_string(m.seq) + "].payload";

    if (m.kind == mutation::set_segments) {
        ObjectReader r(m.payload, path);
        std::vector<TopicSegment> segments;
        std::vector<TopicCard> cards;
        const auto& js = r.required("segments");
        const auto& jc = r.required("cards");
        r.finish();
        if (!js.is_array() || !jc.is_array()) throw ValidationError("segments and cards must be arrays", path);
        for (std::size_t i = 0; i < js.size(); ++i) {
            segments.push_back(segment_from_json(js[i], path + ".segments[" + std::to_string(i) + "]"));
        }
        for (std::size_t i = 0; i < jc.size(); ++i) {
            cards.push_back(card_from_json(jc[i], path + ".cards[" + std::to_string(i) + "]"));
        }
        std::set<std::string> ids;
        for (const auto& s : segments) ids.insert(s.id);
        for (const auto& c : cards) {
            if (!ids.contains(c.segment_id)) throw ValidationError("card " + c.segment_id + " has no segment", path);
        }
        next.segments = std::move(segments);
        next.cards = std::move(cards);
    } else if (m.kind == mutation::set_stats) {
        ObjectReader r(m.payload, path);
        const auto& js = r.required("stats");
        r.finish();
        if (!js.is_object()) throw ValidationError("stats must be an object", path + ".stats");
        for (const auto& [id, value] : js.items()) {
            card_ref(next, id).stats = card_stats_from_json(value, path + ".stats." + id);
        }
    } else if (m.kind == mutation::set_title) {
        ObjectReader r(m.payload, path);
        const auto title = std::string(text::trim(r.string("title")));
        r.finish();
        if (title.empty()) throw ValidationError("title must not be empty", path + ".title");
        auto& seg = segment_ref(next, m.target);
        auto& card = card_ref(next, m.target);
        seg.title = title;
        card.title = title;
        card.title_source = TitleSource::user;
    } else if (m.kind == mutation::add_quote) {
        ObjectReader r(m.payload, path);
        Quote q{r.string("utterance_id"), r.string("rendered")};
        r.finish();
        if (q.utterance_id.empty() || q.rendered.rfind(q.utterance_id, 0) != 0) {
            throw ValidationError("quote must begin with its utterance id", path + ".rendered");
        }
        auto& card = card_ref(next, m.target);
        const bool present = std::any_of(card.quotes.begin(), card.quotes.end(),
                                         [&](const Quote& e) { return e.utterance_id == q.utterance_id; });
        if (!present) card.quotes.push_back(std::move(q));
    } else if (m.kind == mutation::add_note) {
        ObjectReader r(m.payload, path);
        auto note = r.string("text");
        r.finish();
        if (text::trim(note).empty()) throw ValidationError("note must not be empty", path + ".text");
        card_ref(next, m.target).notes.push_back(std::move(note));
    } else if (m.kind == mutation::set_mark) {
        ObjectReader r(m.payload, path);
        const bool marked = r.boolean("marked");
        r.finish();
        card_ref(next, m.target).marked = marked;
        segment_ref(next, m.target).marked = marked;
    } else if (m.kind == mutation::add_screenshot) {
        auto shot = screenshot_from_json(m.payload, path);
        card_ref(next, m.target).screenshots.push_back(std::move(shot));
    } else {
        throw ValidationError("unknown mutation kind '" + m.kind + "'", "log");
    }

    next.version = m.seq;
    next.log.push_back(m);
    return next;
}

AuthoringState replay(std::span<const Mutation> log) {
    AuthoringState state;
    for (const auto& m : log) state = apply_mutation(state, m);
    return state;
}

AuthoringState commit(const AuthoringState& state, std::string kind, std::string target, nlohmann::json payload) {
    Mutation m;
    m.seq = state.version + 1;
    m.kind = std::move(kind);
    m.target = std::move(target);
    m.payload = std::move(payload);
    return apply_mutation(state, m);
}

AuthoringState set_segments(const AuthoringState& state, const std::vector<TopicSegment>& segments,
                            const std::vector<TopicCard>& cards) {
    auto js = json::array();
    for (const auto& s : segments) js.push_back(to_json(s));
    auto jc = json::array();
    for (const auto& c : cards) jc.push_back(to_json(c));
    return commit(state, mutation::set_segments, "", {{"segments", js}, {"cards", jc}});
}

AuthoringState set_stats(const AuthoringState& state, const std::map<std::string, CardStats>& stats) {
    auto j = json::object();
    for (const auto& [id, s] : stats) j[id] = to_json(s);
    return commit(state, mutation::set_stats, "", {{"stats", j}});
}

AuthoringState set_title(const AuthoringState& state, const std::string& segment_id, const std::string& title) {
    return commit(state, mutation::set_title, segment_id, {{"title", title}});
}

AuthoringState add_quote(const AuthoringState& state, const std::string& card_id, const Utterance& utterance) {
    const auto* card = find_card(state, card_id);
    const auto* seg = find_segment(state, card_id);
    if (!card || !seg) throw NotFoundError("no card " + card_id, card_id);
    add_quote(*card, *seg, utterance);
    return commit(state, mutation::add_quote, card_id,
                  {{"utterance_id", utterance.id}, {"rendered", render_quote(utterance)}});
}

AuthoringState add_note(const AuthoringState& state, const std::string& card_id, const std::string& note) {
    return commit(state, mutation::add_note, card_id, {{"text", note}});
}

AuthoringState set_mark(const AuthoringState& state, const std::string& card_id, bool marked) {
    return commit(state, mutation::set_mark, card_id, {{"marked", marked}});
}

AuthoringState add_screenshot(const AuthoringState& state, const std::string& card_id, const Screenshot& shot,
                              std::pair<int, int> image_size) {
    if (!find_card(state, card_id)) throw NotFoundError("no card " + card_id, card_id);
    const auto& c = shot.crop;
    if (c.width <= 0 || c.height <= 0) throw ValidationError("crop must have a positive size", "crop");
    if (c.x < 0 || c.y < 0 || c.x + c.width > image_size.first || c.y + c.height > image_size.second) {
        throw ValidationError("crop exceeds the " + std::to_string(image_size.first) + "x" +
                                  std::to_string(image_size.second) + " source image",
                              "crop");
    }
    if (shot.heatmap_overlay && !(shot.heatmap_overlay->span.duration() > 0)) {
        throw ValidationError("overlay span must have a positive duration", "heatmap_overlay.span");
    }
    return commit(state, mutation::add_screenshot, card_id, to_json(shot));
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string screenshot_png(const Screenshot& shot, const std::filesystem::path& root, const OverlayLookup& overlay) {
    auto path = std::filesystem::path(shot.image_path);
    if (path.is_relative()) path = root / path;
    const auto image = read_pgm(path);
    const auto& c = shot.crop;
    if (c.x < 0 || c.y < 0 || c.width <= 0 || c.height <= 0 || c.x + c.width > image.width ||
        c.y + c.height > image.height) {
        throw ValidationError("crop exceeds the source image", shot.image_path);
    }
    std::optional<OverlaySource> heat;
    if (shot.heatmap_overlay && overlay) heat = overlay(shot);

    RgbImage out;
    out.width = c.width;
    out.height = c.height;
    out.pixels.resize(static_cast<std::size_t>(c.width) * c.height * 3);
    for (int y = 0; y < c.height; ++y) {
        for (int x = 0; x < c.width; ++x) {
            const int u = c.x + x, v = c.y + y;
            double r = image.at(u, v), g = r, b = r;
            if (heat && heat->grid.width > 0 && heat->grid.height > 0) {
                if (auto p = try_apply_homography(heat->pixel_to_work, {u + 0.5, v + 0.5});
                    p && p->x >= 0 && p->x < 1 && p->y >= 0 && p->y < 1) {
                    const int gx = std::min(heat->grid.width - 1, static_cast<int>(p->x * heat->grid.width));
                    const int gy = std::min(heat->grid.height - 1, static_cast<int>(p->y * heat->grid.height));
                    const double a = 0.6 * heat->grid.at(gx, gy);
                    r = r * (1 - a) + 255.0 * a;
                    g = g * (1 - a);
                    b = b * (1 - a);
                }
            }
            auto* px = &out.pixels[(static_cast<std::size_t>(y) * c.width + x) * 3];
            px[0] = static_cast<std::uint8_t>(std::lround(r));
            px[1] = static_cast<std::uint8_t>(std::lround(g));
            px[2] = static_cast<std::uint8_t>(std::lround(b));
        }
    }
    return encode_png(out);
}

void stats_table(std::ostringstream& html, const std::string& caption, const std::map<std::string, double>& values,
                 const std::map<std::string, std::string>& labels, const std::map<std::string, double>* shares) {
    html << "<table>\n<caption>" << text::html_escape(caption) << "</caption>\n";
    html << "<tr><th></th><th>value</th>" << (shares ? "<th>share</th>" : "") << "</tr>\n";
    for (const auto& [k, v] : values) {
        auto l = labels.find(k);
        html << "<tr><td>" << text::html_escape(l != labels.end() && !l->second.empty() ? l->second : k) << "</td><td>"
             << fixed3(v) << "</td>";
        if (shares) {
            auto s = shares->find(k);
            html << "<td>" << fixed3(s != shares->end() ? s->second : 0.0) << "</td>";
        }
        html << "</tr>\n";
    }
    html << "</table>\n";
}

}  // namespace

std::string render_report(const WorkshopProject& project, const std::filesystem::path& root,
                          const ReportOptions& options) {
    std::vector<const TopicSegment*> marked;
    for (const auto& s : project.authoring.segments) {
        if (s.marked) marked.push_back(&s);
    }
    if (marked.empty()) throw ValidationError("no marked cards to export");
    std::stable_sort(marked.begin(), marked.end(),
                     [](const TopicSegment* a, const TopicSegment* b) { return a->span.start < b->span.start; });

    std::map<std::string, std::string> role_labels, aoi_labels;
    for (const auto& r : project.roles) role_labels[r.id] = r.label;
    for (const auto& a : project.aois) aoi_labels[a.id] = a.label;

    std::ostringstream html;
    html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html << "<title>" << text::html_escape(project.title) << "</title>\n";
    html << "<style>\nbody{font-family:sans-serif;max-width:60em;margin:2em auto;color:#222}\n"
            "section{border-top:1px solid #ccc;margin-top:2em}\ntable{border-collapse:collapse;margin:.5em 0}\n"
            "td,th{padding:.2em .6em;text-align:left}\nimg{max-width:100%;image-rendering:pixelated}\n</style>\n";
    html << "</head>\n<body>\n";
    html << "<h1>" << text::html_escape(project.title) << "</h1>\n";
    html << "<dl>\n<dt>Project</dt><dd>" << text::html_escape(project.id) << "</dd>\n";
    html << "<dt>Session start</dt><dd>" << text::html_escape(project.session_start) << "</dd>\n";
    html << "<dt>Duration</dt><dd>" << format_clock(project.duration) << "</dd>\n";
    html << "<dt>Participants</dt><dd>";
    for (std::size_t i = 0; i < project.participants.size(); ++i) {
        const auto& p = project.participants[i];
        if (i) html << ", ";
        const auto* role = project.role(p.role_id);
        html << text::html_escape(p.display_name.empty() ? p.id : p.display_name) << " ("
             << text::html_escape(role && !role->label.empty() ? role->label : p.role_id) << ")";
    }
    html << "</dd>\n</dl>\n";
    html << "<p class=\"generated\">\nGenerated " << text::html_escape(options.generated_at) << "\n</p>\n";

    for (const auto* seg : marked) {
        const auto* card = find_card(project.authoring, seg->id);
        if (!card) throw ValidationError("marked segment " + seg->id + " has no card", seg->id);
        html << "<section id=\"" << text::html_escape(seg->id) << "\">\n";
        html << "<h2>" << text::html_escape(card->title.empty() ? seg->title : card->title) << "</h2>\n";
        html << "<p>" << format_clock(seg->span.start) << " to " << format_clock(seg->span.end) << "</p>\n";
        if (!card->quotes.empty()) {
            html << "<h3>Quotes</h3>\n<ul class=\"quotes\">\n";
            for (const auto& q : card->quotes) html << "<li class=\"quote\">" << text::html_escape(q.rendered) << "</li>\n";
            html << "</ul>\n";
        }
        if (!card->notes.empty()) {
            html << "<h3>Notes</h3>\n<ul class=\"notes\">\n";
            for (const auto& n : card->notes) html << "<li>" << text::html_escape(n) << "</li>\n";
            html << "</ul>\n";
        }
        for (const auto& shot : card->screenshots) {
            html << "<figure><img alt=\"" << text::html_escape(shot.image_path) << "\" src=\"data:image/png;base64,"
                 << base64_encode(screenshot_png(shot, root, options.overlay)) << "\"></figure>\n";
        }
        html << "<h3>Statistics</h3>\n";
        const auto shares = donut_shares(card->stats.speaking_by_role);
        stats_table(html, "Speaking time by role", card->stats.speaking_by_role, role_labels, &shares);
        stats_table(html, "Attention by area", card->stats.attention_by_aoi, aoi_labels, nullptr);
        stats_table(html, "Activity by area", card->stats.activity_by_aoi, aoi_labels, nullptr);
        html << "</section>\n";
    }
    html << "</body>\n</html>\n";
    return html.str();
}

void export_report(const WorkshopProject& project, const std::filesystem::path& root,
                   const std::filesystem::path& destination, const ReportOptions& options) {
    const auto html = render_report(project, root, options);
    write_file_atomic(destination, html);
}

}  // namespace recapit
