#include "recapit/project_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "recapit/error.hpp"
#include "recapit/json_codec.hpp"
#include "recapit/time.hpp"

namespace fs = std::filesystem;

namespace recapit {

namespace {

void check_color(const Rgb& c, const std::string& path) {
    for (int v : {c.r, c.g, c.b}) {
        if (v < 0 || v > 255) throw ValidationError("color channels must lie in [0,255]", path + ".color");
    }
}

std::string at(const char* list, std::size_t i) { return std::string(list) + "[" + std::to_string(i) + "]"; }

void validate_authoring(const WorkshopProject& p) {
    const auto& a = p.authoring;
    std::set<std::string> seg_ids;
    double cursor = 0.0;
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        const auto& s = a.segments[i];
        const auto path = "authoring." + at("segments", i);
        if (s.id.empty() || !seg_ids.insert(s.id).second) throw ValidationError("segment ids must be unique and non-empty", path);
        if (!(s.span.start < s.span.end)) throw ValidationError("segment span must have start < end", path + ".span");
        if (s.span.start != cursor) throw ValidationError("segments must tile the session without gaps", path + ".span");
        cursor = s.span.end;
    }
    if (!a.segments.empty() && cursor != p.duration) {
        throw ValidationError("segments must end at the session duration", "authoring.segments");
    }
    std::set<std::string> card_ids;
    for (std::size_t i = 0; i < a.cards.size(); ++i) {
        const auto& c = a.cards[i];
        const auto path = "authoring." + at("cards", i);
        if (!seg_ids.count(c.segment_id)) throw ValidationError("card references unknown segment '" + c.segment_id + "'", path);
        if (!card_ids.insert(c.segment_id).second) throw ValidationError("duplicate card for segment", path);
        for (std::size_t q = 0; q < c.quotes.size(); ++q) {
            if (c.quotes[q].rendered.rfind(c.quotes[q].utterance_id, 0) != 0) {
                throw ValidationError("quote must begin with its utterance id", path + "." + at("quotes", q));
            }
        }
        for (std::size_t k = 0; k < c.screenshots.size(); ++k) {
            const auto& crop = c.screenshots[k].crop;
            if (crop.x < 0 || crop.y < 0 || crop.width <= 0 || crop.height <= 0) {
                throw ValidationError("crop must be a non-empty rectangle at non-negative offset",
                                      path + "." + at("screenshots", k) + ".crop");
            }
        }
    }
}

}  // namespace

fs::path manifest_path(const fs::path& path) {
    if (fs::is_directory(path)) return path / kManifestName;
    return path;
}

fs::path project_root(const fs::path& path) {
    auto parent = manifest_path(path).parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

fs::path resolve_source(const fs::path& root, const SourceDescriptor& source) {
    fs::path p(source.path);
    return p.is_absolute() ? p : root / p;
}

void validate_project(const WorkshopProject& p) {
    if (p.id.empty()) throw ValidationError("project id must be non-empty", "id");
    if (!parse_iso8601(p.session_start)) throw ValidationError("session_start is not an ISO 8601 timestamp", "session_start");
    if (!(std::isfinite(p.duration) && p.duration > 0)) throw ValidationError("duration must be positive", "duration");

    std::set<std::string> role_ids;
    for (std::size_t i = 0; i < p.roles.size(); ++i) {
        const auto& r = p.roles[i];
        if (r.id.empty() || !role_ids.insert(r.id).second) throw ValidationError("role ids must be unique and non-empty", at("roles", i));
        if (r.label.empty()) throw ValidationError("role label must be non-empty", at("roles", i) + ".label");
        check_color(r.color, at("roles", i));
    }
    std::set<std::string> participant_ids;
    for (std::size_t i = 0; i < p.participants.size(); ++i) {
        const auto& x = p.participants[i];
        if (x.id.empty() || !participant_ids.insert(x.id).second) {
            throw ValidationError("participant ids must be unique and non-empty: '" + x.id + "'", at("participants", i));
        }
        if (!role_ids.count(x.role_id)) {
            throw ValidationError("participant '" + x.id + "' references unknown role '" + x.role_id + "'",
                                  at("participants", i) + ".role_id");
        }
        check_color(x.color, at("participants", i));
    }
    std::set<std::string> aoi_ids;
    for (std::size_t i = 0; i < p.aois.size(); ++i) {
        const auto& a = p.aois[i];
        const auto path = at("aois", i);
        if (a.id.empty() || !aoi_ids.insert(a.id).second) throw ValidationError("AOI ids must be unique and non-empty", path);
        if (a.polygon.size() < 3) throw ValidationError("AOI '" + a.id + "' needs at least 3 vertices", path + ".polygon");
        for (std::size_t k = 0; k < a.polygon.size(); ++k) {
            const auto v = a.polygon[k];
            if (v.x < 0 || v.x > 1 || v.y < 0 || v.y > 1) {
                throw ValidationError("AOI '" + a.id + "' has a vertex outside [0,1]^2",
                                      path + ".polygon[" + std::to_string(k) + "]");
            }
        }
        if (polygon_self_intersects(a.polygon)) throw ValidationError("AOI '" + a.id + "' polygon self-intersects", path + ".polygon");
        check_color(a.color, path);
    }
    std::set<SourceKind> kinds;
    for (std::size_t i = 0; i < p.sources.size(); ++i) {
        const auto& s = p.sources[i];
        if (!kinds.insert(s.kind).second) {
            throw ValidationError(std::string("more than one ") + to_string(s.kind) + " source", at("sources", i));
        }
        if (!std::isfinite(s.time_offset)) throw ValidationError("time_offset must be finite", at("sources", i) + ".time_offset");
        if (s.path.empty()) throw ValidationError("source path must be non-empty", at("sources", i) + ".path");
    }

    const auto& c = p.segmentation_config;
    if (!(c.penalty_beta > 0)) throw ValidationError("penalty_beta must be positive", "segmentation_config.penalty_beta");
    if (!(c.bin_width > 0)) throw ValidationError("bin_width must be positive", "segmentation_config.bin_width");
    if (!(c.gap_threshold > 0)) throw ValidationError("gap_threshold must be positive", "segmentation_config.gap_threshold");
    if (!(c.similarity_threshold >= -1 && c.similarity_threshold <= 1)) {
        throw ValidationError("similarity_threshold must lie in [-1,1]", "segmentation_config.similarity_threshold");
    }
    if (c.min_segment_bins < 1) throw ValidationError("min_segment_bins must be at least 1", "segmentation_config.min_segment_bins");

    const auto& ac = p.analysis_config;
    if (!(ac.dispersion_threshold > 0)) throw ValidationError("dispersion_threshold must be positive", "analysis_config.dispersion_threshold");
    if (!(ac.min_fixation_duration > 0)) throw ValidationError("min_fixation_duration must be positive", "analysis_config.min_fixation_duration");
    if (!(ac.background_alpha > 0 && ac.background_alpha < 1)) throw ValidationError("background_alpha must lie in (0,1)", "analysis_config.background_alpha");
    if (!(ac.background_threshold >= 0)) throw ValidationError("background_threshold must be non-negative", "analysis_config.background_threshold");
    if (!(ac.landmark_tolerance >= 0)) throw ValidationError("landmark_tolerance must be non-negative", "analysis_config.landmark_tolerance");
    if (ac.heatmap_width < 1 || ac.heatmap_height < 1) throw ValidationError("heatmap grid must be at least 1x1", "analysis_config.heatmap_width");
    if (!(ac.heatmap_sigma > 0)) throw ValidationError("heatmap_sigma must be positive", "analysis_config.heatmap_sigma");

    validate_authoring(p);
}

void check_sources_exist(const WorkshopProject& p, const fs::path& root) {
    for (std::size_t i = 0; i < p.sources.size(); ++i) {
        const auto full = resolve_source(root, p.sources[i]);
        if (!fs::exists(full)) {
            throw IoError(std::string("missing ") + to_string(p.sources[i].kind) + " source: " + full.string(), full.string());
        }
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string(), path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

WorkshopProject load_project(const fs::path& path) {
    const auto manifest = manifest_path(path);
    if (!fs::exists(manifest)) throw IoError("missing manifest " + manifest.string(), manifest.string());
    json doc;
    try {
        doc = json::parse(read_file(manifest));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what(), manifest.string());
    }
    WorkshopProject p = project_from_json(doc);
    validate_project(p);
    check_sources_exist(p, project_root(path));
    return p;
}

void write_file_atomic(const fs::path& path, std::string_view content, const std::function<void()>& before_rename) {
    const auto dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    const auto tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw IoError("cannot write " + tmp.string() + ": " + std::strerror(errno), path.string());
    std::size_t written = 0;
    while (written < content.size()) {
        const auto n = ::write(fd, content.data() + written, content.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            fs::remove(tmp);
            throw IoError("write failed for " + tmp.string() + ": " + std::strerror(err), path.string());
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        fs::remove(tmp);
        throw IoError("fsync failed for " + tmp.string(), path.string());
    }
    try {
        if (before_rename) before_rename();
    } catch (...) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot replace " + path.string() + ": " + ec.message(), path.string());
    }
    const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

void save_project(const WorkshopProject& project, const fs::path& path) {
    validate_project(project);
    write_file_atomic(manifest_path(path), to_json(project).dump(2) + "\n");
}

}  // namespace recapit
