#pragma once

#include <string>

#include <json.hpp>

#include "recapit/model.hpp"

namespace recapit {

using nlohmann::json;

// Encoders for the persisted model. Decoders are strict: unknown fields and
// type mismatches throw ValidationError whose detail is the field path.
json to_json(const Rgb& c);
json to_json(const TimeSpan& s);
json to_json(const Role& r);
json to_json(const Participant& p);
json to_json(const Aoi& a);
json to_json(const SourceDescriptor& s);
json to_json(const SegmentationConfig& c);
json to_json(const AnalysisConfig& c);
json to_json(const TopicSegment& s);
json to_json(const Quote& q);
json to_json(const PixelRect& r);
json to_json(const Screenshot& s);
json to_json(const CardStats& s);
json to_json(const TopicCard& c);
json to_json(const Mutation& m);
json to_json(const AuthoringState& a);
json to_json(const WorkshopProject& p);

TimeSpan time_span_from_json(const json& j, const std::string& path);
TopicSegment segment_from_json(const json& j, const std::string& path);
PixelRect pixel_rect_from_json(const json& j, const std::string& path);
Screenshot screenshot_from_json(const json& j, const std::string& path);
CardStats card_stats_from_json(const json& j, const std::string& path);
TopicCard card_from_json(const json& j, const std::string& path);
AuthoringState authoring_from_json(const json& j, const std::string& path);
WorkshopProject project_from_json(const json& j);

// Reads one JSON object field by field, tracking which keys were consumed so
// that finish() can reject unknown ones.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path);

    const json& required(const std::string& key);
    const json* optional(const std::string& key);

    std::string string(const std::string& key);
    double number(const std::string& key);
    double number_or(const std::string& key, double fallback);
    long long integer(const std::string& key);
    bool boolean(const std::string& key);
    bool boolean_or(const std::string& key, bool fallback);

    std::string field(const std::string& key) const;
    const std::string& path() const noexcept { return path_; }

    void finish() const;

private:
    const json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

std::string json_string(const json& j, const std::string& path);
double json_number(const json& j, const std::string& path);

}  // namespace recapit
