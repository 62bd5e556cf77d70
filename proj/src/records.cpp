#include "geomon/records.hpp"

#include <stdexcept>

namespace geomon {

const char* to_string(Axis a) {
    switch (a) {
        case Axis::East: return "east";
        case Axis::North: return "north";
        case Axis::Up: return "up";
    }
    return "unknown";
}

const char* to_string(AlertDirection d) {
    return d == AlertDirection::Horizontal ? "horizontal" : "vertical";
}

const char* to_string(FixQuality q) {
    switch (q) {
        case FixQuality::None: return "none";
        case FixQuality::Float: return "float";
        case FixQuality::Fixed: return "fixed";
    }
    return "unknown";
}

Axis axis_from_string(const std::string& s) {
    if (s == "east") return Axis::East;
    if (s == "north") return Axis::North;
    if (s == "up") return Axis::Up;
    throw std::invalid_argument("unknown axis: " + s);
}

AlertDirection direction_from_string(const std::string& s) {
    if (s == "horizontal") return AlertDirection::Horizontal;
    if (s == "vertical") return AlertDirection::Vertical;
    throw std::invalid_argument("unknown direction: " + s);
}

outlier::Verdict verdict_from_string(const std::string& s) {
    using outlier::Verdict;
    if (s == "accept") return Verdict::Accept;
    if (s == "gross_error") return Verdict::GrossError;
    if (s == "deformation_pending") return Verdict::DeformationPending;
    if (s == "deformation_confirmed") return Verdict::DeformationConfirmed;
    throw std::invalid_argument("unknown verdict: " + s);
}

void to_json(nlohmann::json& j, const DisplacementRecord& r) {
    j = nlohmann::json{{"station_id", r.station_id},
                       {"epoch_ms", r.epoch_ms},
                       {"axis", to_string(r.axis)},
                       {"raw_mm", r.raw_mm},
                       {"verdict", to_string(r.verdict)}};
    if (r.filtered_mm)
        j["filtered_mm"] = *r.filtered_mm;
    else
        j["filtered_mm"] = nullptr;
}

void from_json(const nlohmann::json& j, DisplacementRecord& r) {
    r.station_id = j.at("station_id").get<int>();
    r.epoch_ms = j.at("epoch_ms").get<std::int64_t>();
    r.axis = axis_from_string(j.at("axis").get<std::string>());
    r.raw_mm = j.at("raw_mm").get<double>();
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    const auto& f = j.at("filtered_mm");
    r.filtered_mm = f.is_null() ? std::nullopt : std::optional<double>(f.get<double>());
}

void to_json(nlohmann::json& j, const AlertRecord& r) {
    j = nlohmann::json{{"station_id", r.station_id}, {"epoch_ms", r.epoch_ms},
                       {"direction", to_string(r.direction)}, {"level", r.level},
                       {"magnitude_mm", r.magnitude_mm}, {"acknowledged", r.acknowledged}};
}

void from_json(const nlohmann::json& j, AlertRecord& r) {
    r.station_id = j.at("station_id").get<int>();
    r.epoch_ms = j.at("epoch_ms").get<std::int64_t>();
    r.direction = direction_from_string(j.at("direction").get<std::string>());
    r.level = j.at("level").get<int>();
    r.magnitude_mm = j.at("magnitude_mm").get<double>();
    r.acknowledged = j.value("acknowledged", false);
}

}  // namespace geomon
