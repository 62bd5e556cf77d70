#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "geomon/outlier.hpp"

namespace geomon {

enum class Axis { East = 0, North = 1, Up = 2 };
enum class AlertDirection { Horizontal = 0, Vertical = 1 };
enum class FixQuality : std::uint8_t { None = 0, Float = 1, Fixed = 2 };

const char* to_string(Axis a);
const char* to_string(AlertDirection d);
const char* to_string(FixQuality q);
Axis axis_from_string(const std::string& s);
AlertDirection direction_from_string(const std::string& s);
outlier::Verdict verdict_from_string(const std::string& s);

/// One processed displacement value, keyed by (station_id, epoch_ms, axis).
/// filtered_mm is absent exactly when the sample was eliminated.
struct DisplacementRecord {
    int station_id = 0;
    std::int64_t epoch_ms = 0;
    Axis axis = Axis::East;
    double raw_mm = 0.0;
    std::optional<double> filtered_mm;
    outlier::Verdict verdict = outlier::Verdict::Accept;

    bool operator==(const DisplacementRecord&) const = default;
};

/// One warning event, keyed by (station_id, epoch_ms, direction).
struct AlertRecord {
    int station_id = 0;
    std::int64_t epoch_ms = 0;
    AlertDirection direction = AlertDirection::Horizontal;
    int level = 1;  // 1..3
    double magnitude_mm = 0.0;
    bool acknowledged = false;

    bool operator==(const AlertRecord&) const = default;
};

void to_json(nlohmann::json& j, const DisplacementRecord& r);
void from_json(const nlohmann::json& j, DisplacementRecord& r);
void to_json(nlohmann::json& j, const AlertRecord& r);
void from_json(const nlohmann::json& j, AlertRecord& r);

}  // namespace geomon
