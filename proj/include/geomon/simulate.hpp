#pragma once

#include <array>
#include <filesystem>

#include <json.hpp>

#include "geomon/pipeline.hpp"
#include "geomon/scenario.hpp"

namespace geomon::sim {

struct AxisErrorStats {
    double max_raw_err_mm = 0.0;
    double rms_raw_err_mm = 0.0;
    double max_filtered_err_mm = 0.0;
    double rms_filtered_err_mm = 0.0;
    std::uint64_t gross_errors = 0;
};

struct DopSeriesStats {
    double min_gdop = 0.0;
    double max_gdop = 0.0;
    double mean_gdop = 0.0;
};

struct SimulationSummary {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::string constellation;

    std::int64_t epochs_total = 0;
    std::int64_t epochs_processed = 0;  // frames that reached the pipeline
    std::uint64_t solver_failures = 0;

    std::uint64_t frames_sent = 0;
    std::uint64_t frames_lost = 0;
    std::uint64_t frames_crc_rejected = 0;
    std::uint64_t frames_stale_dropped = 0;

    std::array<AxisErrorStats, 3> axes;  // east, north, up
    std::vector<pipeline::AlertEvent> alerts;

    DopSeriesStats dop_gps;
    DopSeriesStats dop_gnss;
    std::uint64_t dop_order_violations = 0;

    std::uint64_t telemetry_published = 0;
    std::uint64_t telemetry_retransmissions = 0;
    std::uint64_t telemetry_duplicates = 0;
    std::uint64_t telemetry_failures = 0;

    std::uint64_t displacement_records = 0;
    std::uint64_t alert_records = 0;

    nlohmann::ordered_json to_json() const;
};

// Runs the whole chain for one scenario: synthetic constellation and carrier
// phases, double-difference baseline solve, spike injection, station frames
// over the lossy link, the edge pipeline, telemetry into the store.
//
// Writes under out_dir: store/, summary.json, truth.csv, dop.csv, frames.bin
// and scenario.json (the effective configuration). Deterministic for a given
// scenario: identical runs produce byte-identical outputs.
SimulationSummary simulate(const ExperimentScenario& scenario,
                           const std::filesystem::path& out_dir);

/// Epoch timestamps start here (ms); truth rows in truth.csv use the same origin.
inline constexpr std::int64_t kSimEpochOriginMs = 1'700'000'000'000;

}  // namespace geomon::sim
