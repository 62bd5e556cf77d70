#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomon/geodesy.hpp"
#include "geomon/linksim.hpp"
#include "geomon/outlier.hpp"
#include "geomon/pipeline.hpp"

namespace geomon::sim {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Piecewise-constant baseline truth: holds from `from_s` onward.
struct TruthStep {
    double from_s = 0.0;
    double east_mm = 0.0;
    double north_mm = 0.0;
    double up_mm = 0.0;
};

struct SpikeConfig {
    double rate = 0.0;     // per-axis per-epoch probability
    double min_mm = 30.0;  // magnitude range, sign drawn at random
    double max_mm = 50.0;
};

struct SiteConfig {
    double lat_deg = 36.06;
    double lon_deg = 103.73;
    double height_m = 1520.0;
};

struct FilterChoice {
    int order = 5;
    double cutoff_hz = 0.5;
};

struct ExperimentScenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    double duration_s = 600.0;
    double epoch_rate_hz = 5.0;  // receiver output rate
    std::string constellation = "gnss";  // "gnss" (combined) or "gps"
    SiteConfig site;
    int site_id = 1;
    int station_id = 7;
    std::vector<TruthStep> truth{{0.0, 800.0, 0.0, 0.0}};  // baseline, mm ENU
    double noise_sigma_mm = 3.0;  // per-observation carrier noise, range-equivalent
    SpikeConfig spike;
    double elevation_mask_deg = 10.0;
    // Clock errors and atmospheric delays cancel in the double differences;
    // modelling them adds float-rounding noise well below a micrometer, so
    // exact-recovery scenarios keep them off.
    bool model_error_sources = false;

    outlier::ClassifierConfig classifier;
    FilterChoice filter;
    pipeline::WarningConfig warning;
    wire::LinkSimConfig station_link;    // station -> edge frames
    wire::LinkSimConfig telemetry_link;  // edge -> cloud publishes

    static ExperimentScenario from_file(const std::filesystem::path& path);
    static ExperimentScenario from_json(const nlohmann::json& j);
    nlohmann::ordered_json to_json() const;

    void validate() const;  // throws ScenarioError

    /// Baseline at elapsed time t (seconds), ENU mm.
    EnuDisplacement baseline_at(double t_s) const;
    /// Displacement truth relative to the initial baseline, ENU mm.
    EnuDisplacement truth_displacement_at(double t_s) const;

    std::int64_t epoch_count() const;
    std::int64_t epoch_step_ms() const;
};

}  // namespace geomon::sim
