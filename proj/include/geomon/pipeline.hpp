#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "geomon/geodesy.hpp"
#include "geomon/lowpass.hpp"
#include "geomon/outlier.hpp"
#include "geomon/records.hpp"

namespace geomon::pipeline {

struct MonitoringSample {
    int station_id = 0;
    std::int64_t epoch_ms = 0;
    EnuDisplacement displacement;
    FixQuality fix_quality = FixQuality::Fixed;
};

using ProcessedSample = DisplacementRecord;

/// Three ascending thresholds per direction, millimeters.
struct WarningConfig {
    std::array<double, 3> horizontal_mm{10.0, 20.0, 30.0};
    std::array<double, 3> vertical_mm{10.0, 20.0, 30.0};

    void validate() const;  // throws std::invalid_argument
};

struct AlertEvent {
    int station_id = 0;
    std::int64_t epoch_ms = 0;
    AlertDirection direction = AlertDirection::Horizontal;
    int level = 1;  // 1..3
    double magnitude_mm = 0.0;
};

// Three-level threshold watcher for one direction. Level is the highest
// threshold index the magnitude reaches (inclusive). Events fire only on a
// level increase; dropping back re-arms a level once the magnitude falls 10%
// below its threshold, so a value hovering on a boundary cannot flap.
class WarningEvaluator {
public:
    explicit WarningEvaluator(const std::array<double, 3>& thresholds_mm,
                              double hysteresis = 0.10);

    struct Outcome {
        int level = 0;  // 0 = none
        bool emitted = false;
    };
    Outcome update(double magnitude_mm);

    int level() const { return level_; }

private:
    std::array<double, 3> thresholds_;
    double hysteresis_;
    int level_ = 0;
};

struct PipelineConfig {
    outlier::ClassifierConfig classifier;
    lowpass::DigitalFilter filter;
    WarningConfig warning;
};

// The per-station edge chain: classify each axis, low-pass what survives,
// evaluate warnings on the filtered horizontal magnitude and |up|.
//
// Eliminated samples hold the previous filter input so the IIR state keeps
// a regular cadence; their records carry no filtered value. A confirmed
// deformation reseeds the classifier slice and re-primes the filter at the
// new level so the step is not smeared. Out-of-order epochs are rejected and
// counted; non-Fixed solutions are skipped and counted.
//
// Warnings stay quiet until every axis has completed its initial warm-up:
// before that the classifier accepts everything, including blunders, and an
// unvalidated excursion must not page anyone. The gate latches, so a
// post-confirmation reseed does not re-silence alerts.
class StationPipeline {
public:
    StationPipeline(int station_id, const PipelineConfig& cfg);

    struct EpochOutput {
        bool processed = false;
        std::vector<ProcessedSample> samples;  // one per axis when processed
        std::vector<AlertEvent> alerts;
    };

    EpochOutput process_epoch(const MonitoringSample& sample);

    /// Current filter output for an axis (the value warnings see).
    double current_output_mm(Axis axis) const;

    struct Diagnostics {
        std::uint64_t processed_epochs = 0;
        std::uint64_t skipped_fix = 0;
        std::uint64_t rejected_out_of_order = 0;
        std::uint64_t gross_errors = 0;
        std::uint64_t deformation_confirmations = 0;
    };
    const Diagnostics& diagnostics() const { return diag_; }

    int station_id() const { return station_id_; }

private:
    struct Channel {
        outlier::StreamClassifier classifier;
        lowpass::StreamState state;
        double last_input_mm = 0.0;
        double last_output_mm = 0.0;
        bool seen_input = false;
        bool ever_warmed = false;
    };

    int station_id_;
    PipelineConfig cfg_;
    std::array<Channel, 3> channels_;
    WarningEvaluator horizontal_;
    WarningEvaluator vertical_;
    std::int64_t last_epoch_ms_;
    Diagnostics diag_;
};

}  // namespace geomon::pipeline
