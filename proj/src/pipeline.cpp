#include "geomon/pipeline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace geomon::pipeline {

void WarningConfig::validate() const {
    for (const auto& t : {horizontal_mm, vertical_mm}) {
        if (!(t[0] > 0.0 && t[0] < t[1] && t[1] < t[2]))
            throw std::invalid_argument("warning thresholds must be positive and ascending");
    }
}

WarningEvaluator::WarningEvaluator(const std::array<double, 3>& thresholds_mm, double hysteresis)
    : thresholds_(thresholds_mm), hysteresis_(hysteresis) {
    if (!(thresholds_[0] > 0.0 && thresholds_[0] < thresholds_[1] &&
          thresholds_[1] < thresholds_[2]))
        throw std::invalid_argument("warning thresholds must be positive and ascending");
    if (hysteresis < 0.0 || hysteresis >= 1.0)
        throw std::invalid_argument("hysteresis fraction must lie in [0, 1)");
}

WarningEvaluator::Outcome WarningEvaluator::update(double magnitude_mm) {
    int target = 0;
    for (int i = 0; i < 3; ++i) {
        if (magnitude_mm >= thresholds_[i]) target = i + 1;  // inclusive boundary
    }
    if (target > level_) {
        level_ = target;
        return {level_, true};
    }
    // Re-arm a level only once the magnitude is clearly below its threshold.
    while (level_ > target && magnitude_mm < thresholds_[level_ - 1] * (1.0 - hysteresis_)) {
        --level_;
    }
    return {level_, false};
}

StationPipeline::StationPipeline(int station_id, const PipelineConfig& cfg)
    : station_id_(station_id),
      cfg_(cfg),
      channels_{Channel{outlier::StreamClassifier(cfg.classifier), cfg.filter.make_state()},
                Channel{outlier::StreamClassifier(cfg.classifier), cfg.filter.make_state()},
                Channel{outlier::StreamClassifier(cfg.classifier), cfg.filter.make_state()}},
      horizontal_(cfg.warning.horizontal_mm),
      vertical_(cfg.warning.vertical_mm),
      last_epoch_ms_(std::numeric_limits<std::int64_t>::min()) {
    cfg_.warning.validate();
}

StationPipeline::EpochOutput StationPipeline::process_epoch(const MonitoringSample& sample) {
    EpochOutput out;
    if (sample.fix_quality != FixQuality::Fixed) {
        ++diag_.skipped_fix;
        return out;
    }
    if (sample.epoch_ms < last_epoch_ms_) {
        ++diag_.rejected_out_of_order;
        return out;
    }
    last_epoch_ms_ = sample.epoch_ms;
    ++diag_.processed_epochs;
    out.processed = true;

    const double raw[3] = {sample.displacement.east_mm, sample.displacement.north_mm,
                           sample.displacement.up_mm};
    for (int i = 0; i < 3; ++i) {
        Channel& ch = channels_[i];
        const outlier::Verdict verdict = ch.classifier.classify(raw[i]);

        double input = raw[i];
        if (verdict == outlier::Verdict::GrossError) {
            ++diag_.gross_errors;
            // hold-last: the filter keeps its cadence over the gap
            if (ch.seen_input) input = ch.last_input_mm;
        } else if (verdict == outlier::Verdict::DeformationConfirmed) {
            ++diag_.deformation_confirmations;
            ch.state.prime(cfg_.filter, ch.classifier.slice_mean_mm());
        }
        if (!ch.ever_warmed && ch.classifier.warmed_up()) {
            // warm-up accepted everything, blunders included; restart the
            // filter at the established mean so their tails do not linger
            ch.ever_warmed = true;
            ch.state.prime(cfg_.filter, ch.classifier.slice_mean_mm());
        }

        const double y = lowpass::process_sample(cfg_.filter, ch.state, input);
        ch.last_input_mm = input;
        ch.last_output_mm = y;
        ch.seen_input = true;

        ProcessedSample ps;
        ps.station_id = station_id_;
        ps.epoch_ms = sample.epoch_ms;
        ps.axis = static_cast<Axis>(i);
        ps.raw_mm = raw[i];
        ps.verdict = verdict;
        if (verdict != outlier::Verdict::GrossError) ps.filtered_mm = y;
        out.samples.push_back(ps);
    }

    if (channels_[0].ever_warmed && channels_[1].ever_warmed && channels_[2].ever_warmed) {
        const double h = std::hypot(channels_[0].last_output_mm, channels_[1].last_output_mm);
        const double v = std::fabs(channels_[2].last_output_mm);
        const auto ho = horizontal_.update(h);
        if (ho.emitted)
            out.alerts.push_back({station_id_, sample.epoch_ms, AlertDirection::Horizontal,
                                  ho.level, h});
        const auto vo = vertical_.update(v);
        if (vo.emitted)
            out.alerts.push_back({station_id_, sample.epoch_ms, AlertDirection::Vertical,
                                  vo.level, v});
    }
    return out;
}

double StationPipeline::current_output_mm(Axis axis) const {
    return channels_[static_cast<int>(axis)].last_output_mm;
}

}  // namespace geomon::pipeline
