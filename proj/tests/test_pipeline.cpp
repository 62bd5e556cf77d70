#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "geomon/pipeline.hpp"
#include "geomon/rng.hpp"
#include "test_util.hpp"

using namespace geomon;
using namespace geomon::pipeline;

namespace {

PipelineConfig default_config() {
    return {outlier::ClassifierConfig{}, lowpass::DigitalFilter::design(5, 0.5, 5.0),
            WarningConfig{}};
}

MonitoringSample sample_at(int station, std::int64_t epoch, double e, double n, double u,
                           FixQuality fix = FixQuality::Fixed) {
    return {station, epoch, {e, n, u}, fix};
}

}  // namespace

TEST_CASE("warning evaluator: levels, inclusive boundary, hysteresis") {
    WarningEvaluator w({10.0, 20.0, 30.0});

    CHECK(w.update(4.0).level == 0);
    CHECK_FALSE(w.update(4.0).emitted);

    auto o = w.update(10.0);  // inclusive boundary -> L1
    CHECK(o.level == 1);
    CHECK(o.emitted);

    o = w.update(25.0);  // jump to L2
    CHECK(o.level == 2);
    CHECK(o.emitted);

    // hovering just under the threshold keeps the level armed (10% band)
    o = w.update(18.5);
    CHECK(o.level == 2);
    CHECK_FALSE(o.emitted);
    o = w.update(20.5);  // recross without a new event
    CHECK(o.level == 2);
    CHECK_FALSE(o.emitted);

    // dropping clearly below re-arms
    o = w.update(17.9);  // < 20 * 0.9
    CHECK(o.level == 1);
    o = w.update(25.0);  // and a fresh excursion emits again
    CHECK(o.level == 2);
    CHECK(o.emitted);

    o = w.update(0.0);
    CHECK(o.level == 0);
    o = w.update(35.0);  // straight to L3
    CHECK(o.level == 3);
    CHECK(o.emitted);
}

TEST_CASE("warning config validation") {
    WarningConfig bad;
    bad.horizontal_mm = {10.0, 10.0, 30.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.horizontal_mm = {0.0, 10.0, 30.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("quiet stream produces no alerts and mostly accepts") {
    StationPipeline pipe(7, default_config());
    Rng rng(4);
    std::size_t alerts = 0;
    for (int i = 0; i < 1500; ++i) {
        const auto out = pipe.process_epoch(
            sample_at(7, i * 200, rng.gaussian(), rng.gaussian(), rng.gaussian()));
        REQUIRE(out.processed);
        REQUIRE(out.samples.size() == 3);
        alerts += out.alerts.size();
    }
    CHECK(alerts == 0);
    CHECK(pipe.diagnostics().gross_errors == 0);
    CHECK(pipe.diagnostics().deformation_confirmations == 0);
}

TEST_CASE("single-epoch spike: eliminated, no alert, filtered output continuous") {
    StationPipeline pipe(7, default_config());
    Rng rng(4);
    for (int i = 0; i < 400; ++i)
        pipe.process_epoch(sample_at(7, i * 200, rng.gaussian(), rng.gaussian(), rng.gaussian()));
    const double before = pipe.current_output_mm(Axis::East);

    const auto out = pipe.process_epoch(sample_at(7, 400 * 200, 50.0, 0.0, 0.0));
    REQUIRE(out.processed);
    CHECK(out.alerts.empty());
    CHECK(out.samples[0].verdict == outlier::Verdict::GrossError);
    CHECK_FALSE(out.samples[0].filtered_mm.has_value());
    CHECK(out.samples[1].filtered_mm.has_value());
    // hold-last keeps the filtered trace continuous through the spike
    CHECK(near_abs(pipe.current_output_mm(Axis::East), before, 0.5));
    CHECK(pipe.diagnostics().gross_errors == 1);
}

TEST_CASE("sustained up step: confirmation then exactly one L1 vertical alert") {
    StationPipeline pipe(7, default_config());
    Rng rng(4);
    for (int i = 0; i < 400; ++i)
        pipe.process_epoch(sample_at(7, i * 200, rng.gaussian() * 0.5, rng.gaussian() * 0.5,
                                     rng.gaussian() * 0.5));

    std::vector<AlertEvent> alerts;
    bool confirmed = false;
    for (int i = 400; i < 800; ++i) {
        const auto out = pipe.process_epoch(sample_at(7, i * 200, rng.gaussian() * 0.5,
                                                      rng.gaussian() * 0.5,
                                                      10.0 + rng.gaussian() * 0.5));
        for (const auto& s : out.samples)
            if (s.axis == Axis::Up && s.verdict == outlier::Verdict::DeformationConfirmed)
                confirmed = true;
        for (const auto& a : out.alerts) alerts.push_back(a);
    }
    CHECK(confirmed);
    REQUIRE(alerts.size() == 1);
    CHECK(alerts[0].direction == AlertDirection::Vertical);
    CHECK(alerts[0].level == 1);
    CHECK(alerts[0].magnitude_mm >= 10.0);
    CHECK(pipe.diagnostics().deformation_confirmations >= 1);
}

TEST_CASE("non-fixed samples are counted and skipped") {
    StationPipeline pipe(7, default_config());
    const auto out = pipe.process_epoch(sample_at(7, 0, 1, 1, 1, FixQuality::Float));
    CHECK_FALSE(out.processed);
    CHECK(out.samples.empty());
    CHECK(pipe.diagnostics().skipped_fix == 1);
}

TEST_CASE("out-of-order epochs are rejected with a counted diagnostic") {
    StationPipeline pipe(7, default_config());
    CHECK(pipe.process_epoch(sample_at(7, 1000, 0, 0, 0)).processed);
    CHECK_FALSE(pipe.process_epoch(sample_at(7, 500, 0, 0, 0)).processed);
    CHECK(pipe.diagnostics().rejected_out_of_order == 1);
    // equal epochs are allowed (non-decreasing)
    CHECK(pipe.process_epoch(sample_at(7, 1000, 0, 0, 0)).processed);
}

TEST_CASE("identical streams produce identical outputs") {
    const auto run = [] {
        StationPipeline pipe(3, default_config());
        Rng rng(99);
        std::vector<ProcessedSample> all;
        std::vector<AlertEvent> alerts;
        for (int i = 0; i < 600; ++i) {
            double u = rng.gaussian() * 2.0;
            if (i > 300) u += 12.0;
            if (i % 97 == 0) u += 40.0;
            const auto out = pipe.process_epoch(sample_at(3, i * 200, rng.gaussian() * 2.0,
                                                          rng.gaussian() * 2.0, u));
            for (const auto& s : out.samples) all.push_back(s);
            for (const auto& a : out.alerts) alerts.push_back(a);
        }
        return std::make_pair(all, alerts);
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.first.size() == b.first.size());
    for (std::size_t i = 0; i < a.first.size(); ++i) CHECK(a.first[i] == b.first[i]);
    REQUIRE(a.second.size() == b.second.size());
}

TEST_CASE("alert levels within one excursion are non-decreasing") {
    StationPipeline pipe(7, default_config());
    Rng rng(4);
    for (int i = 0; i < 400; ++i)
        pipe.process_epoch(sample_at(7, i * 200, rng.gaussian() * 0.3, rng.gaussian() * 0.3,
                                     rng.gaussian() * 0.3));
    // ramp the up axis through all three thresholds
    std::vector<int> levels;
    double level_mm = 0.0;
    for (int i = 400; i < 1200; ++i) {
        level_mm = std::min(35.0, level_mm + 0.12);
        const auto out = pipe.process_epoch(
            sample_at(7, i * 200, rng.gaussian() * 0.3, rng.gaussian() * 0.3,
                      level_mm + rng.gaussian() * 0.3));
        for (const auto& a : out.alerts)
            if (a.direction == AlertDirection::Vertical) levels.push_back(a.level);
    }
    REQUIRE(!levels.empty());
    for (std::size_t i = 1; i < levels.size(); ++i) CHECK(levels[i] >= levels[i - 1]);
    CHECK(levels.back() == 3);
}

TEST_CASE("error reduction: filtered beats raw on max and rms, whole run and 5-minute windows") {
    StationPipeline pipe(7, default_config());
    Rng rng(31);
    const int total = 6000;  // 20 minutes at 5 Hz
    const int window = 1500;  // 5 minutes

    std::vector<double> raw_err, filt_err;
    for (int i = 0; i < total; ++i) {
        const double truth = i > 3000 ? 6.0 : 0.0;  // one genuine move
        double e = truth + rng.gaussian() * 3.0;
        if (rng.chance(0.01)) e += rng.chance(0.5) ? 50.0 : -50.0;
        const auto out = pipe.process_epoch(sample_at(7, i * 200, e, 0.0, 0.0));
        REQUIRE(out.processed);
        raw_err.push_back(std::fabs(e - truth));
        filt_err.push_back(std::fabs(pipe.current_output_mm(Axis::East) - truth));
    }

    const auto stats = [](const std::vector<double>& xs, int from, int to) {
        double mx = 0, ss = 0;
        for (int i = from; i < to; ++i) {
            mx = std::max(mx, xs[static_cast<std::size_t>(i)]);
            ss += xs[static_cast<std::size_t>(i)] * xs[static_cast<std::size_t>(i)];
        }
        return std::make_pair(mx, std::sqrt(ss / (to - from)));
    };

    const auto [raw_max, raw_rms] = stats(raw_err, 0, total);
    const auto [filt_max, filt_rms] = stats(filt_err, 0, total);
    CHECK(filt_max <= raw_max);
    CHECK(filt_rms < raw_rms);

    for (int start = 0; start + window <= total; start += window) {
        const auto [rm, rr] = stats(raw_err, start, start + window);
        const auto [fm, fr] = stats(filt_err, start, start + window);
        CHECK(fr < rr);
        CHECK(fm <= rm);
    }
}

TEST_CASE("warnings hold until warm-up completes, then fire on validated data") {
    StationPipeline pipe(7, default_config());
    // a large standing displacement from the first epoch: unvalidated during
    // warm-up, alert-worthy the moment the slice is established
    std::vector<AlertEvent> alerts;
    for (int i = 0; i < 40; ++i) {
        const auto out = pipe.process_epoch(sample_at(7, i * 200, 0.0, 0.0, 50.0));
        for (const auto& a : out.alerts) alerts.push_back(a);
        if (i < 31) CHECK(alerts.empty());
    }
    REQUIRE(alerts.size() == 1);
    CHECK(alerts[0].direction == AlertDirection::Vertical);
    CHECK(alerts[0].level == 3);  // 50 mm clears every threshold at once
    CHECK(alerts[0].epoch_ms == 31 * 200);
}
