#include "geomon/simulate.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <map>

#include "geomon/baseline.hpp"
#include "geomon/constellation.hpp"
#include "geomon/datastore.hpp"
#include "geomon/frame.hpp"
#include "geomon/linksim.hpp"
#include "geomon/telemetry.hpp"
#include "geomon/textfmt.hpp"

namespace geomon::sim {

namespace fs = std::filesystem;
using namespace geomon::gnss;

namespace {

struct ErrorAccumulator {
    double max_abs = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double err) {
        max_abs = std::max(max_abs, std::fabs(err));
        sum_sq += err * err;
        ++n;
    }
    double rms() const { return n ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0; }
};

struct DopAccumulator {
    double min = 0.0, max = 0.0, sum = 0.0;
    std::uint64_t n = 0;

    void add(double gdop) {
        if (n == 0) {
            min = max = gdop;
        } else {
            min = std::min(min, gdop);
            max = std::max(max, gdop);
        }
        sum += gdop;
        ++n;
    }
    DopSeriesStats stats() const {
        return {min, max, n ? sum / static_cast<double>(n) : 0.0};
    }
};

nlohmann::ordered_json axis_json(const AxisErrorStats& a) {
    return {{"max_raw_err_mm", a.max_raw_err_mm},
            {"rms_raw_err_mm", a.rms_raw_err_mm},
            {"max_filtered_err_mm", a.max_filtered_err_mm},
            {"rms_filtered_err_mm", a.rms_filtered_err_mm},
            {"gross_errors", a.gross_errors}};
}

nlohmann::ordered_json dop_json(const DopSeriesStats& d) {
    return {{"min_gdop", d.min_gdop}, {"max_gdop", d.max_gdop}, {"mean_gdop", d.mean_gdop}};
}

}  // namespace

nlohmann::ordered_json SimulationSummary::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["constellation"] = constellation;
    j["epochs"] = {{"total", epochs_total},
                   {"processed", epochs_processed},
                   {"solver_failures", solver_failures}};
    j["frames"] = {{"sent", frames_sent},
                   {"lost", frames_lost},
                   {"crc_rejected", frames_crc_rejected},
                   {"stale_dropped", frames_stale_dropped}};
    j["axes"] = {{"east", axis_json(axes[0])},
                 {"north", axis_json(axes[1])},
                 {"up", axis_json(axes[2])}};
    nlohmann::ordered_json alert_list = nlohmann::ordered_json::array();
    for (const auto& a : alerts) {
        alert_list.push_back({{"station_id", a.station_id},
                              {"epoch_ms", a.epoch_ms},
                              {"direction", to_string(a.direction)},
                              {"level", a.level},
                              {"magnitude_mm", a.magnitude_mm}});
    }
    j["alerts"] = alert_list;
    j["dop"] = {{"gps", dop_json(dop_gps)},
                {"gnss", dop_json(dop_gnss)},
                {"ordering_violations", dop_order_violations}};
    j["telemetry"] = {{"published", telemetry_published},
                      {"retransmissions", telemetry_retransmissions},
                      {"duplicates_suppressed", telemetry_duplicates},
                      {"failures", telemetry_failures}};
    j["store"] = {{"displacement_records", displacement_records},
                  {"alert_records", alert_records}};
    return j;
}

SimulationSummary simulate(const ExperimentScenario& sc, const fs::path& out_dir) {
    sc.validate();
    fs::create_directories(out_dir);

    SimulationSummary summary;
    summary.scenario_name = sc.name;
    summary.seed = sc.seed;
    summary.constellation = sc.constellation;
    summary.epochs_total = sc.epoch_count();

    // --- world geometry -----------------------------------------------------
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const EcefPosition ref_pos = to_ecef(
        {sc.site.lat_deg * kDegToRad, sc.site.lon_deg * kDegToRad, sc.site.height_m});
    const EnuFrame ref_frame = EnuFrame::at(ref_pos);
    const EnuDisplacement b0 = sc.baseline_at(0.0);
    const EcefPosition mon_nominal =
        ref_frame.offset_m(b0.east_mm / 1000.0, b0.north_mm / 1000.0, b0.up_mm / 1000.0);

    PseudoAlmanac almanac(sc.seed);
    Rng root(sc.seed);
    Rng amb_rng = root.fork(1);
    Rng noise_rng = root.fork(2);
    Rng spike_rng = root.fork(3);
    Rng clock_rng = root.fork(4);

    StationState ref_station{1, StationRole::Reference, ref_pos, 0.0};
    double mon_clock = 0.0;
    std::map<int, AtmosphericDelays> delays;
    if (sc.model_error_sources) {
        ref_station.clock_error_s = clock_rng.uniform(-5e-5, 5e-5);
        mon_clock = clock_rng.uniform(-5e-5, 5e-5);
    }
    std::map<std::pair<int, int>, std::int64_t> ambiguities;
    const auto ambiguity_for = [&](int station_id, int sat_id) {
        const auto key = std::make_pair(station_id, sat_id);
        auto it = ambiguities.find(key);
        if (it == ambiguities.end()) {
            it = ambiguities
                     .emplace(key, static_cast<std::int64_t>(amb_rng.uniform_index(200'001)) -
                                       100'000)
                     .first;
        }
        return it->second;
    };
    const auto delays_for = [&](int sat_id) -> AtmosphericDelays {
        if (!sc.model_error_sources) return {};
        auto it = delays.find(sat_id);
        if (it == delays.end()) {
            it = delays.emplace(sat_id, AtmosphericDelays{clock_rng.uniform(1e-8, 3e-8),
                                                          clock_rng.uniform(0.5e-8, 2e-8)})
                     .first;
        }
        return it->second;
    };

    const double sigma_cycles = (kL1FreqHz / kSpeedOfLight) * (sc.noise_sigma_mm / 1000.0);

    // --- edge node -----------------------------------------------------------
    const auto filter =
        lowpass::DigitalFilter::design(sc.filter.order, sc.filter.cutoff_hz, sc.epoch_rate_hz);
    pipeline::StationPipeline pipe(sc.station_id,
                                   {sc.classifier, filter, sc.warning});

    wire::LossyLink station_link(sc.station_link);

    // --- cloud side ------------------------------------------------------------
    store::LogStore log_store(out_dir / "store");
    const std::string disp_topic = "site/" + std::to_string(sc.site_id) + "/station/" +
                                   std::to_string(sc.station_id) + "/displacement";
    const std::string alert_topic = "site/" + std::to_string(sc.site_id) + "/station/" +
                                    std::to_string(sc.station_id) + "/alert";
    wire::TelemetryReceiver receiver([&](const wire::TelemetryEnvelope& env) {
        const auto j = nlohmann::json::parse(env.payload.begin(), env.payload.end());
        if (env.topic == alert_topic)
            log_store.append(j.get<AlertRecord>());
        else
            log_store.append(j.get<DisplacementRecord>());
    });
    wire::TelemetrySession disp_session(disp_topic, receiver, sc.telemetry_link);
    wire::LinkSimConfig alert_link = sc.telemetry_link;
    alert_link.seed = sc.telemetry_link.seed ^ 0xA1E7ULL;
    wire::TelemetrySession alert_session(alert_topic, receiver, alert_link);
    std::vector<wire::TelemetryEnvelope> failed_envelopes;  // requeued at the end
    std::vector<bool> failed_is_alert;

    // --- output files -----------------------------------------------------------
    std::ofstream truth_csv(out_dir / "truth.csv");
    truth_csv << "epoch_ms,east_mm,north_mm,up_mm\n";
    std::ofstream dop_csv(out_dir / "dop.csv");
    dop_csv << "epoch_ms,nsats_gps,gdop_gps,pdop_gps,hdop_gps,vdop_gps,"
               "nsats_gnss,gdop_gnss,pdop_gnss,hdop_gnss,vdop_gnss\n";
    std::ofstream frames_bin(out_dir / "frames.bin", std::ios::binary);
    std::ofstream scenario_json(out_dir / "scenario.json");
    scenario_json << sc.to_json().dump(2) << "\n";
    scenario_json.close();

    ErrorAccumulator raw_err[3], filt_err[3];
    DopAccumulator dop_gps_acc, dop_gnss_acc;

    const std::int64_t step_ms = sc.epoch_step_ms();
    std::uint16_t sequence = 0;
    std::uint16_t expected_seq = 0;

    const auto truth_at_epoch = [&](std::int64_t epoch_ms) {
        const double t_s =
            static_cast<double>(epoch_ms - kSimEpochOriginMs) / 1000.0;
        return sc.truth_displacement_at(t_s);
    };

    const auto publish_records = [&](const std::vector<pipeline::ProcessedSample>& samples,
                                     const std::vector<pipeline::AlertEvent>& alert_events) {
        std::vector<wire::TelemetryEnvelope> batch;
        for (const auto& rec : samples) {
            const nlohmann::json j = rec;
            const std::string body = j.dump();
            batch.push_back(disp_session.make_envelope({body.begin(), body.end()}));
        }
        summary.telemetry_published += batch.size();
        for (auto& result : disp_session.publish_stream(std::move(batch))) {
            if (!result.delivered) {
                failed_envelopes.push_back(std::move(result.envelope));
                failed_is_alert.push_back(false);
            }
        }
        for (const auto& ev : alert_events) {
            AlertRecord rec{ev.station_id, ev.epoch_ms, ev.direction, ev.level,
                            ev.magnitude_mm, false};
            const nlohmann::json j = rec;
            const std::string body = j.dump();
            ++summary.telemetry_published;
            auto result = alert_session.publish(alert_session.make_envelope(
                {body.begin(), body.end()}));
            if (!result.delivered) {
                failed_envelopes.push_back(std::move(result.envelope));
                failed_is_alert.push_back(true);
            }
        }
    };

    const auto edge_consume = [&](std::span<const std::uint8_t> pkt) {
        wire::StationFrame f;
        const auto status = wire::decode_frame(pkt, f);
        if (status != wire::DecodeStatus::Ok) {
            ++summary.frames_crc_rejected;
            return;
        }
        // serial-number acceptance: replays and stale reordered frames drop
        const auto delta = static_cast<std::int16_t>(f.sequence - expected_seq);
        if (delta < 0) {
            ++summary.frames_stale_dropped;
            return;
        }
        expected_seq = static_cast<std::uint16_t>(f.sequence + 1);

        pipeline::MonitoringSample ms;
        ms.station_id = f.station_id;
        ms.epoch_ms = static_cast<std::int64_t>(f.epoch_ms);
        ms.displacement = {f.east_um / 1000.0, f.north_um / 1000.0, f.up_um / 1000.0};
        ms.fix_quality = static_cast<FixQuality>(f.fix_quality);

        const auto out = pipe.process_epoch(ms);
        if (!out.processed) return;
        ++summary.epochs_processed;

        const EnuDisplacement truth = truth_at_epoch(ms.epoch_ms);
        const double truth_axis[3] = {truth.east_mm, truth.north_mm, truth.up_mm};
        const double raw_axis[3] = {ms.displacement.east_mm, ms.displacement.north_mm,
                                    ms.displacement.up_mm};
        for (int a = 0; a < 3; ++a) {
            raw_err[a].add(raw_axis[a] - truth_axis[a]);
            filt_err[a].add(pipe.current_output_mm(static_cast<Axis>(a)) - truth_axis[a]);
        }
        for (const auto& s : out.samples) {
            if (s.verdict == outlier::Verdict::GrossError)
                ++summary.axes[static_cast<int>(s.axis)].gross_errors;
        }
        for (const auto& ev : out.alerts) summary.alerts.push_back(ev);
        publish_records(out.samples, out.alerts);
    };

    for (std::int64_t i = 0; i < summary.epochs_total; ++i) {
        const std::int64_t epoch_ms = kSimEpochOriginMs + i * step_ms;
        const double t_s = static_cast<double>(i * step_ms) / 1000.0;

        const EnuDisplacement truth = sc.truth_displacement_at(t_s);
        truth_csv << epoch_ms << ',' << fmt_double(truth.east_mm) << ','
                  << fmt_double(truth.north_mm) << ',' << fmt_double(truth.up_mm) << '\n';

        const EnuDisplacement baseline = sc.baseline_at(t_s);
        const EcefPosition mon_true = ref_frame.offset_m(
            baseline.east_mm / 1000.0, baseline.north_mm / 1000.0, baseline.up_mm / 1000.0);
        const StationState mon_station{sc.station_id, StationRole::Monitoring, mon_true,
                                       mon_clock};

        const auto sats_all = almanac.visible_at(epoch_ms, mon_nominal, all_systems(),
                                                 sc.elevation_mask_deg);
        std::vector<SatelliteEpochState> sats_gps;
        for (const auto& s : sats_all)
            if (s.constellation == ConstellationId::Gps) sats_gps.push_back(s);

        const DopReport dop_g = compute_dop(sats_gps, mon_nominal);
        const DopReport dop_c = compute_dop(sats_all, mon_nominal);
        dop_gps_acc.add(dop_g.gdop);
        dop_gnss_acc.add(dop_c.gdop);
        if (dop_c.gdop > dop_g.gdop + 1e-9) ++summary.dop_order_violations;
        dop_csv << epoch_ms << ',' << dop_g.n_sats << ',' << fmt_double(dop_g.gdop, 4) << ','
                << fmt_double(dop_g.pdop, 4) << ',' << fmt_double(dop_g.hdop, 4) << ','
                << fmt_double(dop_g.vdop, 4) << ',' << dop_c.n_sats << ','
                << fmt_double(dop_c.gdop, 4) << ',' << fmt_double(dop_c.pdop, 4) << ','
                << fmt_double(dop_c.hdop, 4) << ',' << fmt_double(dop_c.vdop, 4) << '\n';

        const auto& solver_sats = (sc.constellation == "gps") ? sats_gps : sats_all;
        std::vector<CarrierPhaseObservation> ref_obs, mon_obs;
        ref_obs.reserve(solver_sats.size());
        mon_obs.reserve(solver_sats.size());
        for (const auto& sat : solver_sats) {
            SatelliteEpochState sat_used = sat;
            if (!sc.model_error_sources) sat_used.clock_error_s = 0.0;
            const AtmosphericDelays d = delays_for(sat.sat_id);
            ref_obs.push_back(synthesize_observation(ref_station, sat_used, epoch_ms,
                                                     kL1FreqHz,
                                                     ambiguity_for(1, sat.sat_id), d,
                                                     sigma_cycles, noise_rng));
            mon_obs.push_back(synthesize_observation(mon_station, sat_used, epoch_ms,
                                                     kL1FreqHz,
                                                     ambiguity_for(sc.station_id, sat.sat_id),
                                                     d, sigma_cycles, noise_rng));
        }

        EnuDisplacement raw;
        try {
            const BaselineSolution sol =
                solve_baseline(solver_sats, ref_obs, mon_obs, ref_pos, mon_nominal);
            raw = sol.displacement_mm;
        } catch (const std::exception&) {
            ++summary.solver_failures;
            continue;
        }

        double raw_axis[3] = {raw.east_mm, raw.north_mm, raw.up_mm};
        for (double& v : raw_axis) {
            if (spike_rng.chance(sc.spike.rate)) {
                const double mag = spike_rng.uniform(sc.spike.min_mm, sc.spike.max_mm);
                v += spike_rng.chance(0.5) ? mag : -mag;
            }
        }

        wire::StationFrame frame;
        frame.station_id = static_cast<std::uint16_t>(sc.station_id);
        frame.sequence = sequence++;
        frame.epoch_ms = static_cast<std::uint64_t>(epoch_ms);
        frame.east_um = static_cast<std::int32_t>(std::llround(raw_axis[0] * 1000.0));
        frame.north_um = static_cast<std::int32_t>(std::llround(raw_axis[1] * 1000.0));
        frame.up_um = static_cast<std::int32_t>(std::llround(raw_axis[2] * 1000.0));
        frame.fix_quality = static_cast<std::uint8_t>(FixQuality::Fixed);

        const auto bytes = wire::encode_frame(frame);
        frames_bin.write(reinterpret_cast<const char*>(bytes.data()),
                         static_cast<std::streamsize>(bytes.size()));
        ++summary.frames_sent;
        station_link.send({bytes.begin(), bytes.end()});
        for (const auto& pkt : station_link.drain()) edge_consume(pkt);
    }

    summary.frames_lost = station_link.counters().dropped;

    // Undelivered publishes are the caller's to requeue: same envelope, same
    // message id, until the store has everything or the cap trips.
    for (int round = 0; round < 50 && !failed_envelopes.empty(); ++round) {
        std::vector<wire::TelemetryEnvelope> retry = std::move(failed_envelopes);
        std::vector<bool> retry_is_alert = std::move(failed_is_alert);
        failed_envelopes.clear();
        failed_is_alert.clear();
        for (std::size_t k = 0; k < retry.size(); ++k) {
            auto& session = retry_is_alert[k] ? alert_session : disp_session;
            auto result = session.publish(std::move(retry[k]));
            if (!result.delivered) {
                failed_envelopes.push_back(std::move(result.envelope));
                failed_is_alert.push_back(retry_is_alert[k]);
            }
        }
    }
    summary.telemetry_failures = failed_envelopes.size();
    receiver.flush();

    summary.telemetry_retransmissions =
        disp_session.retransmissions() + alert_session.retransmissions();
    summary.telemetry_duplicates = receiver.counters().duplicates;

    for (int a = 0; a < 3; ++a) {
        summary.axes[a].max_raw_err_mm = raw_err[a].max_abs;
        summary.axes[a].rms_raw_err_mm = raw_err[a].rms();
        summary.axes[a].max_filtered_err_mm = filt_err[a].max_abs;
        summary.axes[a].rms_filtered_err_mm = filt_err[a].rms();
    }
    summary.dop_gps = dop_gps_acc.stats();
    summary.dop_gnss = dop_gnss_acc.stats();
    summary.displacement_records = log_store.displacement_count(sc.station_id);
    summary.alert_records = log_store.alert_count();

    std::ofstream summary_file(out_dir / "summary.json");
    summary_file << summary.to_json().dump(2) << "\n";
    return summary;
}

}  // namespace geomon::sim
