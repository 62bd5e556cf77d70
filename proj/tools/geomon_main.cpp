// geomon command line: simulate scenarios, design filters, process recorded
// streams, replay frames through the link simulator, serve queries, report.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "geomon/datastore.hpp"
#include "geomon/frame.hpp"
#include "geomon/linksim.hpp"
#include "geomon/lowpass.hpp"
#include "geomon/pipeline.hpp"
#include "geomon/report.hpp"
#include "geomon/scenario.hpp"
#include "geomon/service.hpp"
#include "geomon/simulate.hpp"
#include "geomon/textfmt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct PipelineFlags {
    std::size_t slice_len = 64;
    double sigma_multiplier = 3.0;
    double threshold_w_mm = 20.0;
    std::size_t confirm_count = 5;
    double sigma_floor_mm = 0.1;
    int filter_order = 5;
    double cutoff_hz = 0.5;
    double rate_hz = 5.0;

    void add_to(CLI::App& app) {
        app.add_option("--slice-len", slice_len, "time-slice length T, samples");
        app.add_option("--sigma-multiplier", sigma_multiplier, "residual multiplier k");
        app.add_option("--threshold-w", threshold_w_mm, "deformation/gross bound W, mm");
        app.add_option("--confirm-count", confirm_count, "samples confirming deformation");
        app.add_option("--sigma-floor", sigma_floor_mm, "sigma floor, mm");
        app.add_option("--filter-order", filter_order, "Butterworth order");
        app.add_option("--cutoff", cutoff_hz, "low-pass cutoff, Hz");
        app.add_option("--rate", rate_hz, "sample rate, Hz");
    }

    geomon::outlier::ClassifierConfig classifier() const {
        return {slice_len, sigma_multiplier, threshold_w_mm, confirm_count, sigma_floor_mm};
    }
    geomon::lowpass::DigitalFilter filter() const {
        return geomon::lowpass::DigitalFilter::design(filter_order, cutoff_hz, rate_hz);
    }
};

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override) {
    auto scenario = geomon::sim::ExperimentScenario::from_file(scenario_path);
    if (seed_override) {
        scenario.seed = *seed_override;
        // links re-derive from the run seed unless the file pinned them
        scenario.station_link.seed = scenario.seed ^ 0x5747A110ULL;
        scenario.telemetry_link.seed = scenario.seed ^ 0x7E1E0ULL;
    }
    const auto summary = geomon::sim::simulate(scenario, out_dir);
    std::cout << summary.to_json().dump(2) << "\n";
    return kExitOk;
}

int cmd_design_filter(double passband_db, double stopband_db, double passband_hz,
                      double stopband_hz, double rate_hz, double cutoff_hz, int order,
                      int table_points) {
    geomon::lowpass::FilterDesignSpec spec;
    spec.passband_atten_db = passband_db;
    spec.stopband_atten_db = stopband_db;
    spec.passband_edge_hz = passband_hz;
    spec.stopband_edge_hz = stopband_hz;
    spec.sample_rate_hz = rate_hz;
    spec.cutoff_hz = cutoff_hz;

    const int n = order > 0 ? order : geomon::lowpass::required_order(spec);
    const auto filter = geomon::lowpass::DigitalFilter::design(n, cutoff_hz, rate_hz);

    std::cout << "order\t" << n << "\n";
    std::cout << "cutoff_hz\t" << geomon::fmt_double(cutoff_hz, 4) << "\n";
    std::cout << "sample_rate_hz\t" << geomon::fmt_double(rate_hz, 4) << "\n";
    std::cout << "section\tb0\tb1\tb2\ta1\ta2\n";
    int idx = 0;
    for (const auto& s : filter.sections()) {
        std::cout << idx++ << '\t' << geomon::fmt_double_full(s.b0) << '\t'
                  << geomon::fmt_double_full(s.b1) << '\t' << geomon::fmt_double_full(s.b2)
                  << '\t' << geomon::fmt_double_full(s.a1) << '\t'
                  << geomon::fmt_double_full(s.a2) << '\n';
    }
    std::cout << "freq_hz\tgain_db\n";
    for (int i = 0; i <= table_points; ++i) {
        const double f = (rate_hz / 2.0) * i / table_points;
        const double g = filter.magnitude(f);
        const double db = 20.0 * std::log10(std::max(g, 1e-12));
        std::cout << geomon::fmt_double(f, 4) << '\t' << geomon::fmt_double(db, 3) << '\n';
    }
    return kExitOk;
}

int cmd_process(const std::string& in_path, const std::string& out_path,
                const PipelineFlags& flags) {
    std::ifstream in(in_path);
    if (!in) {
        std::cerr << "cannot open input: " << in_path << "\n";
        return kExitData;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot open output: " << out_path << "\n";
        return kExitData;
    }

    geomon::outlier::StreamClassifier classifier(flags.classifier());
    const auto filter = flags.filter();
    auto state = filter.make_state();

    std::string line;
    std::size_t line_no = 0, processed = 0, eliminated = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::int64_t epoch_ms;
        double value;
        if (!(ls >> epoch_ms >> value)) {
            std::cerr << in_path << ":" << line_no << ": expected `epoch_ms value_mm`\n";
            return kExitData;
        }
        const auto verdict = classifier.classify(value);
        if (verdict == geomon::outlier::Verdict::DeformationConfirmed)
            state.prime(filter, classifier.slice_mean_mm());
        out << epoch_ms << ' ' << geomon::fmt_double(value) << ' '
            << geomon::outlier::to_string(verdict);
        if (verdict != geomon::outlier::Verdict::GrossError) {
            out << ' ' << geomon::fmt_double(geomon::lowpass::process_sample(filter, state, value));
        } else {
            ++eliminated;
        }
        out << '\n';
        ++processed;
    }
    std::cerr << "processed " << processed << " samples, eliminated " << eliminated << "\n";
    return kExitOk;
}

int cmd_replay(const std::string& frames_path, const std::string& store_dir,
               const geomon::wire::LinkSimConfig& link_cfg, const PipelineFlags& flags) {
    std::ifstream in(frames_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot open frames: " << frames_path << "\n";
        return kExitData;
    }
    geomon::wire::LossyLink link(link_cfg);
    std::vector<std::uint8_t> buf(geomon::wire::kStationFrameSize);
    std::size_t sent = 0;
    while (in.read(reinterpret_cast<char*>(buf.data()),
                   static_cast<std::streamsize>(buf.size()))) {
        link.send(buf);
        ++sent;
    }

    geomon::store::LogStore store(store_dir);
    std::map<int, std::unique_ptr<geomon::pipeline::StationPipeline>> pipes;
    geomon::pipeline::PipelineConfig pcfg{flags.classifier(), flags.filter(), {}};

    std::size_t crc_rejected = 0, stale = 0, stored = 0, alerts = 0;
    std::map<int, std::uint16_t> expected_seq;
    for (const auto& pkt : link.drain()) {
        geomon::wire::StationFrame f;
        if (geomon::wire::decode_frame(pkt, f) != geomon::wire::DecodeStatus::Ok) {
            ++crc_rejected;
            continue;
        }
        auto [it, fresh] = expected_seq.try_emplace(f.station_id, f.sequence);
        if (!fresh && static_cast<std::int16_t>(f.sequence - it->second) < 0) {
            ++stale;
            continue;
        }
        it->second = static_cast<std::uint16_t>(f.sequence + 1);

        auto& pipe = pipes[f.station_id];
        if (!pipe)
            pipe = std::make_unique<geomon::pipeline::StationPipeline>(f.station_id, pcfg);
        geomon::pipeline::MonitoringSample ms{
            f.station_id, static_cast<std::int64_t>(f.epoch_ms),
            {f.east_um / 1000.0, f.north_um / 1000.0, f.up_um / 1000.0},
            static_cast<geomon::FixQuality>(f.fix_quality)};
        const auto out = pipe->process_epoch(ms);
        for (const auto& s : out.samples) {
            store.append(s);
            ++stored;
        }
        for (const auto& ev : out.alerts) {
            store.append(geomon::AlertRecord{ev.station_id, ev.epoch_ms, ev.direction,
                                             ev.level, ev.magnitude_mm, false});
            ++alerts;
        }
    }
    std::cout << "frames_read\t" << sent << "\n"
              << "link_dropped\t" << link.counters().dropped << "\n"
              << "link_duplicated\t" << link.counters().duplicated << "\n"
              << "link_corrupted\t" << link.counters().corrupted << "\n"
              << "crc_rejected\t" << crc_rejected << "\n"
              << "stale_dropped\t" << stale << "\n"
              << "records_stored\t" << stored << "\n"
              << "alerts_stored\t" << alerts << "\n";
    return kExitOk;
}

int cmd_serve(const std::string& store_dir, const std::string& bind) {
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos) {
        std::cerr << "--bind expects host:port\n";
        return kExitUsage;
    }
    const std::string host = bind.substr(0, colon);
    const int port = std::stoi(bind.substr(colon + 1));

    geomon::store::LogStore store(store_dir);
    geomon::store::QueryService service(store);
    std::cerr << "serving " << store_dir << " on " << host << ":" << port << "\n";
    if (!service.run(host, port)) {
        std::cerr << "failed to bind " << bind << "\n";
        return kExitData;
    }
    return kExitOk;
}

int cmd_report(const std::string& store_dir, const std::string& out_dir,
               const std::string& truth, const std::string& dop) {
    geomon::sim::ReportOptions opt;
    opt.store_dir = store_dir;
    opt.out_dir = out_dir;
    if (!truth.empty()) opt.truth_csv = truth;
    if (!dop.empty()) opt.dop_csv = dop;
    const auto result = geomon::sim::write_report(opt);
    std::cout << "report written to " << out_dir << " (" << result.record_rows
              << " records, truth " << (result.truth_available ? "available" : "missing")
              << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GNSS-RTK deformation monitoring toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a scenario through the full chain");
    std::string scenario_path, sim_out;
    std::optional<std::uint64_t> seed_override;
    sim->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--seed", seed_override, "override the scenario seed");

    // design-filter
    auto* design = app.add_subcommand("design-filter", "Butterworth low-pass design");
    double passband_db = 1.0, stopband_db = 20.0, passband_hz = 0.5, stopband_hz = 1.0;
    double rate_hz = 5.0, cutoff_hz = 0.5;
    int order = 0, table_points = 50;
    design->add_option("--passband-db", passband_db, "max passband attenuation, dB");
    design->add_option("--stopband-db", stopband_db, "min stopband attenuation, dB");
    design->add_option("--passband-hz", passband_hz, "passband edge, Hz");
    design->add_option("--stopband-hz", stopband_hz, "stopband edge, Hz");
    design->add_option("--rate", rate_hz, "sample rate, Hz");
    design->add_option("--cutoff", cutoff_hz, "cutoff, Hz");
    design->add_option("--order", order, "fix the order instead of deriving it");
    design->add_option("--table-points", table_points, "gain table rows");

    // process
    auto* proc = app.add_subcommand("process", "offline outlier+low-pass over a sample file");
    std::string proc_in, proc_out;
    PipelineFlags proc_flags;
    proc->add_option("--in", proc_in, "input file, `epoch_ms value_mm` per line")->required();
    proc->add_option("--out", proc_out, "output file")->required();
    proc_flags.add_to(*proc);

    // replay
    auto* replay = app.add_subcommand("replay", "push recorded frames through the link simulator");
    std::string replay_frames, replay_store;
    geomon::wire::LinkSimConfig replay_link;
    PipelineFlags replay_flags;
    replay->add_option("--frames", replay_frames, "frames.bin from a simulate run")->required();
    replay->add_option("--out", replay_store, "store directory to fill")->required();
    replay->add_option("--loss", replay_link.loss_prob, "frame loss probability");
    replay->add_option("--duplicate", replay_link.duplicate_prob, "duplication probability");
    replay->add_option("--corrupt", replay_link.corrupt_prob, "bit-flip probability");
    replay->add_option("--reorder-window", replay_link.reorder_window, "reorder window, frames");
    replay->add_option("--seed", replay_link.seed, "link seed");
    replay_flags.add_to(*replay);

    // serve
    auto* serve = app.add_subcommand("serve", "read-only query endpoints over a store");
    std::string serve_store, bind = "127.0.0.1:8089";
    serve->add_option("--store", serve_store, "store directory")->required();
    serve->add_option("--bind", bind, "host:port");

    // report
    auto* report = app.add_subcommand("report", "error tables and plot-ready series");
    std::string report_store, report_out, report_truth, report_dop;
    report->add_option("--store", report_store, "store directory")->required();
    report->add_option("--out", report_out, "output directory")->required();
    report->add_option("--truth", report_truth, "truth.csv from the simulate run");
    report->add_option("--dop", report_dop, "dop.csv from the simulate run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(scenario_path, sim_out, seed_override);
        if (design->parsed())
            return cmd_design_filter(passband_db, stopband_db, passband_hz, stopband_hz,
                                     rate_hz, cutoff_hz, order, table_points);
        if (proc->parsed()) return cmd_process(proc_in, proc_out, proc_flags);
        if (replay->parsed())
            return cmd_replay(replay_frames, replay_store, replay_link, replay_flags);
        if (serve->parsed()) return cmd_serve(serve_store, bind);
        if (report->parsed())
            return cmd_report(report_store, report_out, report_truth, report_dop);
    } catch (const geomon::sim::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
