#include "geomon/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "geomon/datastore.hpp"
#include "geomon/textfmt.hpp"

namespace geomon::sim {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

struct Figures {
    double max_abs = 0.0;
    double min_abs = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double v) {
        const double a = std::fabs(v);
        if (n == 0)
            min_abs = a;
        else
            min_abs = std::min(min_abs, a);
        max_abs = std::max(max_abs, a);
        sum_sq += v * v;
        ++n;
    }
    double rms() const { return n ? std::sqrt(sum_sq / static_cast<double>(n)) : 0.0; }
};

}  // namespace

ReportResult write_report(const ReportOptions& options) {
    ReportResult result;
    fs::create_directories(options.out_dir);

    store::LogStore log(options.store_dir);
    const auto stations = log.stations();

    // truth rows keyed by epoch
    std::map<std::int64_t, std::array<double, 3>> truth;
    if (options.truth_csv && fs::exists(*options.truth_csv)) {
        std::ifstream in(*options.truth_csv);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto f = split_csv(line);
            if (f.size() != 4) continue;
            truth[std::stoll(f[0])] = {std::stod(f[1]), std::stod(f[2]), std::stod(f[3])};
        }
        result.truth_available = !truth.empty();
    }

    std::ofstream report_txt(options.out_dir / "report.txt");
    std::ofstream summary_csv(options.out_dir / "summary.csv");

    if (stations.empty()) {
        report_txt << "store is empty; nothing to report\n";
        summary_csv << "axis,rows,max_raw,min_raw,rms_raw,max_filtered,min_filtered,"
                       "rms_filtered\n";
        return result;
    }

    const int station = stations.front();
    result.station_id = station;
    const auto records = log.query_range(station, INT64_MIN, INT64_MAX);
    result.record_rows = records.size();

    // per-axis series, hold-last fill for eliminated samples
    static const char* kAxisNames[3] = {"east", "north", "up"};
    std::array<std::ofstream, 3> series;
    for (int a = 0; a < 3; ++a) {
        series[a].open(options.out_dir / (std::string("series_") + kAxisNames[a] + ".csv"));
        series[a] << "epoch_ms,truth_mm,raw_mm,filtered_mm,verdict\n";
    }

    Figures raw_fig[3], filt_fig[3];
    double held[3] = {0.0, 0.0, 0.0};
    bool has_held[3] = {false, false, false};

    for (const auto& rec : records) {
        const int a = static_cast<int>(rec.axis);
        double filtered;
        if (rec.filtered_mm) {
            filtered = *rec.filtered_mm;
        } else if (has_held[a]) {
            filtered = held[a];
        } else {
            filtered = rec.raw_mm;
        }
        held[a] = filtered;
        has_held[a] = true;

        const auto t = truth.find(rec.epoch_ms);
        const bool have_truth = result.truth_available && t != truth.end();
        series[a] << rec.epoch_ms << ','
                  << (have_truth ? fmt_double(t->second[a]) : std::string("")) << ','
                  << fmt_double(rec.raw_mm) << ',' << fmt_double(filtered) << ','
                  << to_string(rec.verdict) << '\n';

        if (have_truth) {
            raw_fig[a].add(rec.raw_mm - t->second[a]);
            filt_fig[a].add(filtered - t->second[a]);
        } else if (!result.truth_available) {
            raw_fig[a].add(rec.raw_mm);
            filt_fig[a].add(filtered);
        }
    }

    summary_csv << "axis,rows,max_raw,min_raw,rms_raw,max_filtered,min_filtered,rms_filtered\n";
    report_txt << "station " << station << ", " << records.size() << " records\n";
    if (!result.truth_available)
        report_txt << "NOTE: no truth timeline supplied; figures below are descriptive "
                      "statistics of the values, not errors\n";
    report_txt << (result.truth_available ? "errors against truth (mm):\n"
                                          : "value statistics (mm):\n");
    for (int a = 0; a < 3; ++a) {
        AxisFigures& fig = result.axes[a];
        fig.max_raw = raw_fig[a].max_abs;
        fig.min_raw = raw_fig[a].min_abs;
        fig.rms_raw = raw_fig[a].rms();
        fig.max_filtered = filt_fig[a].max_abs;
        fig.min_filtered = filt_fig[a].min_abs;
        fig.rms_filtered = filt_fig[a].rms();
        fig.rows = raw_fig[a].n;

        summary_csv << kAxisNames[a] << ',' << fig.rows << ',' << fmt_double(fig.max_raw)
                    << ',' << fmt_double(fig.min_raw) << ',' << fmt_double(fig.rms_raw) << ','
                    << fmt_double(fig.max_filtered) << ',' << fmt_double(fig.min_filtered)
                    << ',' << fmt_double(fig.rms_filtered) << '\n';
        report_txt << "  " << kAxisNames[a] << ": raw max " << fmt_double(fig.max_raw)
                   << " / rms " << fmt_double(fig.rms_raw) << "  ->  filtered max "
                   << fmt_double(fig.max_filtered) << " / rms " << fmt_double(fig.rms_filtered)
                   << '\n';
    }

    // DOP comparison: GPS-only vs the combined constellation
    if (options.dop_csv && fs::exists(*options.dop_csv)) {
        std::ifstream in(*options.dop_csv);
        std::string line;
        std::getline(in, line);
        DopFigures dop;
        std::ofstream cmp(options.out_dir / "dop_comparison.csv");
        cmp << "epoch_ms,gdop_gps,gdop_gnss\n";
        double sum_gps = 0.0, sum_gnss = 0.0;
        while (std::getline(in, line)) {
            const auto f = split_csv(line);
            if (f.size() < 11) continue;
            const double gdop_gps = std::stod(f[2]);
            const double gdop_gnss = std::stod(f[7]);
            cmp << f[0] << ',' << fmt_double(gdop_gps, 4) << ',' << fmt_double(gdop_gnss, 4)
                << '\n';
            if (dop.rows == 0) {
                dop.min_gdop_gps = dop.max_gdop_gps = gdop_gps;
                dop.min_gdop_gnss = dop.max_gdop_gnss = gdop_gnss;
            } else {
                dop.min_gdop_gps = std::min(dop.min_gdop_gps, gdop_gps);
                dop.max_gdop_gps = std::max(dop.max_gdop_gps, gdop_gps);
                dop.min_gdop_gnss = std::min(dop.min_gdop_gnss, gdop_gnss);
                dop.max_gdop_gnss = std::max(dop.max_gdop_gnss, gdop_gnss);
            }
            sum_gps += gdop_gps;
            sum_gnss += gdop_gnss;
            if (gdop_gnss > gdop_gps + 1e-9) ++dop.ordering_violations;
            ++dop.rows;
        }
        if (dop.rows) {
            dop.mean_gdop_gps = sum_gps / static_cast<double>(dop.rows);
            dop.mean_gdop_gnss = sum_gnss / static_cast<double>(dop.rows);
            report_txt << "GDOP: gps mean " << fmt_double(dop.mean_gdop_gps, 4)
                       << ", combined mean " << fmt_double(dop.mean_gdop_gnss, 4)
                       << ", combined>gps epochs: " << dop.ordering_violations << '\n';
            result.dop = dop;
        }
    }

    return result;
}

}  // namespace geomon::sim
