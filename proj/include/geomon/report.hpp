#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

namespace geomon::sim {

struct ReportOptions {
    std::filesystem::path store_dir;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> truth_csv;  // absent -> descriptive stats only
    std::optional<std::filesystem::path> dop_csv;
};

struct AxisFigures {
    // against truth when available, otherwise descriptive stats of the values
    double max_raw = 0.0, min_raw = 0.0, rms_raw = 0.0;
    double max_filtered = 0.0, min_filtered = 0.0, rms_filtered = 0.0;
    std::uint64_t rows = 0;
};

struct DopFigures {
    double min_gdop_gps = 0.0, max_gdop_gps = 0.0, mean_gdop_gps = 0.0;
    double min_gdop_gnss = 0.0, max_gdop_gnss = 0.0, mean_gdop_gnss = 0.0;
    std::uint64_t rows = 0;
    std::uint64_t ordering_violations = 0;  // epochs with GDOP(gnss) > GDOP(gps)
};

struct ReportResult {
    bool truth_available = false;
    int station_id = 0;
    std::uint64_t record_rows = 0;
    std::array<AxisFigures, 3> axes;  // east, north, up
    std::optional<DopFigures> dop;
};

// Emits plot-ready series (epoch, truth, raw, filtered, verdict) per axis,
// an error summary table, and the GPS-vs-combined DOP comparison, from a
// populated store. Without a truth file the summary degrades to descriptive
// statistics and says so.
ReportResult write_report(const ReportOptions& options);

}  // namespace geomon::sim
