#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "geomon/records.hpp"

namespace geomon::store {

// Append-only file-backed store for displacement and alert records.
//
// Layout: one segment file per station per day (plus per-day alert
// segments), each line `<length> <crc16> <json>` flushed on append. On open
// every segment is replayed; the first bad line of a file ends its committed
// prefix, so a torn tail write is dropped cleanly. Appends are idempotent on
// the record key. Single writer, any number of concurrent readers; reads
// return committed snapshots.
class LogStore {
public:
    explicit LogStore(std::filesystem::path root);

    struct Position {
        std::string file;      // relative to the store root
        std::uint64_t offset;  // byte offset of the record's line
    };

    Position append(const DisplacementRecord& rec);
    Position append(const AlertRecord& rec);

    /// Records for one station with epoch in [from_ms, to_ms], ascending
    /// epoch. Unknown station -> empty.
    std::vector<DisplacementRecord> query_range(int station_id, std::int64_t from_ms,
                                                std::int64_t to_ms) const;

    std::optional<DisplacementRecord> latest(int station_id) const;
    std::vector<AlertRecord> alerts_since(std::int64_t since_ms) const;
    std::vector<int> stations() const;
    std::size_t displacement_count(int station_id) const;
    std::size_t alert_count() const;

    struct Counters {
        std::uint64_t truncated_lines = 0;     // bad tails dropped on replay
        std::uint64_t duplicate_appends = 0;   // idempotent no-ops
        std::uint64_t out_of_order_appends = 0;  // accepted but flagged
    };
    Counters counters() const;

    const std::filesystem::path& root() const { return root_; }

private:
    using DispKey = std::pair<std::int64_t, int>;  // epoch, axis

    struct StationData {
        std::vector<DisplacementRecord> records;  // sorted by (epoch, axis)
        std::map<DispKey, Position> by_key;
        std::int64_t last_epoch = INT64_MIN;
    };

    Position write_line(const std::filesystem::path& rel, const std::string& body);
    void replay();
    void load_segment(const std::filesystem::path& path, bool alerts);

    std::filesystem::path root_;
    mutable std::mutex mu_;
    std::map<int, StationData> stations_;
    std::vector<AlertRecord> alerts_;  // sorted by epoch
    std::map<std::tuple<int, std::int64_t, int>, Position> alert_keys_;
    std::map<std::string, std::ofstream> writers_;
    std::map<std::string, std::uint64_t> sizes_;
    Counters counters_;
};

}  // namespace geomon::store
