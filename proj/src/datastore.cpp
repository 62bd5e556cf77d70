#include "geomon/datastore.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "geomon/crc16.hpp"

namespace geomon::store {

namespace fs = std::filesystem;

namespace {

std::int64_t day_of(std::int64_t epoch_ms) {
    // floor division, epochs may predate the origin in synthetic runs
    std::int64_t d = epoch_ms / 86'400'000;
    if (epoch_ms % 86'400'000 < 0) --d;
    return d;
}

std::string station_segment(int station_id, std::int64_t day) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "stations/station_%05d/day_%08lld.seg", station_id,
                  static_cast<long long>(day));
    return buf;
}

std::string alert_segment(std::int64_t day) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "alerts/day_%08lld.seg", static_cast<long long>(day));
    return buf;
}

std::uint16_t body_crc(std::string_view body) {
    return wire::crc16_ccitt_false(
        {reinterpret_cast<const std::uint8_t*>(body.data()), body.size()});
}

// "<length> <crc16 hex> <json>"; returns the body or nullopt if the line is
// damaged or incomplete.
std::optional<std::string> parse_line(const std::string& line) {
    std::size_t sp1 = line.find(' ');
    if (sp1 == std::string::npos) return std::nullopt;
    std::size_t sp2 = line.find(' ', sp1 + 1);
    if (sp2 == std::string::npos) return std::nullopt;

    std::size_t len = 0;
    {
        const char* b = line.data();
        const auto [p, ec] = std::from_chars(b, b + sp1, len);
        if (ec != std::errc{} || p != b + sp1) return std::nullopt;
    }
    std::uint16_t crc = 0;
    {
        const char* b = line.data() + sp1 + 1;
        const auto [p, ec] = std::from_chars(b, line.data() + sp2, crc, 16);
        if (ec != std::errc{} || p != line.data() + sp2) return std::nullopt;
    }
    const std::string body = line.substr(sp2 + 1);
    if (body.size() != len) return std::nullopt;
    if (body_crc(body) != crc) return std::nullopt;
    return body;
}

}  // namespace

LogStore::LogStore(fs::path root) : root_(std::move(root)) {
    fs::create_directories(root_ / "stations");
    fs::create_directories(root_ / "alerts");
    replay();
}

void LogStore::replay() {
    std::vector<fs::path> station_files, alert_files;
    for (const auto& entry : fs::recursive_directory_iterator(root_ / "stations"))
        if (entry.is_regular_file()) station_files.push_back(entry.path());
    for (const auto& entry : fs::directory_iterator(root_ / "alerts"))
        if (entry.is_regular_file()) alert_files.push_back(entry.path());
    std::sort(station_files.begin(), station_files.end());
    std::sort(alert_files.begin(), alert_files.end());

    for (const auto& p : station_files) load_segment(p, false);
    for (const auto& p : alert_files) load_segment(p, true);

    for (auto& [id, data] : stations_) {
        std::stable_sort(data.records.begin(), data.records.end(),
                         [](const DisplacementRecord& a, const DisplacementRecord& b) {
                             return std::make_pair(a.epoch_ms, static_cast<int>(a.axis)) <
                                    std::make_pair(b.epoch_ms, static_cast<int>(b.axis));
                         });
        if (!data.records.empty()) data.last_epoch = data.records.back().epoch_ms;
    }
    std::stable_sort(alerts_.begin(), alerts_.end(),
                     [](const AlertRecord& a, const AlertRecord& b) {
                         return a.epoch_ms < b.epoch_ms;
                     });
}

void LogStore::load_segment(const fs::path& path, bool alerts) {
    const std::string rel = fs::relative(path, root_).generic_string();
    std::uint64_t committed_end = 0;
    bool damaged = false;
    {
        std::ifstream in(path, std::ios::binary);
        std::uint64_t offset = 0;
        std::string line;
        while (std::getline(in, line)) {
            const std::uint64_t line_start = offset;
            offset += line.size() + 1;
            // a committed line always ends in '\n'; a tail without one is torn
            const bool complete = !in.eof();
            auto body = complete ? parse_line(line) : std::nullopt;
            if (!body) {
                damaged = true;
                break;  // everything after a bad line is uncommitted
            }
            bool parsed = true;
            try {
                const auto j = nlohmann::json::parse(*body);
                if (alerts) {
                    AlertRecord rec = j.get<AlertRecord>();
                    const auto key = std::make_tuple(rec.station_id, rec.epoch_ms,
                                                     static_cast<int>(rec.direction));
                    if (!alert_keys_.contains(key)) {
                        alert_keys_[key] = {rel, line_start};
                        alerts_.push_back(rec);
                    }
                } else {
                    DisplacementRecord rec = j.get<DisplacementRecord>();
                    StationData& data = stations_[rec.station_id];
                    const DispKey key{rec.epoch_ms, static_cast<int>(rec.axis)};
                    if (!data.by_key.contains(key)) {
                        data.by_key[key] = {rel, line_start};
                        data.records.push_back(rec);
                    }
                }
            } catch (const std::exception&) {
                parsed = false;
            }
            if (!parsed) {
                damaged = true;
                break;
            }
            committed_end = offset;
        }
    }
    if (damaged) {
        // drop the torn tail so later appends extend the committed prefix
        ++counters_.truncated_lines;
        fs::resize_file(path, committed_end);
    }
    sizes_[rel] = committed_end;
}

LogStore::Position LogStore::write_line(const fs::path& rel, const std::string& body) {
    const fs::path full = root_ / rel;
    const std::string key = rel.generic_string();
    auto it = writers_.find(key);
    if (it == writers_.end()) {
        fs::create_directories(full.parent_path());
        std::ofstream out(full, std::ios::binary | std::ios::app);
        if (!out) throw std::runtime_error("cannot open segment " + full.string());
        it = writers_.emplace(key, std::move(out)).first;
        if (!sizes_.contains(key)) sizes_[key] = fs::exists(full) ? fs::file_size(full) : 0;
    }

    char prefix[32];
    std::snprintf(prefix, sizeof(prefix), "%zu %04x ", body.size(),
                  static_cast<unsigned>(body_crc(body)));
    const std::string line = std::string(prefix) + body + "\n";

    const std::uint64_t offset = sizes_[key];
    it->second << line;
    it->second.flush();
    if (!it->second) throw std::runtime_error("write failed on segment " + full.string());
    sizes_[key] += line.size();
    return {key, offset};
}

LogStore::Position LogStore::append(const DisplacementRecord& rec) {
    std::lock_guard lock(mu_);
    StationData& data = stations_[rec.station_id];
    const DispKey key{rec.epoch_ms, static_cast<int>(rec.axis)};
    if (auto it = data.by_key.find(key); it != data.by_key.end()) {
        ++counters_.duplicate_appends;
        return it->second;
    }

    const nlohmann::json j = rec;
    const Position pos = write_line(station_segment(rec.station_id, day_of(rec.epoch_ms)),
                                    j.dump());
    data.by_key[key] = pos;

    if (rec.epoch_ms < data.last_epoch) {
        ++counters_.out_of_order_appends;
        const auto at = std::upper_bound(
            data.records.begin(), data.records.end(), key,
            [](const DispKey& k, const DisplacementRecord& r) {
                return k < std::make_pair(r.epoch_ms, static_cast<int>(r.axis));
            });
        data.records.insert(at, rec);
    } else {
        data.records.push_back(rec);
        data.last_epoch = rec.epoch_ms;
    }
    return pos;
}

LogStore::Position LogStore::append(const AlertRecord& rec) {
    std::lock_guard lock(mu_);
    const auto key = std::make_tuple(rec.station_id, rec.epoch_ms,
                                     static_cast<int>(rec.direction));
    if (auto it = alert_keys_.find(key); it != alert_keys_.end()) {
        ++counters_.duplicate_appends;
        return it->second;
    }
    const nlohmann::json j = rec;
    const Position pos = write_line(alert_segment(day_of(rec.epoch_ms)), j.dump());
    alert_keys_[key] = pos;
    const auto at = std::upper_bound(alerts_.begin(), alerts_.end(), rec.epoch_ms,
                                     [](std::int64_t e, const AlertRecord& r) {
                                         return e < r.epoch_ms;
                                     });
    alerts_.insert(at, rec);
    return pos;
}

std::vector<DisplacementRecord> LogStore::query_range(int station_id, std::int64_t from_ms,
                                                      std::int64_t to_ms) const {
    if (from_ms > to_ms) throw std::invalid_argument("query_range: from > to");
    std::lock_guard lock(mu_);
    auto it = stations_.find(station_id);
    if (it == stations_.end()) return {};
    const auto& recs = it->second.records;
    const auto lo = std::lower_bound(recs.begin(), recs.end(), from_ms,
                                     [](const DisplacementRecord& r, std::int64_t e) {
                                         return r.epoch_ms < e;
                                     });
    const auto hi = std::upper_bound(recs.begin(), recs.end(), to_ms,
                                     [](std::int64_t e, const DisplacementRecord& r) {
                                         return e < r.epoch_ms;
                                     });
    return {lo, hi};
}

std::optional<DisplacementRecord> LogStore::latest(int station_id) const {
    std::lock_guard lock(mu_);
    auto it = stations_.find(station_id);
    if (it == stations_.end() || it->second.records.empty()) return std::nullopt;
    return it->second.records.back();
}

std::vector<AlertRecord> LogStore::alerts_since(std::int64_t since_ms) const {
    std::lock_guard lock(mu_);
    const auto lo = std::lower_bound(alerts_.begin(), alerts_.end(), since_ms,
                                     [](const AlertRecord& r, std::int64_t e) {
                                         return r.epoch_ms < e;
                                     });
    return {lo, alerts_.end()};
}

std::vector<int> LogStore::stations() const {
    std::lock_guard lock(mu_);
    std::vector<int> ids;
    ids.reserve(stations_.size());
    for (const auto& [id, data] : stations_)
        if (!data.records.empty()) ids.push_back(id);
    return ids;
}

std::size_t LogStore::displacement_count(int station_id) const {
    std::lock_guard lock(mu_);
    auto it = stations_.find(station_id);
    return it == stations_.end() ? 0 : it->second.records.size();
}

std::size_t LogStore::alert_count() const {
    std::lock_guard lock(mu_);
    return alerts_.size();
}

LogStore::Counters LogStore::counters() const {
    std::lock_guard lock(mu_);
    return counters_;
}

}  // namespace geomon::store
