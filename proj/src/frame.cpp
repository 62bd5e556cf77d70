#include "geomon/frame.hpp"

#include "geomon/crc16.hpp"

namespace geomon::wire {

namespace {

void put_u16(std::uint8_t* p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 8);
    p[1] = static_cast<std::uint8_t>(v);
}

void put_u32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v >> 24);
    p[1] = static_cast<std::uint8_t>(v >> 16);
    p[2] = static_cast<std::uint8_t>(v >> 8);
    p[3] = static_cast<std::uint8_t>(v);
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
    put_u32(p, static_cast<std::uint32_t>(v >> 32));
    put_u32(p + 4, static_cast<std::uint32_t>(v));
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

std::uint64_t get_u64(const std::uint8_t* p) {
    return (static_cast<std::uint64_t>(get_u32(p)) << 32) | get_u32(p + 4);
}

}  // namespace

const char* to_string(DecodeStatus s) {
    switch (s) {
        case DecodeStatus::Ok: return "ok";
        case DecodeStatus::Truncated: return "truncated";
        case DecodeStatus::BadMagic: return "bad_magic";
        case DecodeStatus::BadVersion: return "bad_version";
        case DecodeStatus::BadCrc: return "bad_crc";
    }
    return "unknown";
}

std::array<std::uint8_t, kStationFrameSize> encode_frame(const StationFrame& frame) {
    std::array<std::uint8_t, kStationFrameSize> b{};
    b[0] = kFrameMagic0;
    b[1] = kFrameMagic1;
    b[2] = kFrameVersion;
    put_u16(&b[3], frame.station_id);
    put_u16(&b[5], frame.sequence);
    put_u64(&b[7], frame.epoch_ms);
    put_u32(&b[15], static_cast<std::uint32_t>(frame.east_um));
    put_u32(&b[19], static_cast<std::uint32_t>(frame.north_um));
    put_u32(&b[23], static_cast<std::uint32_t>(frame.up_um));
    b[27] = frame.fix_quality;
    put_u16(&b[28], crc16_ccitt_false({b.data(), 28}));
    return b;
}

DecodeStatus decode_frame(std::span<const std::uint8_t> bytes, StationFrame& out) {
    if (bytes.size() != kStationFrameSize) return DecodeStatus::Truncated;
    if (bytes[0] != kFrameMagic0 || bytes[1] != kFrameMagic1) return DecodeStatus::BadMagic;
    if (bytes[2] != kFrameVersion) return DecodeStatus::BadVersion;
    if (get_u16(&bytes[28]) != crc16_ccitt_false(bytes.first(28))) return DecodeStatus::BadCrc;

    out.station_id = get_u16(&bytes[3]);
    out.sequence = get_u16(&bytes[5]);
    out.epoch_ms = get_u64(&bytes[7]);
    out.east_um = static_cast<std::int32_t>(get_u32(&bytes[15]));
    out.north_um = static_cast<std::int32_t>(get_u32(&bytes[19]));
    out.up_um = static_cast<std::int32_t>(get_u32(&bytes[23]));
    out.fix_quality = bytes[27];
    return DecodeStatus::Ok;
}

}  // namespace geomon::wire
