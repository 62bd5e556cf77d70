#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace geomon::wire {

// Station -> edge wire record, 30 bytes, all multi-byte fields big-endian:
//
//   0..1   magic 0xA5 0x5A
//   2      version (1)
//   3..4   station_id  u16
//   5..6   sequence    u16, wrapping
//   7..14  epoch       u64, milliseconds
//   15..18 east        i32, micrometers
//   19..22 north       i32, micrometers
//   23..26 up          i32, micrometers
//   27     fix quality u8 (0 none, 1 float, 2 fixed)
//   28..29 CRC-16/CCITT-FALSE over bytes 0..27

inline constexpr std::size_t kStationFrameSize = 30;
inline constexpr std::uint8_t kFrameMagic0 = 0xA5;
inline constexpr std::uint8_t kFrameMagic1 = 0x5A;
inline constexpr std::uint8_t kFrameVersion = 1;

struct StationFrame {
    std::uint16_t station_id = 0;
    std::uint16_t sequence = 0;
    std::uint64_t epoch_ms = 0;
    std::int32_t east_um = 0;
    std::int32_t north_um = 0;
    std::int32_t up_um = 0;
    std::uint8_t fix_quality = 0;

    bool operator==(const StationFrame&) const = default;
};

std::array<std::uint8_t, kStationFrameSize> encode_frame(const StationFrame& frame);

enum class DecodeStatus { Ok, Truncated, BadMagic, BadVersion, BadCrc };

const char* to_string(DecodeStatus s);

/// Requires exactly kStationFrameSize bytes; validates magic, version, CRC.
DecodeStatus decode_frame(std::span<const std::uint8_t> bytes, StationFrame& out);

}  // namespace geomon::wire
