#pragma once

#include <cstdint>
#include <span>

namespace geomon::wire {

/// CRC-16/CCITT-FALSE: polynomial 0x1021, init 0xFFFF, no reflection,
/// no final xor. crc16("123456789") == 0x29B1.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

}  // namespace geomon::wire
