#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geomon::wire {

std::string base64_encode(std::span<const std::uint8_t> data);

/// Returns nullopt on any character outside the alphabet or bad padding.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

}  // namespace geomon::wire
