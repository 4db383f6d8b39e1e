#pragma once

// Mask persistence: RLE JSON (`{"width":W,"height":H,"counts":[...]}`) and
// 8-bit single-channel PNG (0 = background, 255 = bloom, >= 128 reads true).

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "bloombench/mask.hpp"

namespace bloombench {

nlohmann::ordered_json rle_to_json(const RleMask& rle);
/// Throws MalformedRle on schema errors.
RleMask rle_from_json(const nlohmann::json& j);

void write_rle_file(const RleMask& rle, const std::filesystem::path& path);
RleMask read_rle_file(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_mask_png(const Mask& m);
Mask decode_mask_png(std::span<const std::uint8_t> png);
void write_mask_png(const Mask& m, const std::filesystem::path& path);
Mask read_mask_png(const std::filesystem::path& path);

/// Dispatches on extension: `.json` (RLE) or `.png`.
Mask read_mask_file(const std::filesystem::path& path);

/// 8-bit RGB (interleaved) or gray PNG encoders used for previews.
std::vector<std::uint8_t> encode_rgb_png(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height);
std::vector<std::uint8_t> encode_gray_png(std::span<const std::uint8_t> gray, std::size_t width, std::size_t height);

}  // namespace bloombench
