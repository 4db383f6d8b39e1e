#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bloombench/prompt_seg.hpp"
#include "bloombench/raster.hpp"

namespace bloombench {

/// 8-bit RGB composite PNG; each channel is min-max stretched over valid
/// samples and nodata renders black. Bands missing from the scene fall back
/// to a grayscale rendering of the first scene band.
std::vector<std::uint8_t> render_preview_png(const Scene& scene, const std::vector<std::string>& rgb_bands);

/// Heat image of a score field: -1 blue, 0 green, +1 red; invalid pixels black.
std::vector<std::uint8_t> render_score_png(const ScoreField& field);

}  // namespace bloombench
