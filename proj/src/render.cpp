#include "bloombench/render.hpp"

#include <algorithm>
#include <cmath>

#include "bloombench/kernels.hpp"
#include "bloombench/mask_io.hpp"

namespace bloombench {

namespace {

void stretch_into(const Scene& scene, const Band& band, std::vector<std::uint8_t>& rgb, std::size_t channel,
                  std::size_t stride) {
  const auto range = kernels::omp::valid_range(band.data, scene.nodata_value);
  const double span = static_cast<double>(range.max) - range.min;
  for (std::size_t i = 0; i < band.data.size(); ++i) {
    const float v = band.data[i];
    std::uint8_t out = 0;
    if (!scene.is_nodata(v)) {
      const double unit = span > 0 ? (static_cast<double>(v) - range.min) / span : 0.5;
      out = static_cast<std::uint8_t>(std::lround(std::clamp(unit, 0.0, 1.0) * 255.0));
    }
    rgb[i * stride + channel] = out;
  }
}

}  // namespace

std::vector<std::uint8_t> render_preview_png(const Scene& scene, const std::vector<std::string>& rgb_bands) {
  std::vector<std::uint8_t> rgb(scene.pixel_count() * 3, 0);
  const bool full = rgb_bands.size() == 3 &&
                    std::all_of(rgb_bands.begin(), rgb_bands.end(), [&](const auto& b) { return scene.has_band(b); });
  if (full) {
    for (std::size_t c = 0; c < 3; ++c) stretch_into(scene, scene.band(rgb_bands[c]), rgb, c, 3);
  } else {
    const Band& gray = scene.bands.front();
    for (std::size_t c = 0; c < 3; ++c) stretch_into(scene, gray, rgb, c, 3);
  }
  return encode_rgb_png(rgb, scene.width, scene.height);
}

std::vector<std::uint8_t> render_score_png(const ScoreField& field) {
  std::vector<std::uint8_t> rgb(field.values.size() * 3, 0);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (!field.valid[i]) continue;
    const double t = (std::clamp(static_cast<double>(field.values[i]), -1.0, 1.0) + 1.0) / 2.0;
    rgb[i * 3 + 0] = static_cast<std::uint8_t>(std::lround(255.0 * std::max(0.0, 2.0 * t - 1.0)));
    rgb[i * 3 + 1] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(2.0 * t - 1.0))));
    rgb[i * 3 + 2] = static_cast<std::uint8_t>(std::lround(255.0 * std::max(0.0, 1.0 - 2.0 * t)));
  }
  return encode_rgb_png(rgb, field.width, field.height);
}

}  // namespace bloombench
