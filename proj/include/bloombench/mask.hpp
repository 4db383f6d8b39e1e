#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bloombench {

/// Binary per-pixel bloom labeling, row-major. Stored as bytes (0/1) so
/// parallel kernels can write disjoint pixels safely.
struct Mask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(std::size_t w, std::size_t h, bool fill = false) : width(w), height(h), bits(w * h, fill ? 1 : 0) {}

  std::size_t pixel_count() const noexcept { return width * height; }
  bool at(std::size_t col, std::size_t row) const noexcept { return bits[row * width + col] != 0; }
  void set(std::size_t col, std::size_t row, bool v = true) noexcept { bits[row * width + col] = v ? 1 : 0; }
  std::size_t count() const noexcept;
  bool none() const noexcept { return count() == 0; }
  bool same_shape(const Mask& other) const noexcept { return width == other.width && height == other.height; }

  bool operator==(const Mask&) const = default;
};

/// Alternating run lengths of false then true pixels, row-major, starting
/// with the false run (possibly 0). Only counts[0] may be zero.
struct RleMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint64_t> counts;

  bool operator==(const RleMask&) const = default;
};

RleMask encode_rle(const Mask& mask);
/// Throws RunSumMismatch when the runs do not cover width*height exactly and
/// MalformedRle on an interior zero run.
Mask decode_rle(const RleMask& rle);

Mask mask_not(const Mask& m);
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);
/// a ⊆ b; shapes must match.
bool is_subset(const Mask& a, const Mask& b);

// Morphology with a (2r+1)-square structuring element; out-of-bounds is false.
Mask dilate(const Mask& m, std::size_t radius);
Mask erode(const Mask& m, std::size_t radius);
/// erode(dilate(m))
Mask close(const Mask& m, std::size_t radius);
/// dilate(erode(m))
Mask open(const Mask& m, std::size_t radius);

/// Inclusive pixel box.
struct BoundingBox {
  std::size_t min_col = 0;
  std::size_t min_row = 0;
  std::size_t max_col = 0;
  std::size_t max_row = 0;

  bool operator==(const BoundingBox&) const = default;
};

struct Component {
  std::size_t id = 0;  // rank in the sorted component list
  std::size_t area = 0;
  BoundingBox box;
  std::size_t first_pixel = 0;  // row-major index of the first pixel in scan order

  bool operator==(const Component&) const = default;
};

struct ComponentLabels {
  static constexpr std::int32_t kBackground = -1;
  std::vector<std::int32_t> labels;  // component id per pixel, kBackground for false
  std::vector<Component> components;
};

/// 8-connected components, ordered by decreasing area, ties broken by the
/// row-major position of the first pixel.
ComponentLabels label_components(const Mask& m);
std::vector<Component> connected_components(const Mask& m);

/// Sets every false region not 4-connected to the image border.
Mask fill_holes(const Mask& m);
/// Drops 8-connected components with area < min_area.
Mask remove_small_components(const Mask& m, std::size_t min_area);

struct PostProcessConfig {
  std::size_t closing_radius = 1;
  std::size_t min_component_area = 16;
  bool fill_holes = true;

  bool operator==(const PostProcessConfig&) const = default;
};

/// close(closing_radius) -> fill_holes -> drop small components.
Mask postprocess(const Mask& m, const PostProcessConfig& cfg);

}  // namespace bloombench
