#include "bloombench/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

namespace bloombench::kernels {

namespace {

inline float nd_value(float a, float b, std::optional<float> nodata) {
  if (nodata && (a == *nodata || b == *nodata)) return -1.0f;
  const float sum = a + b;
  if (sum == 0.0f) return -1.0f;
  return std::clamp((a - b) / sum, -1.0f, 1.0f);
}

inline bool is_valid(float v, std::optional<float> nodata) { return !(nodata && v == *nodata); }

}  // namespace

namespace serial {

void normalized_difference(std::span<const float> a, std::span<const float> b, std::optional<float> nodata,
                           std::span<float> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = nd_value(a[i], b[i], nodata);
}

ValueRange valid_range(std::span<const float> x, std::optional<float> nodata) {
  ValueRange r{std::numeric_limits<float>::infinity(), -std::numeric_limits<float>::infinity(), 0};
  for (float v : x) {
    if (!is_valid(v, nodata)) continue;
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    ++r.valid;
  }
  return r;
}

void dilate(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
            std::span<std::uint8_t> out) {
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      std::uint8_t any = 0;
      for (std::ptrdiff_t dy = -r; dy <= r && !any; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          const auto yy = y + dy;
          const auto xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
          if (in[yy * w + xx]) {
            any = 1;
            break;
          }
        }
      }
      out[y * w + x] = any;
    }
  }
}

void erode(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
           std::span<std::uint8_t> out) {
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      std::uint8_t all = 1;
      for (std::ptrdiff_t dy = -r; dy <= r && all; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          const auto yy = y + dy;
          const auto xx = x + dx;
          if (yy < 0 || yy >= h || xx < 0 || xx >= w || !in[yy * w + xx]) {
            all = 0;
            break;
          }
        }
      }
      out[y * w + x] = all;
    }
  }
}

OverlapCounts overlap(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  assert(pred.size() == truth.size());
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const unsigned p = pred[i] != 0;
    const unsigned t = truth[i] != 0;
    inter += p & t;
    uni += p | t;
  }
  return {inter, uni};
}

}  // namespace serial

namespace omp {

void normalized_difference(std::span<const float> a, std::span<const float> b, std::optional<float> nodata,
                           std::span<float> out) {
  assert(a.size() == b.size() && a.size() == out.size());
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = nd_value(a[i], b[i], nodata);
}

ValueRange valid_range(std::span<const float> x, std::optional<float> nodata) {
  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  std::size_t valid = 0;
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi) reduction(+ : valid)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const float v = x[i];
    if (!is_valid(v, nodata)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++valid;
  }
  return {lo, hi, valid};
}

namespace {

// Separable square-window filter. `want_all` selects erosion (every pixel in
// the window set, window fully in bounds) versus dilation (any pixel set).
void window_filter(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
                   bool want_all, std::span<std::uint8_t> out) {
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const auto side = 2 * r + 1;
  std::vector<std::uint8_t> rows(width * height);

  // Horizontal pass: one row per iteration, prefix sums over the row.
#pragma omp parallel
  {
    std::vector<std::int32_t> prefix(width + 1);
#pragma omp for schedule(static)
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      const auto* src = in.data() + y * w;
      prefix[0] = 0;
      for (std::ptrdiff_t x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + (src[x] ? 1 : 0);
      auto* dst = rows.data() + y * w;
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        const auto lo = x - r;
        const auto hi = x + r;
        if (want_all) {
          dst[x] = (lo >= 0 && hi < w && prefix[hi + 1] - prefix[lo] == side) ? 1 : 0;
        } else {
          dst[x] = (prefix[std::min(hi, w - 1) + 1] - prefix[std::max<std::ptrdiff_t>(lo, 0)] > 0) ? 1 : 0;
        }
      }
    }
  }

  // Vertical pass: column prefix counts, then one output row per iteration.
  std::vector<std::int32_t> colsum((height + 1) * width, 0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t x = 0; x < w; ++x) {
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      colsum[(y + 1) * w + x] = colsum[y * w + x] + (rows[y * w + x] ? 1 : 0);
    }
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    const auto lo = y - r;
    const auto hi = y + r;
    auto* dst = out.data() + y * w;
    if (want_all) {
      if (lo < 0 || hi >= h) {
        std::fill(dst, dst + w, std::uint8_t{0});
        continue;
      }
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        dst[x] = (colsum[(hi + 1) * w + x] - colsum[lo * w + x] == side) ? 1 : 0;
      }
    } else {
      const auto a = std::max<std::ptrdiff_t>(lo, 0);
      const auto b = std::min(hi, h - 1) + 1;
      for (std::ptrdiff_t x = 0; x < w; ++x) dst[x] = (colsum[b * w + x] - colsum[a * w + x] > 0) ? 1 : 0;
    }
  }
}

}  // namespace

void dilate(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
            std::span<std::uint8_t> out) {
  window_filter(in, width, height, radius, false, out);
}

void erode(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
           std::span<std::uint8_t> out) {
  window_filter(in, width, height, radius, true, out);
}

OverlapCounts overlap(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  assert(pred.size() == truth.size());
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  const auto n = static_cast<std::ptrdiff_t>(pred.size());
#pragma omp parallel for schedule(static) reduction(+ : inter, uni)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const unsigned p = pred[i] != 0;
    const unsigned t = truth[i] != 0;
    inter += p & t;
    uni += p | t;
  }
  return {inter, uni};
}

}  // namespace omp

}  // namespace bloombench::kernels
