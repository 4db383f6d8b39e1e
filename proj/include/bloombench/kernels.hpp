#pragma once

// Per-pixel kernels. Each kernel has a straightforward serial reference in
// `serial` and an OpenMP production variant in `omp`; the two must agree
// bit-for-bit (tests/test_kernels.cpp, bench/bench_kernels.cpp).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace bloombench::kernels {

struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;

  bool operator==(const OverlapCounts&) const = default;
};

struct ValueRange {
  float min = 0.0f;
  float max = 0.0f;
  std::size_t valid = 0;  // number of samples that contributed
};

namespace serial {

/// out[i] = clamp((a-b)/(a+b), -1, 1); -1 where a+b == 0 or either sample is nodata.
void normalized_difference(std::span<const float> a, std::span<const float> b, std::optional<float> nodata,
                           std::span<float> out);

/// Range over samples that are not nodata.
ValueRange valid_range(std::span<const float> x, std::optional<float> nodata);

/// Square structuring element of side 2r+1; out-of-bounds pixels are false.
void dilate(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
            std::span<std::uint8_t> out);
void erode(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
           std::span<std::uint8_t> out);

OverlapCounts overlap(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);

}  // namespace serial

namespace omp {

void normalized_difference(std::span<const float> a, std::span<const float> b, std::optional<float> nodata,
                           std::span<float> out);
ValueRange valid_range(std::span<const float> x, std::optional<float> nodata);
void dilate(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
            std::span<std::uint8_t> out);
void erode(std::span<const std::uint8_t> in, std::size_t width, std::size_t height, std::size_t radius,
           std::span<std::uint8_t> out);
OverlapCounts overlap(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);

}  // namespace omp

}  // namespace bloombench::kernels
