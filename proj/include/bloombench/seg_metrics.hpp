#pragma once

// Binary (bloom vs background) segmentation metrics.
//
// Naming note: here `ciou` is the mean of per-image IoUs and `giou` is the
// cumulative ratio sum(intersection) / sum(union). Some reasoning-segmentation
// codebases use these two names the other way round.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bloombench/kernels.hpp"
#include "bloombench/mask.hpp"

namespace bloombench {

struct MaskPair {
  std::string scene_id;
  Mask pred;
  Mask truth;
};

/// Throws DimensionMismatch.
kernels::OverlapCounts overlap_counts(const Mask& pred, const Mask& truth);

/// |pred ∩ truth| / |pred ∪ truth|; 1 when both are empty.
double image_iou(const Mask& pred, const Mask& truth);

/// Mean per-image IoU. Throws EmptyInput.
double ciou(std::span<const MaskPair> pairs);
/// Summed intersections over summed unions; 1 when every pair is empty.
/// Throws EmptyInput.
double giou(std::span<const MaskPair> pairs);

struct ImageScore {
  std::string scene_id;
  double iou = 0.0;
  kernels::OverlapCounts counts;
};

struct SegReport {
  double ciou = 0.0;
  double giou = 0.0;
  std::size_t n_images = 0;
  std::vector<ImageScore> per_image;  // sorted by scene_id
  double ciou_stderr = 0.0;           // standard error of the per-image IoUs
  double giou_bootstrap_sd = 0.0;     // bootstrap standard deviation of gIoU
};

inline constexpr std::size_t kBootstrapResamples = 1000;
inline constexpr std::uint64_t kBootstrapSeed = 42;

/// Full report. Pairs are ordered by scene_id before any reduction, and
/// per-image overlap counts are computed in parallel.
SegReport evaluate_segmentation(std::vector<MaskPair> pairs, std::size_t resamples = kBootstrapResamples,
                                std::uint64_t seed = kBootstrapSeed);

}  // namespace bloombench
