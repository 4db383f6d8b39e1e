#include "bloombench/seg_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bloombench/error.hpp"
#include "bloombench/lcg.hpp"

namespace bloombench {

namespace {

double ratio(const kernels::OverlapCounts& c) {
  if (c.union_ == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

kernels::OverlapCounts overlap_counts(const Mask& pred, const Mask& truth) {
  if (!pred.same_shape(truth)) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(pred.width) + "x" + std::to_string(pred.height) +
                                                  " vs " + std::to_string(truth.width) + "x" +
                                                  std::to_string(truth.height));
  }
  return kernels::omp::overlap(pred.bits, truth.bits);
}

double image_iou(const Mask& pred, const Mask& truth) { return ratio(overlap_counts(pred, truth)); }

double ciou(std::span<const MaskPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "ciou needs at least one pair");
  double sum = 0.0;
  for (const auto& p : pairs) sum += image_iou(p.pred, p.truth);
  return sum / static_cast<double>(pairs.size());
}

double giou(std::span<const MaskPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "giou needs at least one pair");
  kernels::OverlapCounts total;
  for (const auto& p : pairs) {
    const auto c = overlap_counts(p.pred, p.truth);
    total.intersection += c.intersection;
    total.union_ += c.union_;
  }
  return ratio(total);
}

SegReport evaluate_segmentation(std::vector<MaskPair> pairs, std::size_t resamples, std::uint64_t seed) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyInput, "no mask pairs");
  std::sort(pairs.begin(), pairs.end(), [](const MaskPair& a, const MaskPair& b) { return a.scene_id < b.scene_id; });
  for (const auto& p : pairs) {
    if (!p.pred.same_shape(p.truth)) {
      throw Error(ErrorCode::DimensionMismatch, p.scene_id);
    }
  }

  const auto n = pairs.size();
  std::vector<kernels::OverlapCounts> counts(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    counts[i] = kernels::serial::overlap(pairs[i].pred.bits, pairs[i].truth.bits);
  }

  SegReport report;
  report.n_images = n;
  std::vector<double> ious(n);
  kernels::OverlapCounts total;
  for (std::size_t i = 0; i < n; ++i) {
    ious[i] = ratio(counts[i]);
    report.per_image.push_back({pairs[i].scene_id, ious[i], counts[i]});
    total.intersection += counts[i].intersection;
    total.union_ += counts[i].union_;
  }
  report.ciou = mean_of(ious);
  report.giou = ratio(total);
  report.ciou_stderr = sample_sd(ious) / std::sqrt(static_cast<double>(n));

  if (resamples > 0) {
    Lcg64 rng(seed);
    std::vector<double> draws(resamples);
    for (auto& d : draws) {
      kernels::OverlapCounts acc;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& c = counts[rng.below(n)];
        acc.intersection += c.intersection;
        acc.union_ += c.union_;
      }
      d = ratio(acc);
    }
    report.giou_bootstrap_sd = sample_sd(draws);
  }
  return report;
}

}  // namespace bloombench
