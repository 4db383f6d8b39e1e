#pragma once

// Deterministic prompt-driven candidate generation over a spectral-index
// score field. `SegmentationEngine` is the pluggable seam for a learned
// backend; `SpectralIndexEngine` is the built-in implementation.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bloombench/mask.hpp"
#include "bloombench/raster.hpp"

namespace bloombench {

struct PixelPoint {
  std::size_t col = 0;
  std::size_t row = 0;

  bool operator==(const PixelPoint&) const = default;
};

/// Inclusive pixel box.
struct Roi {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t x1 = 0;
  std::size_t y1 = 0;

  bool contains(std::size_t col, std::size_t row) const noexcept {
    return col >= x0 && col <= x1 && row >= y0 && row <= y1;
  }
  bool operator==(const Roi&) const = default;
};

struct PromptSet {
  std::vector<PixelPoint> positive;
  std::vector<PixelPoint> negative;
  Roi roi;

  bool operator==(const PromptSet&) const = default;
};

/// Throws InvalidPrompts naming the violated invariant.
void validate_prompts(const PromptSet& prompts, std::size_t width, std::size_t height);

enum class IndexKind { normalized_difference, single_band };

struct IndexSpec {
  IndexKind kind = IndexKind::normalized_difference;
  std::string band_a = "B05";
  std::optional<std::string> band_b = "B04";

  /// NDCI: (B05 - B04) / (B05 + B04).
  static IndexSpec ndci() { return {}; }
  /// Throws InvalidArgument when normalized_difference lacks band_b.
  void validate() const;
  bool operator==(const IndexSpec&) const = default;
};

struct ScoreField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<float> values;        // in [-1, 1]; nodata pixels carry -1
  std::vector<std::uint8_t> valid;  // 0 where any referenced band is nodata

  float at(std::size_t col, std::size_t row) const noexcept { return values[row * width + col]; }
  bool valid_at(std::size_t col, std::size_t row) const noexcept { return valid[row * width + col] != 0; }
};

/// normalized_difference: (a-b)/(a+b) clamped, -1 on a+b == 0 or nodata.
/// single_band: min-max over valid pixels rescaled to [-1, 1]; a constant
/// band maps to 0. Throws UnknownBand.
ScoreField score_field(const Scene& scene, const IndexSpec& spec);

struct Candidate {
  Mask mask;
  double threshold = 0.0;
  double score = 0.0;  // mean score over true pixels, -1 for an empty mask

  bool operator==(const Candidate&) const = default;
};

struct CandidateSet {
  std::vector<Candidate> candidates;  // decreasing score
  PromptSet prompt_set;

  bool operator==(const CandidateSet&) const = default;
};

/// Intermediate masks, one per threshold, in ascending-threshold order.
struct CandidateTrace {
  std::vector<double> thresholds;
  std::vector<Mask> thresholded;  // roi ∩ valid ∩ score >= t
  std::vector<Mask> connected;    // components holding a positive point
  std::vector<Mask> pruned;       // minus components holding a negative point
};

/// Evenly spaced thresholds strictly inside the prompt-derived interval.
std::vector<double> candidate_thresholds(double positive_min, std::optional<double> negative_max, std::size_t k);

/// Throws InvalidPrompts, DegeneratePrompts (all positive points on nodata),
/// UnknownBand, InvalidArgument (k == 0).
CandidateSet generate_candidates(const Scene& scene, const PromptSet& prompts, const IndexSpec& spec, std::size_t k,
                                 const PostProcessConfig& post, CandidateTrace* trace = nullptr);

class SegmentationEngine {
 public:
  virtual ~SegmentationEngine() = default;
  virtual CandidateSet generate(const Scene& scene, const PromptSet& prompts, std::size_t k,
                                const PostProcessConfig& post) const = 0;
  virtual ScoreField scores(const Scene& scene) const = 0;
};

class SpectralIndexEngine final : public SegmentationEngine {
 public:
  explicit SpectralIndexEngine(IndexSpec spec = IndexSpec::ndci());

  CandidateSet generate(const Scene& scene, const PromptSet& prompts, std::size_t k,
                        const PostProcessConfig& post) const override;
  ScoreField scores(const Scene& scene) const override;
  const IndexSpec& spec() const noexcept { return spec_; }

 private:
  IndexSpec spec_;
};

}  // namespace bloombench
