#include "bloombench/prompt_seg.hpp"

#include <algorithm>
#include <numeric>

#include "bloombench/error.hpp"
#include "bloombench/kernels.hpp"

namespace bloombench {

namespace {

std::string point_str(const PixelPoint& p) {
  return "(" + std::to_string(p.col) + "," + std::to_string(p.row) + ")";
}

// Keeps components of `m` for which `keep(component id)` holds.
template <typename Pred>
Mask filter_components(const Mask& m, const ComponentLabels& labeled, Pred keep) {
  Mask out(m.width, m.height);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    const auto l = labeled.labels[i];
    if (l != ComponentLabels::kBackground && keep(static_cast<std::size_t>(l))) out.bits[i] = 1;
  }
  return out;
}

// Component ids of `labeled` that contain at least one of `points`.
std::vector<std::uint8_t> touched(const ComponentLabels& labeled, std::size_t width,
                                  const std::vector<PixelPoint>& points) {
  std::vector<std::uint8_t> hit(labeled.components.size(), 0);
  for (const auto& p : points) {
    const auto l = labeled.labels[p.row * width + p.col];
    if (l != ComponentLabels::kBackground) hit[l] = 1;
  }
  return hit;
}

Mask keep_touching(const Mask& m, const std::vector<PixelPoint>& points) {
  const auto labeled = label_components(m);
  const auto hit = touched(labeled, m.width, points);
  return filter_components(m, labeled, [&](std::size_t id) { return hit[id] != 0; });
}

Mask drop_touching(const Mask& m, const std::vector<PixelPoint>& points) {
  const auto labeled = label_components(m);
  const auto hit = touched(labeled, m.width, points);
  return filter_components(m, labeled, [&](std::size_t id) { return hit[id] == 0; });
}

double mean_score(const Mask& m, const ScoreField& field) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.bits.size(); ++i) {
    if (!m.bits[i]) continue;
    sum += field.values[i];
    ++n;
  }
  return n == 0 ? -1.0 : sum / static_cast<double>(n);
}

}  // namespace

void validate_prompts(const PromptSet& prompts, std::size_t width, std::size_t height) {
  const auto& roi = prompts.roi;
  if (prompts.positive.empty()) throw Error(ErrorCode::InvalidPrompts, "at least one positive point is required");
  if (roi.x0 > roi.x1 || roi.y0 > roi.y1) throw Error(ErrorCode::InvalidPrompts, "roi must satisfy x0<=x1, y0<=y1");
  if (roi.x1 >= width || roi.y1 >= height) throw Error(ErrorCode::InvalidPrompts, "roi exceeds image bounds");
  auto in_bounds = [&](const PixelPoint& p) { return p.col < width && p.row < height; };
  for (const auto& p : prompts.positive) {
    if (!in_bounds(p)) throw Error(ErrorCode::InvalidPrompts, "positive point " + point_str(p) + " outside image");
    if (!roi.contains(p.col, p.row)) {
      throw Error(ErrorCode::InvalidPrompts, "positive point " + point_str(p) + " outside roi");
    }
  }
  for (const auto& p : prompts.negative) {
    if (!in_bounds(p)) throw Error(ErrorCode::InvalidPrompts, "negative point " + point_str(p) + " outside image");
  }
}

void IndexSpec::validate() const {
  if (band_a.empty()) throw Error(ErrorCode::InvalidArgument, "index band_a is empty");
  if (kind == IndexKind::normalized_difference && (!band_b || band_b->empty())) {
    throw Error(ErrorCode::InvalidArgument, "normalized_difference requires band_b");
  }
}

ScoreField score_field(const Scene& scene, const IndexSpec& spec) {
  spec.validate();
  ScoreField field{scene.width, scene.height, std::vector<float>(scene.pixel_count()),
                   std::vector<std::uint8_t>(scene.pixel_count(), 1)};
  const auto& a = scene.band(spec.band_a);
  if (spec.kind == IndexKind::normalized_difference) {
    const auto& b = scene.band(*spec.band_b);
    kernels::omp::normalized_difference(a.data, b.data, scene.nodata_value, field.values);
    for (std::size_t i = 0; i < field.values.size(); ++i) {
      if (scene.is_nodata(a.data[i]) || scene.is_nodata(b.data[i])) field.valid[i] = 0;
    }
    return field;
  }

  const auto range = kernels::omp::valid_range(a.data, scene.nodata_value);
  const double span = static_cast<double>(range.max) - static_cast<double>(range.min);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const float v = a.data[i];
    if (scene.is_nodata(v)) {
      field.valid[i] = 0;
      field.values[i] = -1.0f;
    } else if (span <= 0.0) {
      field.values[i] = 0.0f;
    } else {
      const double unit = (static_cast<double>(v) - range.min) / span;
      field.values[i] = static_cast<float>(std::clamp(2.0 * unit - 1.0, -1.0, 1.0));
    }
  }
  return field;
}

std::vector<double> candidate_thresholds(double positive_min, std::optional<double> negative_max, std::size_t k) {
  const double neg = std::max(negative_max.value_or(-1.0), -1.0);
  double lo = neg;
  double hi = positive_min;
  if (positive_min <= neg) {
    hi = std::clamp(positive_min, -1.0, 1.0);
    lo = std::clamp(positive_min - 0.2, -1.0, 1.0);
  }
  std::vector<double> ts(k);
  for (std::size_t i = 0; i < k; ++i) {
    ts[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(k + 1);
  }
  return ts;
}

CandidateSet generate_candidates(const Scene& scene, const PromptSet& prompts, const IndexSpec& spec, std::size_t k,
                                 const PostProcessConfig& post, CandidateTrace* trace) {
  validate_prompts(prompts, scene.width, scene.height);
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const auto field = score_field(scene, spec);

  // Positive points on nodata are background and carry no score.
  std::vector<PixelPoint> positives;
  double positive_min = 1.0;
  for (const auto& p : prompts.positive) {
    if (!field.valid_at(p.col, p.row)) continue;
    positives.push_back(p);
    positive_min = std::min(positive_min, static_cast<double>(field.at(p.col, p.row)));
  }
  if (positives.empty()) throw Error(ErrorCode::DegeneratePrompts, "every positive point lies on nodata");

  std::optional<double> negative_max;
  for (const auto& p : prompts.negative) {
    const double s = field.at(p.col, p.row);
    negative_max = negative_max ? std::max(*negative_max, s) : s;
  }

  const auto thresholds = candidate_thresholds(positive_min, negative_max, k);
  if (trace) *trace = CandidateTrace{thresholds, {}, {}, {}};

  CandidateSet result;
  result.prompt_set = prompts;
  // Highest threshold first so the stable sort below breaks score ties toward
  // the tighter mask.
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    const double t = *it;
    Mask thresholded(scene.width, scene.height);
    const auto& roi = prompts.roi;
    for (std::size_t y = roi.y0; y <= roi.y1; ++y) {
      for (std::size_t x = roi.x0; x <= roi.x1; ++x) {
        const std::size_t i = y * scene.width + x;
        if (field.valid[i] && static_cast<double>(field.values[i]) >= t) thresholded.bits[i] = 1;
      }
    }
    Mask connected = keep_touching(thresholded, positives);
    Mask pruned = drop_touching(connected, prompts.negative);

    Mask refined = postprocess(pruned, post);
    for (const auto& p : prompts.negative) refined.set(p.col, p.row, false);
    refined = keep_touching(refined, positives);

    if (trace) {
      trace->thresholded.insert(trace->thresholded.begin(), thresholded);
      trace->connected.insert(trace->connected.begin(), connected);
      trace->pruned.insert(trace->pruned.begin(), pruned);
    }
    const double score = mean_score(refined, field);
    result.candidates.push_back({std::move(refined), t, score});
  }
  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
  return result;
}

SpectralIndexEngine::SpectralIndexEngine(IndexSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

CandidateSet SpectralIndexEngine::generate(const Scene& scene, const PromptSet& prompts, std::size_t k,
                                           const PostProcessConfig& post) const {
  return generate_candidates(scene, prompts, spec_, k, post);
}

ScoreField SpectralIndexEngine::scores(const Scene& scene) const { return score_field(scene, spec_); }

}  // namespace bloombench
