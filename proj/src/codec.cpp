#include "bloombench/codec.hpp"

#include "bloombench/error.hpp"
#include "bloombench/mask_io.hpp"

namespace bloombench {

namespace {

std::size_t non_negative(const nlohmann::json& v, const char* what) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::MalformedRequest, std::string(what) + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<PixelPoint> points_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw Error(ErrorCode::MalformedRequest, std::string(what) + " must be an array");
  std::vector<PixelPoint> pts;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) {
      throw Error(ErrorCode::MalformedRequest, std::string(what) + " entries must be [col,row]");
    }
    pts.push_back({non_negative(p[0], what), non_negative(p[1], what)});
  }
  return pts;
}

}  // namespace

ojson prompts_to_json(const PromptSet& p) {
  auto pts = [](const std::vector<PixelPoint>& v) {
    ojson arr = ojson::array();
    for (const auto& q : v) arr.push_back({q.col, q.row});
    return arr;
  };
  return {{"positive", pts(p.positive)},
          {"negative", pts(p.negative)},
          {"roi", {p.roi.x0, p.roi.y0, p.roi.x1, p.roi.y1}}};
}

PromptSet prompts_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedRequest, "prompts must be an object");
  PromptSet p;
  if (!j.contains("positive")) throw Error(ErrorCode::MalformedRequest, "prompts.positive is required");
  p.positive = points_from_json(j.at("positive"), "positive");
  if (j.contains("negative")) p.negative = points_from_json(j.at("negative"), "negative");
  if (!j.contains("roi")) throw Error(ErrorCode::MalformedRequest, "prompts.roi is required");
  const auto& roi = j.at("roi");
  if (!roi.is_array() || roi.size() != 4) throw Error(ErrorCode::MalformedRequest, "roi must be [x0,y0,x1,y1]");
  p.roi = {non_negative(roi[0], "roi"), non_negative(roi[1], "roi"), non_negative(roi[2], "roi"),
           non_negative(roi[3], "roi")};
  return p;
}

ojson post_to_json(const PostProcessConfig& cfg) {
  return {{"closing_radius", cfg.closing_radius},
          {"min_component_area", cfg.min_component_area},
          {"fill_holes", cfg.fill_holes}};
}

PostProcessConfig post_from_json(const nlohmann::json& j, PostProcessConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedRequest, "post must be an object");
  if (j.contains("closing_radius")) base.closing_radius = non_negative(j.at("closing_radius"), "closing_radius");
  if (j.contains("min_component_area")) {
    base.min_component_area = non_negative(j.at("min_component_area"), "min_component_area");
  }
  if (j.contains("fill_holes")) {
    if (!j.at("fill_holes").is_boolean()) throw Error(ErrorCode::MalformedRequest, "fill_holes must be boolean");
    base.fill_holes = j.at("fill_holes").get<bool>();
  }
  return base;
}

ojson index_to_json(const IndexSpec& spec) {
  ojson j{{"kind", spec.kind == IndexKind::normalized_difference ? "normalized_difference" : "single_band"},
          {"band_a", spec.band_a}};
  if (spec.band_b) j["band_b"] = *spec.band_b;
  return j;
}

IndexSpec index_from_json(const nlohmann::json& j) {
  try {
    IndexSpec spec;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "normalized_difference") {
      spec.kind = IndexKind::normalized_difference;
    } else if (kind == "single_band") {
      spec.kind = IndexKind::single_band;
    } else {
      throw Error(ErrorCode::MalformedRequest, "unknown index kind '" + kind + "'");
    }
    spec.band_a = j.at("band_a").get<std::string>();
    spec.band_b.reset();
    if (j.contains("band_b") && !j.at("band_b").is_null()) spec.band_b = j.at("band_b").get<std::string>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedRequest, e.detail());
  }
}

ojson candidates_to_json(const CandidateSet& set) {
  ojson cands = ojson::array();
  for (const auto& c : set.candidates) {
    cands.push_back({{"threshold", c.threshold}, {"score", c.score}, {"mask", rle_to_json(encode_rle(c.mask))}});
  }
  return {{"prompt_set", prompts_to_json(set.prompt_set)}, {"candidates", std::move(cands)}};
}

CandidateSet candidates_from_json(const nlohmann::json& j) {
  try {
    CandidateSet set;
    set.prompt_set = prompts_from_json(j.at("prompt_set"));
    for (const auto& c : j.at("candidates")) {
      set.candidates.push_back(
          {decode_rle(rle_from_json(c.at("mask"))), c.at("threshold").get<double>(), c.at("score").get<double>()});
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, e.what());
  }
}

}  // namespace bloombench
