#pragma once

// JSON wire formats for segmentation-engine types. Decoders throw
// MalformedRequest with the offending field in the detail.

#include <json.hpp>

#include "bloombench/mask.hpp"
#include "bloombench/prompt_seg.hpp"

namespace bloombench {

using ojson = nlohmann::ordered_json;

/// {"positive":[[c,r],...],"negative":[[c,r],...],"roi":[x0,y0,x1,y1]}
ojson prompts_to_json(const PromptSet& p);
PromptSet prompts_from_json(const nlohmann::json& j);

ojson post_to_json(const PostProcessConfig& cfg);
/// Fields absent from `j` keep their value from `base`.
PostProcessConfig post_from_json(const nlohmann::json& j, PostProcessConfig base = {});

ojson index_to_json(const IndexSpec& spec);
IndexSpec index_from_json(const nlohmann::json& j);

/// {"prompt_set":{...},"candidates":[{"threshold","score","mask":{RLE}}]}
ojson candidates_to_json(const CandidateSet& set);
CandidateSet candidates_from_json(const nlohmann::json& j);

}  // namespace bloombench
