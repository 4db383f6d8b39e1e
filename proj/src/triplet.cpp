#include "bloombench/triplet.hpp"

#include <fstream>

#include <json.hpp>

#include "bloombench/error.hpp"
#include "bloombench/lcg.hpp"

namespace bloombench {

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

Triplet triplet_from_json(const nlohmann::json& j) {
  Triplet t;
  t.id = j.at("id").get<std::string>();
  const auto task = j.at("task").get<std::string>();
  if (task == "severity") {
    t.task = TaskKind::severity;
  } else if (task == "segmentation") {
    t.task = TaskKind::segmentation;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown task '" + task + "'");
  }
  t.instruction = j.at("instruction").get<std::string>();
  t.image_ref = j.at("image_ref").get<std::string>();
  t.answer = j.at("answer").get<std::string>();
  if (auto it = j.find("mask_ref"); it != j.end() && !it->is_null()) t.mask_ref = it->get<std::string>();
  t.validate();
  return t;
}

}  // namespace

std::string_view to_string(TaskKind task) noexcept {
  return task == TaskKind::severity ? "severity" : "segmentation";
}

void Triplet::validate() const {
  if (task == TaskKind::severity) {
    if (answer.size() != 1 || answer.find_first_of("12345") != 0) {
      throw Error(ErrorCode::InvalidArgument, "severity answer must be one digit 1-5, got '" + answer + "'");
    }
    if (mask_ref) throw Error(ErrorCode::InvalidArgument, "severity triplets carry no mask_ref");
  } else {
    if (count_occurrences(answer, kSegToken) != 1) {
      throw Error(ErrorCode::InvalidArgument, "segmentation answer must contain <SEG> exactly once");
    }
    if (!mask_ref) throw Error(ErrorCode::InvalidArgument, "segmentation triplets need a mask_ref");
  }
}

TemplateSet TemplateSet::defaults() {
  TemplateSet set;
  set.seg_templates = {
      "Locate the cyanobacterial harmful algal bloom in the satellite image.",
      "Locate all visible harmful algal blooms.",
      "Find the cyanobacterial harmful algal bloom in the satellite image.",
      "Segment all visible harmful algal blooms.",
      "Segment the waterbody affected by cyanobacteria.",
      "Segment the cyanobacterial harmful algal bloom in the satellite image.",
      "Segment the algal bloom affected areas.",
  };
  return set;
}

void TemplateSet::validate() const {
  if (seg_templates.empty()) throw Error(ErrorCode::TooFewTemplates, "no segmentation templates");
  for (const auto& t : seg_templates) {
    if (t.empty() || t.find('{') != std::string::npos || t.find('}') != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "template is empty or has an unresolved placeholder: '" + t + "'");
    }
  }
}

Triplet gen_severity_triplet(const std::string& scene_id, SeverityLevel label) {
  Triplet t;
  t.id = "sev-" + scene_id;
  t.task = TaskKind::severity;
  t.instruction = std::string(kSeverityInstruction);
  t.image_ref = scene_id;
  t.answer = std::to_string(label.value());
  return t;
}

std::vector<Triplet> gen_seg_triplets(const std::string& scene_id, const RleMask& mask, const TemplateSet& templates,
                                      std::size_t k, std::uint64_t seed, const std::string& mask_ref) {
  templates.validate();
  if (k > templates.seg_templates.size()) {
    throw Error(ErrorCode::TooFewTemplates, "k=" + std::to_string(k) + " exceeds " +
                                                std::to_string(templates.seg_templates.size()) + " templates");
  }
  decode_rle(mask);
  const auto order = seeded_permutation(templates.seg_templates.size(), seed);
  std::vector<Triplet> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Triplet t;
    t.id = "seg-" + scene_id + "-" + std::to_string(i);
    t.task = TaskKind::segmentation;
    t.instruction = templates.seg_templates[order[i]];
    t.image_ref = scene_id;
    t.answer = std::string(kSegAnswer);
    t.mask_ref = mask_ref;
    out.push_back(std::move(t));
  }
  return out;
}

std::string triplet_to_json_line(const Triplet& t) {
  nlohmann::ordered_json j{{"id", t.id},
                           {"task", to_string(t.task)},
                           {"instruction", t.instruction},
                           {"image_ref", t.image_ref},
                           {"answer", t.answer}};
  if (t.mask_ref) j["mask_ref"] = *t.mask_ref;
  return j.dump();
}

std::size_t write_jsonl(std::span<const Triplet> triplets, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& t : triplets) out << triplet_to_json_line(t) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
  return triplets.size();
}

std::vector<Triplet> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<Triplet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      out.push_back(triplet_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedLine, e.what(), lineno);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedLine, e.detail(), lineno);
    }
  }
  return out;
}

}  // namespace bloombench
