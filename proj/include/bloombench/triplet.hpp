#pragma once

// Instruction–image–answer records for severity and segmentation
// fine-tuning, persisted as JSON Lines.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bloombench/mask.hpp"
#include "bloombench/severity.hpp"

namespace bloombench {

/// Byte-exact severity query prompt. Note the trailing space after "where:".
inline constexpr std::string_view kSeverityInstruction =
    "<image>\n"
    "Analyze the provided satellite image of algae-specific conditions. Determine the severity level, where: \n"
    "1 = Very low, 2 = Low, 3 = Moderate, 4 = High, 5 = Very high.\n"
    "Output only a single digit from 1-5 with no other text.\n"
    "Example output:3";

inline constexpr std::string_view kSegToken = "<SEG>";
inline constexpr std::string_view kSegAnswer = "It is <SEG>.";

enum class TaskKind { severity, segmentation };

std::string_view to_string(TaskKind task) noexcept;

struct Triplet {
  std::string id;
  TaskKind task = TaskKind::severity;
  std::string instruction;
  std::string image_ref;  // scene_id
  std::string answer;
  std::optional<std::string> mask_ref;  // segmentation only

  /// Throws InvalidArgument when the answer violates the task's format.
  void validate() const;
  bool operator==(const Triplet&) const = default;
};

struct TemplateSet {
  std::string severity_template = std::string(kSeverityInstruction);
  std::vector<std::string> seg_templates;

  /// The seven distinct segmentation queries used for HAB grounding.
  static TemplateSet defaults();
  void validate() const;
};

Triplet gen_severity_triplet(const std::string& scene_id, SeverityLevel label);

/// Samples k distinct templates with `seeded_permutation(n, seed)` and emits
/// one triplet per template, answering "It is <SEG>." with `mask_ref`.
/// Throws TooFewTemplates, RunSumMismatch/MalformedRle for an invalid mask.
std::vector<Triplet> gen_seg_triplets(const std::string& scene_id, const RleMask& mask, const TemplateSet& templates,
                                      std::size_t k, std::uint64_t seed, const std::string& mask_ref);

/// Writes one JSON object per line; returns the count. Throws IoError.
std::size_t write_jsonl(std::span<const Triplet> triplets, const std::filesystem::path& path);
/// Throws IoError or MalformedLine carrying the 1-based line number.
std::vector<Triplet> read_jsonl(const std::filesystem::path& path);

std::string triplet_to_json_line(const Triplet& t);

}  // namespace bloombench
