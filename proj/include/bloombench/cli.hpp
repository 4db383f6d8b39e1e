#pragma once

// `bloombench` command-line entry points. Exit codes: 0 success, 1 validation
// failures, 2 usage or input mismatch, 3 data corruption.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "bloombench/severity.hpp"

namespace bloombench::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCorrupt = 3;

enum class OutputFormat { table, csv, json };

/// Six decimals, ties to even (printf rounding of the exact binary value).
std::string fixed6(double v);

/// First character in "12345" wins; otherwise a number in [1, 5] rounds to
/// the nearest level; otherwise nullopt (scored as residual 4).
std::optional<SeverityLevel> parse_severity_answer(std::string_view raw);

int cmd_validate(const std::filesystem::path& store_root, std::ostream& out, std::ostream& err);

struct EvalSegOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path truth_dir;
  bool strict = false;
  OutputFormat format = OutputFormat::table;
};
int cmd_eval_seg(const EvalSegOptions& opts, std::ostream& out, std::ostream& err);

struct EvalSeverityOptions {
  std::filesystem::path pred_file;
  std::filesystem::path truth_file;
  bool strict = false;
  OutputFormat format = OutputFormat::table;
};
int cmd_eval_severity(const EvalSeverityOptions& opts, std::ostream& out, std::ostream& err);

struct GenTripletsOptions {
  std::filesystem::path store_root;
  std::filesystem::path labels_csv;
  std::optional<std::filesystem::path> masks_dir;
  std::string task = "severity";
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};
int cmd_gen_triplets(const GenTripletsOptions& opts, std::ostream& out, std::ostream& err);

/// Per-scene sampler seed: seed XOR FNV-1a-64(scene_id).
std::uint64_t scene_seed(std::uint64_t seed, std::string_view scene_id) noexcept;

int cmd_serve(const std::optional<std::string>& config, std::ostream& out, std::ostream& err);

struct ExportOptions {
  std::optional<std::string> config;
  std::optional<std::string> annotator;
  std::optional<std::string> from;
  std::optional<std::string> to;
};
int cmd_export(const ExportOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bloombench::cli
