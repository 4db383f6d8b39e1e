#pragma once

// Curation loop backend: sessions over scenes, prompt submission, candidate
// delivery, accept/reject/refine decisions, durable persistence and dataset
// export. HTTP bindings live in http_api.hpp.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bloombench/codec.hpp"
#include "bloombench/mask.hpp"
#include "bloombench/prompt_seg.hpp"
#include "bloombench/raster.hpp"
#include "bloombench/session_log.hpp"

namespace bloombench {

enum class SessionState { open, decided };
enum class DecisionKind { accept, reject, refine };

struct Decision {
  DecisionKind kind = DecisionKind::reject;
  std::optional<std::size_t> chosen_candidate;
  std::optional<RleMask> final_mask;
  std::string annotator;
  std::optional<std::string> note;

  bool operator==(const Decision&) const = default;
};

struct Session {
  std::string session_id;
  std::string scene_id;
  SessionState state = SessionState::open;
  std::vector<PromptSet> prompts_history;
  std::optional<CandidateSet> candidates;
  std::optional<Decision> decision;
  std::optional<std::string> staged_mask;  // relative to the data root
  std::string created_at;
  std::string updated_at;

  bool operator==(const Session&) const = default;
};

struct ExportFilter {
  std::optional<std::string> annotator;
  std::optional<std::string> from;  // inclusive, compared against the decision timestamp
  std::optional<std::string> to;    // inclusive
};

struct ManifestEntry {
  std::string scene_id;
  std::string mask;  // relative to the export root
  std::optional<int> severity_level;
  std::string session_id;
  std::string annotator;

  bool operator==(const ManifestEntry&) const = default;
};

inline constexpr const char* kManifestVersion = "bloombench-manifest/1";

struct DatasetManifest {
  std::string version = kManifestVersion;
  std::vector<ManifestEntry> entries;  // sorted by scene_id
  std::string created_at;
};

struct CurationConfig {
  std::filesystem::path store_root;
  std::filesystem::path data_root;    // session log + staged masks
  std::filesystem::path export_root;  // manifest.json, masks/, labels.csv
  IndexSpec index = IndexSpec::ndci();
  std::vector<std::string> preview_bands{"B04", "B03", "B02"};
  std::size_t k = 3;
  PostProcessConfig post;
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Relative paths in the file resolve against the config file's directory.
/// Throws ConfigError.
CurationConfig load_config(const std::filesystem::path& path);
CurationConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// --config flag, else $BLOOMBENCH_CONFIG, else ./bloombench.json if present.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::string>& flag);

/// ISO-8601 UTC with millisecond precision, e.g. 2026-01-02T03:04:05.678Z.
std::string utc_timestamp();

std::string_view to_string(SessionState s) noexcept;
std::string_view to_string(DecisionKind k) noexcept;

ojson decision_to_json(const Decision& d);
Decision decision_from_json(const nlohmann::json& j);  // throws MalformedRequest
ojson session_to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);
ojson manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

class CurationService {
 public:
  using Clock = std::function<std::string()>;

  /// Replays the session log under `data_root`, if any.
  explicit CurationService(CurationConfig cfg, Clock clock = utc_timestamp,
                           std::unique_ptr<SegmentationEngine> engine = nullptr);

  const CurationConfig& config() const noexcept { return cfg_; }
  const SceneStore& store() const noexcept { return store_; }
  const SegmentationEngine& engine() const noexcept { return *engine_; }

  /// Throws UnknownScene.
  Session create_session(const std::string& scene_id);
  /// Throws UnknownSession, SessionClosed, InvalidPrompts, DegeneratePrompts.
  CandidateSet submit_prompts(const std::string& session_id, const PromptSet& prompts,
                              std::optional<std::size_t> k = std::nullopt,
                              std::optional<PostProcessConfig> post = std::nullopt);
  /// Throws UnknownSession, SessionClosed, NoCandidates, BadCandidateIndex,
  /// MalformedMask, MalformedRequest.
  Session decide(const std::string& session_id, const Decision& decision);

  Session get(const std::string& session_id) const;
  /// Sorted by (created_at, session_id).
  std::vector<Session> list(std::optional<SessionState> state = std::nullopt,
                            std::optional<std::string> annotator = std::nullopt) const;

  /// Throws ExportPathUnwritable.
  DatasetManifest export_dataset(const ExportFilter& filter = {});

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
    PostProcessConfig last_post;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  void replay();
  std::string new_session_id();

  CurationConfig cfg_;
  Clock clock_;
  std::unique_ptr<SegmentationEngine> engine_;
  SceneStore store_;
  SessionLog log_;

  mutable std::shared_mutex map_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::mt19937_64 id_rng_;
  std::mutex export_mutex_;
};

}  // namespace bloombench
