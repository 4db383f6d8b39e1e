#include "bloombench/curation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <tuple>

#include "bloombench/error.hpp"
#include "bloombench/mask_io.hpp"
#include "bloombench/severity.hpp"

namespace bloombench {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLogName = "sessions.jsonl";
constexpr const char* kStagedDir = "staged";
constexpr const char* kLabelFile = "labels.csv";

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, std::string(key) + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

}  // namespace

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string_view to_string(SessionState s) noexcept { return s == SessionState::open ? "open" : "decided"; }

std::string_view to_string(DecisionKind k) noexcept {
  switch (k) {
    case DecisionKind::accept: return "accept";
    case DecisionKind::reject: return "reject";
    case DecisionKind::refine: return "refine";
  }
  return "reject";
}

// ---------------------------------------------------------------------------
// config

CurationConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  try {
    CurationConfig cfg;
    cfg.store_root = resolve(base_dir, j.at("store_root").get<std::string>());
    cfg.data_root = resolve(base_dir, j.value("data_root", std::string("curation-data")));
    cfg.export_root = resolve(base_dir, j.value("export_root", std::string("export")));
    if (j.contains("index")) cfg.index = index_from_json(j.at("index"));
    if (j.contains("preview_bands")) cfg.preview_bands = j.at("preview_bands").get<std::vector<std::string>>();
    if (j.contains("k")) {
      cfg.k = j.at("k").get<std::size_t>();
      if (cfg.k == 0) throw Error(ErrorCode::ConfigError, "k must be >= 1");
    }
    if (j.contains("post")) cfg.post = post_from_json(j.at("post"));
    if (j.contains("listen")) {
      const auto listen = j.at("listen").get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "listen must be host:port");
      cfg.host = listen.substr(0, colon);
      cfg.port = std::stoi(listen.substr(colon + 1));
      if (cfg.port < 0 || cfg.port > 65535) throw Error(ErrorCode::ConfigError, "port out of range");
    }
    return cfg;
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.detail());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

CurationConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

std::optional<fs::path> resolve_config_path(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return fs::path(*flag);
  if (const char* env = std::getenv("BLOOMBENCH_CONFIG"); env && *env) return fs::path(env);
  if (fs::exists("bloombench.json")) return fs::path("bloombench.json");
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// codecs

ojson decision_to_json(const Decision& d) {
  ojson j{{"kind", to_string(d.kind)}};
  if (d.chosen_candidate) j["chosen_candidate"] = *d.chosen_candidate;
  if (d.final_mask) j["final_mask"] = rle_to_json(*d.final_mask);
  j["annotator"] = d.annotator;
  if (d.note) j["note"] = *d.note;
  return j;
}

Decision decision_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::MalformedRequest, "decision must be an object");
  Decision d;
  const auto kind = field<std::string>(j, "kind");
  if (kind == "accept") {
    d.kind = DecisionKind::accept;
  } else if (kind == "reject") {
    d.kind = DecisionKind::reject;
  } else if (kind == "refine") {
    d.kind = DecisionKind::refine;
  } else {
    throw Error(ErrorCode::MalformedRequest, "unknown decision kind '" + kind + "'");
  }
  if (j.contains("chosen_candidate") && !j.at("chosen_candidate").is_null()) {
    const auto& c = j.at("chosen_candidate");
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::MalformedRequest, "chosen_candidate must be a non-negative integer");
    }
    d.chosen_candidate = c.get<std::size_t>();
  }
  if (j.contains("final_mask") && !j.at("final_mask").is_null()) {
    try {
      d.final_mask = rle_from_json(j.at("final_mask"));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedMask, e.detail());
    }
  }
  d.annotator = field<std::string>(j, "annotator");
  if (j.contains("note") && !j.at("note").is_null()) d.note = field<std::string>(j, "note");
  return d;
}

ojson session_to_json(const Session& s) {
  ojson history = ojson::array();
  for (const auto& p : s.prompts_history) history.push_back(prompts_to_json(p));
  ojson j{{"session_id", s.session_id},
          {"scene_id", s.scene_id},
          {"state", to_string(s.state)},
          {"prompts_history", std::move(history)},
          {"candidates", s.candidates ? candidates_to_json(*s.candidates) : ojson(nullptr)},
          {"decision", s.decision ? decision_to_json(*s.decision) : ojson(nullptr)}};
  if (s.staged_mask) j["staged_mask"] = *s.staged_mask;
  j["created_at"] = s.created_at;
  j["updated_at"] = s.updated_at;
  return j;
}

Session session_from_json(const nlohmann::json& j) {
  Session s;
  s.session_id = field<std::string>(j, "session_id");
  s.scene_id = field<std::string>(j, "scene_id");
  s.state = field<std::string>(j, "state") == "decided" ? SessionState::decided : SessionState::open;
  for (const auto& p : j.at("prompts_history")) s.prompts_history.push_back(prompts_from_json(p));
  if (!j.at("candidates").is_null()) s.candidates = candidates_from_json(j.at("candidates"));
  if (!j.at("decision").is_null()) s.decision = decision_from_json(j.at("decision"));
  if (j.contains("staged_mask")) s.staged_mask = field<std::string>(j, "staged_mask");
  s.created_at = field<std::string>(j, "created_at");
  s.updated_at = field<std::string>(j, "updated_at");
  return s;
}

ojson manifest_to_json(const DatasetManifest& m) {
  ojson entries = ojson::array();
  for (const auto& e : m.entries) {
    ojson je{{"scene_id", e.scene_id}, {"mask", e.mask}};
    je["severity_level"] = e.severity_level ? ojson(*e.severity_level) : ojson(nullptr);
    je["session_id"] = e.session_id;
    je["annotator"] = e.annotator;
    entries.push_back(std::move(je));
  }
  return {{"version", m.version}, {"created_at", m.created_at}, {"entries", std::move(entries)}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.version = field<std::string>(j, "version");
  m.created_at = field<std::string>(j, "created_at");
  for (const auto& e : j.at("entries")) {
    ManifestEntry entry;
    entry.scene_id = field<std::string>(e, "scene_id");
    entry.mask = field<std::string>(e, "mask");
    if (!e.at("severity_level").is_null()) entry.severity_level = e.at("severity_level").get<int>();
    entry.session_id = field<std::string>(e, "session_id");
    entry.annotator = field<std::string>(e, "annotator");
    m.entries.push_back(std::move(entry));
  }
  return m;
}

// ---------------------------------------------------------------------------
// service

CurationService::CurationService(CurationConfig cfg, Clock clock, std::unique_ptr<SegmentationEngine> engine)
    : cfg_(std::move(cfg)),
      clock_(std::move(clock)),
      engine_(engine ? std::move(engine) : std::make_unique<SpectralIndexEngine>(cfg_.index)),
      store_(cfg_.store_root),
      log_(cfg_.data_root / kLogName),
      id_rng_(std::random_device{}()) {
  fs::create_directories(cfg_.data_root / kStagedDir);
  replay();
}

std::string CurationService::new_session_id() {
  std::uint64_t hi;
  std::uint64_t lo;
  {
    std::lock_guard lock(id_mutex_);
    hi = id_rng_();
    lo = id_rng_();
  }
  // RFC 4122 version 4 / variant 1.
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xFFFF), static_cast<unsigned>(hi & 0xFFFF),
                static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

void CurationService::replay() {
  const auto lines = log_.read_all();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    nlohmann::json ev;
    try {
      ev = nlohmann::json::parse(lines[i]);
      const auto type = ev.at("event").get<std::string>();
      if (type == "create") {
        auto entry = std::make_shared<Entry>();
        entry->session = session_from_json(ev.at("session"));
        entry->last_post = cfg_.post;
        sessions_[entry->session.session_id] = std::move(entry);
        continue;
      }
      auto it = sessions_.find(ev.at("session_id").get<std::string>());
      if (it == sessions_.end()) throw Error(ErrorCode::IoError, "event for unknown session");
      auto& entry = *it->second;
      if (type == "prompts") {
        entry.session.prompts_history.push_back(prompts_from_json(ev.at("prompts")));
        entry.session.candidates = candidates_from_json(ev.at("candidates"));
        entry.last_post = post_from_json(ev.at("post"));
      } else if (type == "decision") {
        entry.session.decision = decision_from_json(ev.at("decision"));
        entry.session.state = SessionState::decided;
        if (ev.contains("staged_mask")) entry.session.staged_mask = ev.at("staged_mask").get<std::string>();
      } else {
        throw Error(ErrorCode::IoError, "unknown event '" + type + "'");
      }
      entry.session.updated_at = ev.at("at").get<std::string>();
    } catch (const std::exception& e) {
      throw Error(ErrorCode::IoError, log_.path().string() + " line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

std::shared_ptr<CurationService::Entry> CurationService::find(const std::string& session_id) const {
  std::shared_lock lock(map_mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, session_id);
  return it->second;
}

Session CurationService::create_session(const std::string& scene_id) {
  if (!store_.contains(scene_id)) throw Error(ErrorCode::UnknownScene, scene_id);
  auto entry = std::make_shared<Entry>();
  entry->last_post = cfg_.post;
  auto& s = entry->session;
  s.session_id = new_session_id();
  s.scene_id = scene_id;
  s.created_at = clock_();
  s.updated_at = s.created_at;
  log_.append(ojson{{"event", "create"}, {"session", session_to_json(s)}}.dump());
  Session copy = s;
  std::unique_lock lock(map_mutex_);
  sessions_.emplace(s.session_id, std::move(entry));
  return copy;
}

CandidateSet CurationService::submit_prompts(const std::string& session_id, const PromptSet& prompts,
                                             std::optional<std::size_t> k, std::optional<PostProcessConfig> post) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (s.state != SessionState::open) throw Error(ErrorCode::SessionClosed, session_id);
  const auto scene = store_.get(s.scene_id);
  validate_prompts(prompts, scene->width, scene->height);
  const auto used_k = k.value_or(cfg_.k);
  if (used_k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  const auto used_post = post.value_or(cfg_.post);
  auto candidates = engine_->generate(*scene, prompts, used_k, used_post);

  const auto at = clock_();
  log_.append(ojson{{"event", "prompts"},
                    {"session_id", session_id},
                    {"at", at},
                    {"prompts", prompts_to_json(prompts)},
                    {"post", post_to_json(used_post)},
                    {"candidates", candidates_to_json(candidates)}}
                  .dump());
  s.prompts_history.push_back(prompts);
  s.candidates = candidates;
  s.updated_at = at;
  entry->last_post = used_post;
  return candidates;
}

Session CurationService::decide(const std::string& session_id, const Decision& decision) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  auto& s = entry->session;
  if (s.state != SessionState::open) throw Error(ErrorCode::SessionClosed, session_id + " is already decided");
  if (decision.annotator.empty()) throw Error(ErrorCode::MalformedRequest, "annotator is required");

  const auto scene = store_.get(s.scene_id);
  auto edited_mask = [&]() {
    Mask m;
    try {
      m = decode_rle(*decision.final_mask);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedMask, e.what());
    }
    if (m.width != scene->width || m.height != scene->height) {
      throw Error(ErrorCode::MalformedMask, "final_mask is " + std::to_string(m.width) + "x" +
                                                std::to_string(m.height) + ", scene is " +
                                                std::to_string(scene->width) + "x" + std::to_string(scene->height));
    }
    return postprocess(m, entry->last_post);
  };

  std::optional<Mask> staged;
  switch (decision.kind) {
    case DecisionKind::reject:
      break;
    case DecisionKind::accept:
      if (decision.chosen_candidate) {
        if (!s.candidates || s.candidates->candidates.empty()) throw Error(ErrorCode::NoCandidates, session_id);
        if (*decision.chosen_candidate >= s.candidates->candidates.size()) {
          throw Error(ErrorCode::BadCandidateIndex,
                      std::to_string(*decision.chosen_candidate) + " of " +
                          std::to_string(s.candidates->candidates.size()));
        }
        staged = s.candidates->candidates[*decision.chosen_candidate].mask;
      } else if (decision.final_mask) {
        staged = edited_mask();
      } else {
        throw Error(ErrorCode::MalformedRequest, "accept needs chosen_candidate or final_mask");
      }
      break;
    case DecisionKind::refine:
      if (!decision.final_mask) throw Error(ErrorCode::MalformedRequest, "refine needs final_mask");
      staged = edited_mask();
      break;
  }

  std::optional<std::string> staged_rel;
  if (staged) {
    staged_rel = (fs::path(kStagedDir) / (session_id + ".json")).generic_string();
    write_file_durably(cfg_.data_root / *staged_rel, rle_to_json(encode_rle(*staged)).dump() + "\n");
  }
  const auto at = clock_();
  ojson ev{{"event", "decision"}, {"session_id", session_id}, {"at", at}, {"decision", decision_to_json(decision)}};
  if (staged_rel) ev["staged_mask"] = *staged_rel;
  log_.append(ev.dump());

  s.decision = decision;
  s.state = SessionState::decided;
  s.staged_mask = staged_rel;
  s.updated_at = at;
  return s;
}

Session CurationService::get(const std::string& session_id) const {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  return entry->session;
}

std::vector<Session> CurationService::list(std::optional<SessionState> state,
                                           std::optional<std::string> annotator) const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(map_mutex_);
    for (const auto& [id, e] : sessions_) entries.push_back(e);
  }
  std::vector<Session> out;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mutex);
    const auto& s = e->session;
    if (state && s.state != *state) continue;
    if (annotator && (!s.decision || s.decision->annotator != *annotator)) continue;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const Session& a, const Session& b) {
    return std::tie(a.created_at, a.session_id) < std::tie(b.created_at, b.session_id);
  });
  return out;
}

DatasetManifest CurationService::export_dataset(const ExportFilter& filter) {
  std::lock_guard export_lock(export_mutex_);

  // Latest accepted/refined decision per scene.
  std::map<std::string, Session> chosen;
  for (auto& s : list(SessionState::decided)) {
    if (!s.decision || s.decision->kind == DecisionKind::reject || !s.staged_mask) continue;
    if (filter.annotator && s.decision->annotator != *filter.annotator) continue;
    if (filter.from && s.updated_at < *filter.from) continue;
    if (filter.to && s.updated_at > *filter.to) continue;
    auto [it, inserted] = chosen.try_emplace(s.scene_id, s);
    if (!inserted && std::tie(s.updated_at, s.session_id) > std::tie(it->second.updated_at, it->second.session_id)) {
      it->second = s;
    }
  }

  std::map<std::string, SeverityLevel> labels;
  if (const auto label_path = store_.root() / kLabelFile; fs::exists(label_path)) {
    labels = read_label_csv(label_path);
  }

  const auto mask_dir = cfg_.export_root / "masks";
  std::error_code ec;
  fs::create_directories(mask_dir, ec);
  if (ec || !fs::is_directory(mask_dir)) {
    throw Error(ErrorCode::ExportPathUnwritable, mask_dir.string() + (ec ? ": " + ec.message() : ""));
  }
  for (const auto& entry : fs::directory_iterator(mask_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") fs::remove(entry.path());
  }

  DatasetManifest manifest;
  manifest.created_at = clock_();
  std::string label_csv = "scene_id,severity_level\n";
  bool any_label = false;
  try {
    for (const auto& [scene_id, s] : chosen) {
      const auto rle = read_rle_file(cfg_.data_root / *s.staged_mask);
      const auto mask = decode_rle(rle);
      const auto scene = store_.get(scene_id);
      if (mask.width != scene->width || mask.height != scene->height) {
        throw Error(ErrorCode::MalformedMask, "staged mask for " + scene_id + " does not match scene dimensions");
      }
      const auto rel = (fs::path("masks") / (scene_id + ".json")).generic_string();
      write_file_durably(cfg_.export_root / rel, rle_to_json(rle).dump() + "\n");

      ManifestEntry e{scene_id, rel, std::nullopt, s.session_id, s.decision->annotator};
      if (auto it = labels.find(scene_id); it != labels.end()) {
        e.severity_level = it->second.value();
        label_csv += scene_id + "," + std::to_string(it->second.value()) + "\n";
        any_label = true;
      }
      manifest.entries.push_back(std::move(e));
    }
    if (any_label) {
      write_file_durably(cfg_.export_root / kLabelFile, label_csv);
    } else {
      fs::remove(cfg_.export_root / kLabelFile, ec);
    }
    write_file_durably(cfg_.export_root / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw Error(ErrorCode::ExportPathUnwritable, e.detail());
    throw;
  }
  return manifest;
}

}  // namespace bloombench
