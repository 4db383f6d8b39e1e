#include "bloombench/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include <json.hpp>

namespace bloombench {

namespace {

using json = nlohmann::json;

constexpr const char* kHeaderName = "scene.json";
constexpr const char* kBandDir = "bands";

float from_le(std::uint32_t raw) {
  if constexpr (std::endian::native == std::endian::big) {
    raw = ((raw & 0xFFu) << 24) | ((raw & 0xFF00u) << 8) | ((raw >> 8) & 0xFF00u) | (raw >> 24);
  }
  return std::bit_cast<float>(raw);
}

std::uint32_t to_le(float value) {
  auto raw = std::bit_cast<std::uint32_t>(value);
  if constexpr (std::endian::native == std::endian::big) {
    raw = ((raw & 0xFFu) << 24) | ((raw & 0xFF00u) << 8) | ((raw >> 8) & 0xFF00u) | (raw >> 24);
  }
  return raw;
}

struct Header {
  std::string scene_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::string> bands;
  GeoMeta geo;
  std::string acquisition_time;
  std::optional<float> nodata_value;
};

Header parse_header(const json& j) {
  Header h;
  try {
    h.scene_id = j.at("scene_id").get<std::string>();
    const auto w = j.at("width").get<std::int64_t>();
    const auto ht = j.at("height").get<std::int64_t>();
    if (w < 1 || ht < 1) throw Error(ErrorCode::MalformedHeader, "width and height must be >= 1");
    h.width = static_cast<std::size_t>(w);
    h.height = static_cast<std::size_t>(ht);
    h.bands = j.at("bands").get<std::vector<std::string>>();
    if (h.bands.empty()) throw Error(ErrorCode::MalformedHeader, "at least one band is required");
    const auto& geo = j.at("geo");
    h.geo.crs = geo.at("crs").get<std::string>();
    const auto t = geo.at("transform").get<std::vector<double>>();
    if (t.size() != 6) throw Error(ErrorCode::MalformedHeader, "geo.transform must have 6 entries");
    std::copy(t.begin(), t.end(), h.geo.transform.begin());
    if (h.geo.determinant() == 0.0 || !std::isfinite(h.geo.determinant())) {
      throw Error(ErrorCode::MalformedHeader, "geo.transform linear part is singular");
    }
    h.acquisition_time = j.at("acquisition_time").get<std::string>();
    if (auto it = j.find("nodata_value"); it != j.end() && !it->is_null()) {
      h.nodata_value = it->get<float>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedHeader, e.what());
  }
  return h;
}

// Reads a scene, appending every violation to `sink`. Returns nullopt when the
// header itself is unusable.
std::optional<Scene> read_scene(const fs::path& dir, std::vector<Violation>& sink) {
  const auto header_path = dir / kHeaderName;
  std::ifstream in(header_path);
  if (!in) {
    sink.push_back({ErrorCode::MissingHeader, header_path.string()});
    return std::nullopt;
  }
  Header h;
  try {
    h = parse_header(json::parse(in));
  } catch (const Error& e) {
    sink.push_back({e.code(), e.detail()});
    return std::nullopt;
  } catch (const json::exception& e) {
    sink.push_back({ErrorCode::MalformedHeader, e.what()});
    return std::nullopt;
  }

  if (const auto dirname = fs::absolute(dir).lexically_normal().filename().string();
      !dirname.empty() && dirname != h.scene_id) {
    sink.push_back({ErrorCode::MalformedHeader, "scene_id '" + h.scene_id + "' does not match directory '" + dirname + "'"});
  }

  Scene scene;
  scene.scene_id = h.scene_id;
  scene.width = h.width;
  scene.height = h.height;
  scene.geo = h.geo;
  scene.acquisition_time = h.acquisition_time;
  scene.nodata_value = h.nodata_value;

  std::set<std::string> seen;
  const std::size_t expected = h.width * h.height;
  for (const auto& name : h.bands) {
    if (!seen.insert(name).second) {
      sink.push_back({ErrorCode::DuplicateBandName, name});
      continue;
    }
    const auto band_path = dir / kBandDir / (name + ".f32");
    std::ifstream bin(band_path, std::ios::binary);
    if (!bin) {
      sink.push_back({ErrorCode::MissingBandFile, band_path.string()});
      continue;
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected * sizeof(float)) {
      sink.push_back({ErrorCode::BandSizeMismatch, name + ": " + std::to_string(bytes.size() / sizeof(float)) +
                                                       " samples, expected " + std::to_string(expected)});
      continue;
    }
    Band band{name, std::vector<float>(expected)};
    bool finite = true;
    for (std::size_t i = 0; i < expected; ++i) {
      std::uint32_t raw;
      std::memcpy(&raw, bytes.data() + i * sizeof(float), sizeof(raw));
      const float v = from_le(raw);
      band.data[i] = v;
      if (!std::isfinite(v) && !scene.is_nodata(v) && finite) {
        finite = false;
        sink.push_back({ErrorCode::NonFiniteSample, name + " at index " + std::to_string(i)});
      }
    }
    scene.bands.push_back(std::move(band));
  }
  return scene;
}

}  // namespace

const Band& Scene::band(std::string_view name) const {
  for (const auto& b : bands) {
    if (b.name == name) return b;
  }
  throw Error(ErrorCode::UnknownBand, std::string(name));
}

bool Scene::has_band(std::string_view name) const noexcept {
  return std::any_of(bands.begin(), bands.end(), [&](const Band& b) { return b.name == name; });
}

std::vector<std::string> Scene::band_names() const {
  std::vector<std::string> names;
  names.reserve(bands.size());
  for (const auto& b : bands) names.push_back(b.name);
  return names;
}

const Band& band(const Scene& scene, std::string_view name) { return scene.band(name); }

Scene load_scene(const fs::path& dir) {
  std::vector<Violation> violations;
  auto scene = read_scene(dir, violations);
  if (!violations.empty()) throw Error(violations.front().code, violations.front().detail);
  return std::move(*scene);
}

std::vector<Violation> inspect_scene(const fs::path& dir) {
  std::vector<Violation> violations;
  read_scene(dir, violations);
  return violations;
}

fs::path write_scene(const Scene& scene, const fs::path& root) {
  const auto dir = root / scene.scene_id;
  fs::create_directories(dir / kBandDir);

  nlohmann::ordered_json header{{"scene_id", scene.scene_id},
                                {"width", scene.width},
                                {"height", scene.height},
                                {"bands", scene.band_names()},
                                {"geo", {{"crs", scene.geo.crs}, {"transform", scene.geo.transform}}},
                                {"acquisition_time", scene.acquisition_time}};
  if (scene.nodata_value) header["nodata_value"] = *scene.nodata_value;
  {
    std::ofstream out(dir / kHeaderName);
    if (!out) throw Error(ErrorCode::IoError, (dir / kHeaderName).string());
    out << header.dump(2) << '\n';
  }
  for (const auto& b : scene.bands) {
    std::ofstream out(dir / kBandDir / (b.name + ".f32"), std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, b.name);
    for (float v : b.data) {
      const auto raw = to_le(v);
      out.write(reinterpret_cast<const char*>(&raw), sizeof(raw));
    }
  }
  return dir;
}

std::vector<std::string> list_scene_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::RootNotFound, root.string());
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<SceneCheck> validate_store(const fs::path& root) {
  std::vector<SceneCheck> out;
  for (const auto& id : list_scene_dirs(root)) {
    out.push_back({id, inspect_scene(root / id)});
  }
  return out;
}

SceneStore::SceneStore(fs::path root) : root_(std::move(root)) {
  if (!fs::is_directory(root_)) throw Error(ErrorCode::RootNotFound, root_.string());
}

std::vector<std::string> SceneStore::scene_ids() const { return list_scene_dirs(root_); }

bool SceneStore::contains(const std::string& scene_id) const {
  if (scene_id.empty() || scene_id.find('/') != std::string::npos || scene_id == "." || scene_id == "..") {
    return false;
  }
  return fs::is_regular_file(root_ / scene_id / kHeaderName);
}

std::shared_ptr<const Scene> SceneStore::get(const std::string& scene_id) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(scene_id); it != cache_.end()) return it->second;
  }
  if (!contains(scene_id)) throw Error(ErrorCode::UnknownScene, scene_id);
  auto scene = std::make_shared<const Scene>(load_scene(root_ / scene_id));
  std::lock_guard lock(mutex_);
  return cache_.emplace(scene_id, std::move(scene)).first->second;
}

}  // namespace bloombench
