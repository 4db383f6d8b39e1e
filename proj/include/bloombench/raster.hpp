#pragma once

// Multi-band scene container: a directory holding `scene.json` plus one raw
// little-endian float32 file per band under `bands/`.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bloombench/error.hpp"

namespace bloombench {

namespace fs = std::filesystem;

struct GeoMeta {
  std::string crs;
  /// Affine pixel -> world: x = a*col + b*row + c, y = d*col + e*row + f.
  std::array<double, 6> transform{1, 0, 0, 0, 1, 0};

  double determinant() const noexcept { return transform[0] * transform[4] - transform[1] * transform[3]; }
  bool operator==(const GeoMeta&) const = default;
};

struct Band {
  std::string name;
  std::vector<float> data;  // row-major, width * height

  bool operator==(const Band&) const = default;
};

struct Scene {
  std::string scene_id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Band> bands;
  GeoMeta geo;
  std::string acquisition_time;
  std::optional<float> nodata_value;

  std::size_t pixel_count() const noexcept { return width * height; }

  /// Exact, case-sensitive lookup. Throws UnknownBand.
  const Band& band(std::string_view name) const;
  bool has_band(std::string_view name) const noexcept;
  bool is_nodata(float sample) const noexcept { return nodata_value && sample == *nodata_value; }

  std::vector<std::string> band_names() const;
};

const Band& band(const Scene& scene, std::string_view name);

struct Violation {
  ErrorCode code;
  std::string detail;
};

/// Loads and validates a scene container. Throws the first violation found.
Scene load_scene(const fs::path& dir);

/// Every violation in a scene container; empty means it loads cleanly.
std::vector<Violation> inspect_scene(const fs::path& dir);

/// Writes `scene` to `root/<scene_id>/`, replacing any existing band files.
fs::path write_scene(const Scene& scene, const fs::path& root);

struct SceneCheck {
  std::string scene_id;
  std::vector<Violation> violations;
};

/// One entry per scene directory under `root`, sorted by directory name.
std::vector<SceneCheck> validate_store(const fs::path& root);

/// Scene directory names under `root`, sorted.
std::vector<std::string> list_scene_dirs(const fs::path& root);

/// Lazily loading, thread-safe cache of immutable scenes rooted at a store directory.
class SceneStore {
 public:
  explicit SceneStore(fs::path root);

  const fs::path& root() const noexcept { return root_; }
  std::vector<std::string> scene_ids() const;
  bool contains(const std::string& scene_id) const;
  /// Throws UnknownScene when no such directory exists.
  std::shared_ptr<const Scene> get(const std::string& scene_id) const;

 private:
  fs::path root_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const Scene>> cache_;
};

}  // namespace bloombench
