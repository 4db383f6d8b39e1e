#pragma once

// Shared fixtures and brute-force oracles for the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bloombench/mask.hpp"
#include "bloombench/prompt_seg.hpp"
#include "bloombench/raster.hpp"

namespace bloombench::testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "bb") {
    std::random_device rd;
    const auto base = fs::temp_directory_path();
    for (;;) {
      path_ = base / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
      if (fs::create_directory(path_)) break;
    }
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << s;
}

inline Mask random_mask(std::mt19937_64& rng, std::size_t w, std::size_t h, double density) {
  std::bernoulli_distribution bit(density);
  Mask m(w, h);
  for (auto& b : m.bits) b = bit(rng) ? 1 : 0;
  return m;
}

/// Mask with a density drawn uniformly from [0, 1], including all-false and all-true masks.
inline Mask random_mask_any_density(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int r = pick(rng);
  if (r == 0) return Mask(w, h, false);
  if (r == 1) return Mask(w, h, true);
  return random_mask(rng, w, h, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
}

// ---------------------------------------------------------------------------
// oracles

struct OracleOverlap {
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;
};

inline OracleOverlap oracle_overlap(const Mask& a, const Mask& b) {
  OracleOverlap c;
  for (std::size_t row = 0; row < a.height; ++row) {
    for (std::size_t col = 0; col < a.width; ++col) {
      const bool x = a.at(col, row);
      const bool y = b.at(col, row);
      if (x && y) ++c.intersection;
      if (x || y) ++c.union_;
    }
  }
  return c;
}

struct OracleComponent {
  std::size_t area = 0;
  std::size_t first_pixel = 0;
  std::size_t min_col = 0, min_row = 0, max_col = 0, max_row = 0;
  std::vector<std::size_t> pixels;  // sorted
};

/// Breadth-first flood fill with 8-connectivity, ordered by decreasing area then first pixel.
inline std::vector<OracleComponent> oracle_components(const Mask& m) {
  std::vector<std::uint8_t> seen(m.bits.size(), 0);
  std::vector<OracleComponent> out;
  const auto w = static_cast<long>(m.width);
  const auto h = static_cast<long>(m.height);
  for (long start = 0; start < w * h; ++start) {
    if (!m.bits[start] || seen[start]) continue;
    OracleComponent c;
    c.first_pixel = static_cast<std::size_t>(start);
    c.min_col = c.max_col = static_cast<std::size_t>(start % w);
    c.min_row = c.max_row = static_cast<std::size_t>(start / w);
    std::deque<long> q{start};
    seen[start] = 1;
    while (!q.empty()) {
      const long p = q.front();
      q.pop_front();
      c.pixels.push_back(static_cast<std::size_t>(p));
      const long x = p % w;
      const long y = p / w;
      c.min_col = std::min<std::size_t>(c.min_col, x);
      c.max_col = std::max<std::size_t>(c.max_col, x);
      c.min_row = std::min<std::size_t>(c.min_row, y);
      c.max_row = std::max<std::size_t>(c.max_row, y);
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const long nx = x + dx;
          const long ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const long n = ny * w + nx;
          if (m.bits[n] && !seen[n]) {
            seen[n] = 1;
            q.push_back(n);
          }
        }
      }
    }
    std::sort(c.pixels.begin(), c.pixels.end());
    c.area = c.pixels.size();
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const OracleComponent& a, const OracleComponent& b) {
    return a.area != b.area ? a.area > b.area : a.first_pixel < b.first_pixel;
  });
  return out;
}

/// Pixel-by-pixel morphology straight from the definition.
inline Mask oracle_dilate(const Mask& m, std::size_t r) {
  Mask out(m.width, m.height);
  const long R = static_cast<long>(r);
  for (long y = 0; y < static_cast<long>(m.height); ++y) {
    for (long x = 0; x < static_cast<long>(m.width); ++x) {
      bool any = false;
      for (long dy = -R; dy <= R && !any; ++dy) {
        for (long dx = -R; dx <= R && !any; ++dx) {
          const long nx = x + dx;
          const long ny = y + dy;
          if (nx >= 0 && ny >= 0 && nx < static_cast<long>(m.width) && ny < static_cast<long>(m.height)) {
            any = m.at(nx, ny);
          }
        }
      }
      out.set(x, y, any);
    }
  }
  return out;
}

inline Mask oracle_erode(const Mask& m, std::size_t r) {
  Mask out(m.width, m.height);
  const long R = static_cast<long>(r);
  for (long y = 0; y < static_cast<long>(m.height); ++y) {
    for (long x = 0; x < static_cast<long>(m.width); ++x) {
      bool all = true;
      for (long dy = -R; dy <= R && all; ++dy) {
        for (long dx = -R; dx <= R && all; ++dx) {
          const long nx = x + dx;
          const long ny = y + dy;
          all = nx >= 0 && ny >= 0 && nx < static_cast<long>(m.width) && ny < static_cast<long>(m.height) &&
                m.at(nx, ny);
        }
      }
      out.set(x, y, all);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// synthetic scenes

struct BlobScene {
  Scene scene;
  std::vector<PixelPoint> centers;  // one per blob, strongly positive index
};

/// Two-band scene (B04 red, B05 red-edge) whose NDCI is high inside a few
/// Gaussian blobs and negative elsewhere, with mild deterministic noise.
inline BlobScene make_blob_scene(const std::string& id, std::size_t w, std::size_t h, std::uint64_t seed,
                                 std::size_t n_blobs = 3, bool with_nodata = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.15 * w, 0.85 * w);
  std::uniform_real_distribution<double> uy(0.15 * h, 0.85 * h);
  std::uniform_real_distribution<double> usig(0.05 * std::min(w, h), 0.12 * std::min(w, h));
  std::uniform_real_distribution<double> noise(-0.02, 0.02);

  struct Blob {
    double x, y, sigma;
  };
  std::vector<Blob> blobs;
  BlobScene out;
  for (std::size_t i = 0; i < n_blobs; ++i) {
    blobs.push_back({ux(rng), uy(rng), usig(rng)});
    out.centers.push_back({static_cast<std::size_t>(blobs.back().x), static_cast<std::size_t>(blobs.back().y)});
  }

  Scene& s = out.scene;
  s.scene_id = id;
  s.width = w;
  s.height = h;
  s.geo.crs = "EPSG:32617";
  s.geo.transform = {10.0, 0.0, 500000.0, 0.0, -10.0, 4600000.0};
  s.acquisition_time = "2024-07-15T16:00:00Z";
  Band red{"B04", std::vector<float>(w * h)};
  Band edge{"B05", std::vector<float>(w * h)};
  Band green{"B03", std::vector<float>(w * h)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double bloom = 0.0;
      for (const auto& b : blobs) {
        const double dx = x - b.x;
        const double dy = y - b.y;
        bloom = std::max(bloom, std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma)));
      }
      const std::size_t i = y * w + x;
      red.data[i] = static_cast<float>(0.10 + noise(rng) * 0.1);
      edge.data[i] = static_cast<float>(0.07 + 0.25 * bloom + noise(rng) * 0.1);
      green.data[i] = static_cast<float>(0.08 + 0.05 * bloom);
    }
  }
  if (with_nodata) {
    s.nodata_value = -9999.0f;
    for (std::size_t y = 0; y < h; ++y) red.data[y * w] = -9999.0f;  // first column
  }
  s.bands = {std::move(red), std::move(green), std::move(edge)};
  return out;
}

/// Prompts derived from a blob scene: every blob centre positive, a few
/// far-away pixels negative, and an ROI covering the blobs with a margin.
inline PromptSet blob_prompts(const BlobScene& bs, std::uint64_t seed, std::size_t n_negative = 3) {
  const auto& s = bs.scene;
  PromptSet p;
  std::size_t x0 = s.width, y0 = s.height, x1 = 0, y1 = 0;
  for (const auto& c : bs.centers) {
    p.positive.push_back(c);
    x0 = std::min(x0, c.col);
    y0 = std::min(y0, c.row);
    x1 = std::max(x1, c.col);
    y1 = std::max(y1, c.row);
  }
  const std::size_t margin = std::max<std::size_t>(4, s.width / 8);
  p.roi = {x0 > margin ? x0 - margin : 0, y0 > margin ? y0 - margin : 0, std::min(s.width - 1, x1 + margin),
           std::min(s.height - 1, y1 + margin)};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> ux(0, s.width - 1);
  std::uniform_int_distribution<std::size_t> uy(0, s.height - 1);
  const auto& red = s.band("B04").data;
  const auto& edge = s.band("B05").data;
  for (int tries = 0; p.negative.size() < n_negative && tries < 10000; ++tries) {
    const std::size_t x = ux(rng);
    const std::size_t y = uy(rng);
    const std::size_t i = y * s.width + x;
    if ((edge[i] - red[i]) / (edge[i] + red[i]) < -0.05f) p.negative.push_back({x, y});
  }
  return p;
}

}  // namespace bloombench::testing
