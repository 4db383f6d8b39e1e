#include "bloombench/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "bloombench/error.hpp"
#include "bloombench/kernels.hpp"

namespace bloombench {

namespace {

void require_same_shape(const Mask& a, const Mask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                                                  std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

// Union-find over provisional labels.
struct DisjointSet {
  std::vector<std::int32_t> parent;

  std::int32_t make() {
    parent.push_back(static_cast<std::int32_t>(parent.size()));
    return parent.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

}  // namespace

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

RleMask encode_rle(const Mask& mask) {
  RleMask rle{mask.width, mask.height, {}};
  bool current = false;
  std::uint64_t run = 0;
  for (auto b : mask.bits) {
    const bool v = b != 0;
    if (v != current) {
      rle.counts.push_back(run);
      run = 0;
      current = v;
    }
    ++run;
  }
  rle.counts.push_back(run);
  return rle;
}

Mask decode_rle(const RleMask& rle) {
  const std::uint64_t total = static_cast<std::uint64_t>(rle.width) * rle.height;
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < rle.counts.size(); ++i) {
    if (i > 0 && rle.counts[i] == 0) {
      throw Error(ErrorCode::MalformedRle, "zero run at position " + std::to_string(i));
    }
    sum += rle.counts[i];
    if (sum > total) break;
  }
  if (sum != total || rle.counts.empty()) {
    throw Error(ErrorCode::RunSumMismatch,
                "runs cover " + std::to_string(sum) + " pixels, expected " + std::to_string(total));
  }
  Mask m(rle.width, rle.height);
  std::size_t pos = 0;
  bool value = false;
  for (auto run : rle.counts) {
    if (value) std::fill_n(m.bits.begin() + static_cast<std::ptrdiff_t>(pos), run, std::uint8_t{1});
    pos += run;
    value = !value;
  }
  return m;
}

Mask mask_not(const Mask& m) {
  Mask out(m.width, m.height);
  std::transform(m.bits.begin(), m.bits.end(), out.bits.begin(), [](std::uint8_t b) { return b ? 0 : 1; });
  return out;
}

Mask mask_and(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  Mask out(a.width, a.height);
  for (std::size_t i = 0; i < a.bits.size(); ++i) out.bits[i] = (a.bits[i] && b.bits[i]) ? 1 : 0;
  return out;
}

Mask mask_or(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  Mask out(a.width, a.height);
  for (std::size_t i = 0; i < a.bits.size(); ++i) out.bits[i] = (a.bits[i] || b.bits[i]) ? 1 : 0;
  return out;
}

bool is_subset(const Mask& a, const Mask& b) {
  require_same_shape(a, b);
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    if (a.bits[i] && !b.bits[i]) return false;
  }
  return true;
}

Mask dilate(const Mask& m, std::size_t radius) {
  if (radius == 0) return m;
  Mask out(m.width, m.height);
  kernels::omp::dilate(m.bits, m.width, m.height, radius, out.bits);
  return out;
}

Mask erode(const Mask& m, std::size_t radius) {
  if (radius == 0) return m;
  Mask out(m.width, m.height);
  kernels::omp::erode(m.bits, m.width, m.height, radius, out.bits);
  return out;
}

Mask close(const Mask& m, std::size_t radius) { return erode(dilate(m, radius), radius); }

Mask open(const Mask& m, std::size_t radius) { return dilate(erode(m, radius), radius); }

ComponentLabels label_components(const Mask& m) {
  const std::size_t w = m.width;
  const std::size_t h = m.height;
  ComponentLabels result;
  result.labels.assign(w * h, ComponentLabels::kBackground);
  DisjointSet sets;

  // First pass: provisional labels from the already-visited 8-neighbours.
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (!m.bits[i]) continue;
      std::int32_t label = ComponentLabels::kBackground;
      auto visit = [&](std::size_t j) {
        const auto l = result.labels[j];
        if (l == ComponentLabels::kBackground) return;
        if (label == ComponentLabels::kBackground) {
          label = l;
        } else {
          sets.unite(label, l);
        }
      };
      if (x > 0) visit(i - 1);
      if (y > 0) {
        if (x > 0) visit(i - w - 1);
        visit(i - w);
        if (x + 1 < w) visit(i - w + 1);
      }
      result.labels[i] = label == ComponentLabels::kBackground ? sets.make() : label;
    }
  }

  // Second pass: resolve roots and gather statistics, numbering roots in
  // order of first appearance.
  std::vector<std::int32_t> root_slot(sets.parent.size(), -1);
  std::vector<Component> comps;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      if (result.labels[i] == ComponentLabels::kBackground) continue;
      const auto root = sets.find(result.labels[i]);
      if (root_slot[root] < 0) {
        root_slot[root] = static_cast<std::int32_t>(comps.size());
        comps.push_back({0, 0, {x, y, x, y}, i});
      }
      auto& c = comps[root_slot[root]];
      ++c.area;
      c.box.min_col = std::min(c.box.min_col, x);
      c.box.max_col = std::max(c.box.max_col, x);
      c.box.max_row = std::max(c.box.max_row, y);
      result.labels[i] = root_slot[root];
    }
  }

  std::vector<std::size_t> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (comps[a].area != comps[b].area) return comps[a].area > comps[b].area;
    return comps[a].first_pixel < comps[b].first_pixel;
  });
  std::vector<std::int32_t> rank(comps.size());
  result.components.reserve(comps.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = static_cast<std::int32_t>(r);
    auto c = comps[order[r]];
    c.id = r;
    result.components.push_back(c);
  }
  for (auto& l : result.labels) {
    if (l != ComponentLabels::kBackground) l = rank[l];
  }
  return result;
}

std::vector<Component> connected_components(const Mask& m) { return label_components(m).components; }

Mask fill_holes(const Mask& m) {
  const std::size_t w = m.width;
  const std::size_t h = m.height;
  if (w == 0 || h == 0) return m;
  // Background reachable from the border through 4-connected false pixels.
  std::vector<std::uint8_t> outside(w * h, 0);
  std::vector<std::size_t> stack;
  auto seed = [&](std::size_t i) {
    if (!m.bits[i] && !outside[i]) {
      outside[i] = 1;
      stack.push_back(i);
    }
  };
  for (std::size_t x = 0; x < w; ++x) {
    seed(x);
    seed((h - 1) * w + x);
  }
  for (std::size_t y = 0; y < h; ++y) {
    seed(y * w);
    seed(y * w + w - 1);
  }
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const std::size_t x = i % w;
    const std::size_t y = i / w;
    if (x > 0) seed(i - 1);
    if (x + 1 < w) seed(i + 1);
    if (y > 0) seed(i - w);
    if (y + 1 < h) seed(i + w);
  }
  Mask out(w, h);
  for (std::size_t i = 0; i < w * h; ++i) out.bits[i] = outside[i] ? 0 : 1;
  return out;
}

Mask remove_small_components(const Mask& m, std::size_t min_area) {
  if (min_area <= 1) return m;
  const auto labeled = label_components(m);
  Mask out(m.width, m.height);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    const auto l = labeled.labels[i];
    if (l != ComponentLabels::kBackground && labeled.components[l].area >= min_area) out.bits[i] = 1;
  }
  return out;
}

Mask postprocess(const Mask& m, const PostProcessConfig& cfg) {
  Mask out = close(m, cfg.closing_radius);
  if (cfg.fill_holes) out = fill_holes(out);
  return remove_small_components(out, cfg.min_component_area);
}

}  // namespace bloombench
