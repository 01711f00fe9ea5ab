// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

#include "scenemock/keypoint_maps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "scenemock/error.hpp"

namespace scenemock {

double default_sigma(int map_width) { return map_width / 64.0; }

KeypointMapStack::KeypointMapStack(int channels, int width, int height, float sigma)
    : channels_(channels), width_(width), height_(height), sigma_(sigma) {
  require(channels > 0 && width > 0 && height > 0, "map stack dimensions must be positive");
  require(sigma > 0.0f, "map sigma must be positive");
  values_.assign(static_cast<std::size_t>(channels) * width * height, 0.0f);
}

std::size_t KeypointLocations::total() const {
  std::size_t n = 0;
  for (const auto& t : types) n += t.size();
  return n;
}

void splat_lobe(std::span<float> channel, int width, int height, const Vec2& center,
                double sigma) {
  const double radius = 4.0 * sigma;
  const int c0 = std::max(0, static_cast<int>(std::floor(center.x() - 0.5 - radius)));
  const int c1 = std::min(width - 1, static_cast<int>(std::ceil(center.x() - 0.5 + radius)));
  const int r0 = std::max(0, static_cast<int>(std::floor(center.y() - 0.5 - radius)));
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(center.y() - 0.5 + radius)));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (int r = r0; r <= r1; ++r) {
    const double dy = r + 0.5 - center.y();
    for (int c = c0; c <= c1; ++c) {
      const double dx = c + 0.5 - center.x();
      const double d2 = dx * dx + dy * dy;
      if (d2 > radius * radius) continue;
      const auto v = static_cast<float>(std::exp(-d2 * inv));
      float& cell = channel[static_cast<std::size_t>(r) * width + c];
      cell = std::max(cell, v);
    }
  }
}

KeypointMapStack render_maps(const KeypointPositions& positions, double sigma, int width,
                             int height) {
  require(sigma > 0.0, "render sigma must be positive");
  KeypointMapStack maps(static_cast<int>(positions.size()), width, height,
                        static_cast<float>(sigma));
  for (std::size_t type = 0; type < positions.size(); ++type) {
    auto channel = maps.channel(static_cast<int>(type));
    for (const Vec2& p : positions[type]) {
      if (!p.allFinite()) continue;
      splat_lobe(channel, width, height, p, sigma);
    }
  }
  return maps;
}

namespace {

constexpr int kNeighborOffsets[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                        {1, 0},   {-1, 1}, {0, 1},  {1, 1}};

// True if (col, row) is the first cell, in row-major order, of a plateau that
// no neighbour exceeds.
bool plateau_leader(std::span<const float> ch, int width, int height, int col, int row) {
  const float v = ch[static_cast<std::size_t>(row) * width + col];
  std::vector<char> seen(static_cast<std::size_t>(width) * height, 0);
  std::vector<std::pair<int, int>> stack{{col, row}};
  seen[static_cast<std::size_t>(row) * width + col] = 1;
  while (!stack.empty()) {
    const auto [c, r] = stack.back();
    stack.pop_back();
    if (r < row || (r == row && c < col)) return false;
    for (const auto& off : kNeighborOffsets) {
      const int nc = c + off[0];
      const int nr = r + off[1];
      if (nc < 0 || nr < 0 || nc >= width || nr >= height) continue;
      const float nv = ch[static_cast<std::size_t>(nr) * width + nc];
      if (nv > v) return false;
      auto& s = seen[static_cast<std::size_t>(nr) * width + nc];
      if (nv == v && !s) {
        s = 1;
        stack.emplace_back(nc, nr);
      }
    }
  }
  return true;
}

}  // namespace

KeypointLocations extract_locations(const KeypointMapStack& maps, double tau_m) {
  require(tau_m > 0.0 && tau_m < 1.0, "tau_m must lie in (0, 1)");
  KeypointLocations out;
  out.types.resize(maps.channels());
  const int w = maps.width();
  const int h = maps.height();
  for (int type = 0; type < maps.channels(); ++type) {
    const auto ch = maps.channel(type);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const float v = ch[static_cast<std::size_t>(r) * w + c];
        if (!(v > tau_m)) continue;
        bool is_max = true;
        bool has_equal = false;
        for (const auto& off : kNeighborOffsets) {
          const int nc = c + off[0];
          const int nr = r + off[1];
          if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
          const float nv = ch[static_cast<std::size_t>(nr) * w + nc];
          if (nv > v) {
            is_max = false;
            break;
          }
          if (nv == v) has_equal = true;
        }
        if (!is_max) continue;
        if (has_equal && !plateau_leader(ch, w, h, c, r)) continue;
        out.types[type].push_back({Vec2(c + 0.5, r + 0.5), static_cast<double>(v)});
      }
    }
  }
  return out;
}

double sample(const KeypointMapStack& maps, int type, const Vec2& position, Vec2* gradient) {
  if (gradient != nullptr) gradient->setZero();
  const int w = maps.width();
  const int h = maps.height();
  if (!(position.x() >= 0.0 && position.x() <= w && position.y() >= 0.0 &&
        position.y() <= h)) {
    return 0.0;
  }
  const double gx = position.x() - 0.5;
  const double gy = position.y() - 0.5;
  const int c0 = static_cast<int>(std::floor(gx));
  const int r0 = static_cast<int>(std::floor(gy));
  const double fx = gx - c0;
  const double fy = gy - r0;
  const auto ch = maps.channel(type);
  auto value = [&](int c, int r) -> double {
    if (c < 0 || r < 0 || c >= w || r >= h) return 0.0;
    return ch[static_cast<std::size_t>(r) * w + c];
  };
  const double v00 = value(c0, r0);
  const double v10 = value(c0 + 1, r0);
  const double v01 = value(c0, r0 + 1);
  const double v11 = value(c0 + 1, r0 + 1);
  if (gradient != nullptr) {
    gradient->x() = (1.0 - fy) * (v10 - v00) + fy * (v11 - v01);
    gradient->y() = (1.0 - fx) * (v01 - v00) + fx * (v11 - v10);
  }
  return (1.0 - fx) * (1.0 - fy) * v00 + fx * (1.0 - fy) * v10 + (1.0 - fx) * fy * v01 +
         fx * fy * v11;
}

std::vector<std::vector<std::optional<Vec2>>> occlude(
    const std::vector<std::vector<Vec2>>& objects, double drop_fraction, std::uint64_t seed) {
  require(drop_fraction >= 0.0 && drop_fraction <= 1.0, "drop fraction must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::optional<Vec2>>> out;
  out.reserve(objects.size());
  for (const auto& object : objects) {
    const auto n = object.size();
    const auto drop = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(drop_fraction * static_cast<double>(n) - 1e-9)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::optional<Vec2>> kept(object.begin(), object.end());
    for (std::size_t i = 0; i < drop; ++i) kept[order[i]].reset();
    out.push_back(std::move(kept));
  }
  return out;
}

KeypointPositions group_by_type(const std::vector<std::vector<std::optional<Vec2>>>& objects,
                                int types) {
  KeypointPositions out(types);
  for (const auto& object : objects) {
    for (int t = 0; t < types && t < static_cast<int>(object.size()); ++t) {
      if (object[t]) out[t].push_back(*object[t]);
    }
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'K', 'P', 'M', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    fail(ErrorCode::kFormat, "kpm stream truncated");
  }
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_kpm(std::ostream& out, const KeypointMapStack& maps) {
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(maps.channels()));
  put_u32(out, static_cast<std::uint32_t>(maps.width()));
  put_u32(out, static_cast<std::uint32_t>(maps.height()));
  put_u32(out, std::bit_cast<std::uint32_t>(maps.sigma()));
  for (float v : maps.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  if (!out) fail(ErrorCode::kIo, "failed writing kpm stream");
}

KeypointMapStack read_kpm(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    fail(ErrorCode::kFormat, "not a kpm stream (bad magic)");
  }
  const std::uint32_t channels = get_u32(in);
  const std::uint32_t width = get_u32(in);
  const std::uint32_t height = get_u32(in);
  const float sigma = std::bit_cast<float>(get_u32(in));
  constexpr std::uint32_t kLimit = 1u << 16;
  if (channels == 0 || width == 0 || height == 0 || channels > 256 || width > kLimit ||
      height > kLimit) {
    fail(ErrorCode::kFormat, "kpm header has invalid dimensions");
  }
  if (!(sigma > 0.0f) || !std::isfinite(sigma)) {
    fail(ErrorCode::kFormat, "kpm header has invalid sigma");
  }
  KeypointMapStack maps(static_cast<int>(channels), static_cast<int>(width),
                        static_cast<int>(height), sigma);
  for (int c = 0; c < maps.channels(); ++c) {
    for (float& v : maps.channel(c)) {
      v = std::bit_cast<float>(get_u32(in));
      if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::kFormat, "kpm value outside [0, 1]");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    fail(ErrorCode::kFormat, "kpm stream has trailing bytes");
  }
  return maps;
}

void save_kpm(const std::filesystem::path& path, const KeypointMapStack& maps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_kpm(out, maps);
}

KeypointMapStack load_kpm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return read_kpm(in);
}

}  // namespace scenemock
