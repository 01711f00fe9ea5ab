// Copyright 2026 The scenemock Authors
// SPDX-License-Identifier: Apache-2.0

// Map-grid convention: cell (col, row) covers [col, col+1) x [row, row+1) and
// its center sits at (col + 0.5, row + 0.5).

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "scenemock/geometry.hpp"

namespace scenemock {

/// Lobe width used when none is configured: one 64th of the map width.
double default_sigma(int map_width);

class KeypointMapStack {
 public:
  KeypointMapStack() = default;
  KeypointMapStack(int channels, int width, int height, float sigma);

  int channels() const { return channels_; }
  int width() const { return width_; }
  int height() const { return height_; }
  float sigma() const { return sigma_; }

  float at(int channel, int col, int row) const {
    return values_[index(channel, col, row)];
  }
  float& at(int channel, int col, int row) { return values_[index(channel, col, row)]; }

  std::span<const float> channel(int c) const {
    return {values_.data() + static_cast<std::size_t>(c) * width_ * height_,
            static_cast<std::size_t>(width_) * height_};
  }
  std::span<float> channel(int c) {
    return {values_.data() + static_cast<std::size_t>(c) * width_ * height_,
            static_cast<std::size_t>(width_) * height_};
  }
  const std::vector<float>& values() const { return values_; }

  bool operator==(const KeypointMapStack&) const = default;

 private:
  std::size_t index(int channel, int col, int row) const {
    return (static_cast<std::size_t>(channel) * height_ + row) * width_ + col;
  }

  int channels_ = 0;
  int width_ = 0;
  int height_ = 0;
  float sigma_ = 1.0f;
  std::vector<float> values_;
};

/// Per-type lists of map-grid positions.
using KeypointPositions = std::vector<std::vector<Vec2>>;

struct KeypointPeak {
  Vec2 position;
  double value = 0.0;
};

/// Per-type peaks extracted from a map stack.
struct KeypointLocations {
  std::vector<std::vector<KeypointPeak>> types;
  std::size_t total() const;
};

/// Each channel is the per-cell maximum of Gaussian lobes exp(-d^2 / 2 sigma^2)
/// over that type's positions, truncated at 4 sigma.
KeypointMapStack render_maps(const KeypointPositions& positions, double sigma,
                             int width, int height);

/// Draws one lobe into `channel` with max-composition.
void splat_lobe(std::span<float> channel, int width, int height, const Vec2& center,
                double sigma);

/// Threshold + 8-neighbourhood maxima. A plateau of equal values emits only
/// its first cell in row-major order.
KeypointLocations extract_locations(const KeypointMapStack& maps, double tau_m);

/// Bilinear sample over cell centers with zero padding; 0 outside the grid.
/// `gradient`, if given, receives d(value)/d(position).
double sample(const KeypointMapStack& maps, int type, const Vec2& position,
              Vec2* gradient = nullptr);

/// Removes ceil(drop_fraction * n) uniformly chosen keypoints from every
/// object. Input is per-object, per-type positions (one per type); removed
/// entries are returned as std::nullopt.
std::vector<std::vector<std::optional<Vec2>>> occlude(
    const std::vector<std::vector<Vec2>>& objects, double drop_fraction,
    std::uint64_t seed);

/// Groups per-object keypoints (after occlusion) by type for rendering.
KeypointPositions group_by_type(const std::vector<std::vector<std::optional<Vec2>>>& objects,
                                int types);

// .kpm binary format, little-endian: "KPM1", u32 channels, u32 width,
// u32 height, f32 sigma, then channels*width*height f32 values, channel-major
// then row-major.
void write_kpm(std::ostream& out, const KeypointMapStack& maps);
KeypointMapStack read_kpm(std::istream& in);
void save_kpm(const std::filesystem::path& path, const KeypointMapStack& maps);
KeypointMapStack load_kpm(const std::filesystem::path& path);

}  // namespace scenemock
