// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace figalign {

/// Row-major 8-bit luminance image.
class GrayImage {
 public:
  GrayImage() = default;
  /// Throws std::invalid_argument unless width, height >= 1.
  GrayImage(int width, int height, std::uint8_t fill = 255);
  /// Throws std::invalid_argument unless pixels.size() == width * height.
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(pixels_).subspan(index(0, y), width_);
  }

  /// Paints a filled rectangle, clipped to the image.
  void fill_rect(int x, int y, int w, int h, std::uint8_t value);

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Loads PGM/PPM (P2, P3, P5, P6) and, when built with libpng, PNG files.
/// Color inputs are converted with Rec. 601 luma weights.
/// Throws Error(ImageReadFailure).
GrayImage load_image(const std::filesystem::path& path);

/// Reads only the dimensions of an image file.
std::pair<int, int> read_image_size(const std::filesystem::path& path);

/// Writes a binary PGM (P5). Throws Error(IoFailure).
void save_pgm(const GrayImage& image, const std::filesystem::path& path);

/// True for extensions load_image understands.
bool is_supported_image(const std::filesystem::path& path);

}  // namespace figalign
