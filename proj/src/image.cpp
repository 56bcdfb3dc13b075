// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The figalign Authors

#include "figalign/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifdef FIGALIGN_HAVE_PNG
#include <png.h>
#endif

#include "figalign/error.hpp"

namespace figalign {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
  if (pixels_.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("pixel buffer does not match width * height");
}

void GrayImage::fill_rect(int x, int y, int w, int h, std::uint8_t value) {
  const int x0 = std::max(0, x), y0 = std::max(0, y);
  const int x1 = std::min(width_, x + w), y1 = std::min(height_, y + h);
  for (int yy = y0; yy < y1; ++yy)
    std::fill_n(pixels_.begin() + static_cast<std::ptrdiff_t>(index(x0, yy)),
                std::max(0, x1 - x0), value);
}

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
  throw Error(ErrorCode::ImageReadFailure, why, path.string());
}

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::uint8_t luma(unsigned r, unsigned g, unsigned b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

class PnmReader {
 public:
  PnmReader(std::string data, std::filesystem::path path)
      : data_(std::move(data)), path_(std::move(path)) {}

  GrayImage read(bool header_only, int* w_out, int* h_out) {
    if (data_.size() < 2 || data_[0] != 'P') fail(path_, "not a PNM file");
    const char kind = data_[1];
    if (kind != '2' && kind != '3' && kind != '5' && kind != '6')
      fail(path_, "unsupported PNM variant");
    pos_ = 2;
    const long w = next_int(), h = next_int(), maxval = next_int();
    if (w < 1 || h < 1 || w > 1 << 15 || h > 1 << 15) fail(path_, "bad dimensions");
    if (maxval < 1 || maxval > 65535) fail(path_, "bad maxval");
    *w_out = static_cast<int>(w);
    *h_out = static_cast<int>(h);
    if (header_only) return {};

    const bool color = kind == '3' || kind == '6';
    const bool binary = kind == '5' || kind == '6';
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const int channels = color ? 3 : 1;
    std::vector<std::uint8_t> px(n);
    if (binary) ++pos_;  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    auto sample = [&]() -> long {
      if (!binary) return next_int();
      if (pos_ + bytes > data_.size()) fail(path_, "truncated pixel data");
      long v = static_cast<unsigned char>(data_[pos_++]);
      if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(data_[pos_++]);
      return v;
    };
    auto scale = [&](long v) -> unsigned {
      if (v < 0 || v > maxval) fail(path_, "sample exceeds maxval");
      return static_cast<unsigned>((v * 255 + maxval / 2) / maxval);
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (channels == 1) {
        px[i] = static_cast<std::uint8_t>(scale(sample()));
      } else {
        unsigned r = scale(sample()), g = scale(sample()), b = scale(sample());
        px[i] = luma(r, g, b);
      }
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(px));
  }

 private:
  long next_int() {
    for (;;) {
      while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
      if (pos_ < data_.size() && data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_])))
      fail(path_, "malformed header or ASCII sample");
    long v = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + (data_[pos_++] - '0');
      if (v > 1 << 24) fail(path_, "integer too large");
    }
    return v;
  }

  std::string data_;
  std::filesystem::path path_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open image");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

#ifdef FIGALIGN_HAVE_PNG
GrayImage load_png(const std::filesystem::path& path, bool header_only, int* w, int* h) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) fail(path, img.message);
  *w = static_cast<int>(img.width);
  *h = static_cast<int>(img.height);
  if (header_only || img.width == 0 || img.height == 0) {
    png_image_free(&img);
    if (img.width == 0 || img.height == 0) fail(path, "empty PNG");
    return {};
  }
  // Rec. 601 luma over RGB; transparency composites onto white.
  img.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(img));
  const png_color white{255, 255, 255};
  if (!png_image_finish_read(&img, &white, rgb.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    fail(path, msg);
  }
  std::vector<std::uint8_t> px(rgb.size() / 3);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  return GrayImage(*w, *h, std::move(px));
}
#endif

GrayImage load_any(const std::filesystem::path& path, bool header_only, int* w, int* h) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") {
#ifdef FIGALIGN_HAVE_PNG
    return load_png(path, header_only, w, h);
#else
    fail(path, "built without PNG support");
#endif
  }
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm")
    return PnmReader(slurp(path), path).read(header_only, w, h);
  fail(path, "unsupported image extension \"" + ext + "\"");
}

}  // namespace

bool is_supported_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
#ifdef FIGALIGN_HAVE_PNG
  if (ext == ".png") return true;
#endif
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

GrayImage load_image(const std::filesystem::path& path) {
  int w = 0, h = 0;
  return load_any(path, false, &w, &h);
}

std::pair<int, int> read_image_size(const std::filesystem::path& path) {
  int w = 0, h = 0;
  load_any(path, true, &w, &h);
  return {w, h};
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open for writing", path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  auto px = image.pixels();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "write failed", path.string());
}

}  // namespace figalign
