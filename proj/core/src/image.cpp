// Copyright 2026 The eyelabel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eyelabel/image.hpp"

#include <png.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace eyelabel {

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

Rgb RgbImage::at(int x, int y) const {
  if (!contains(x, y)) throw std::out_of_range("pixel outside image");
  const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                  static_cast<std::size_t>(x)) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  if (!contains(x, y)) throw std::out_of_range("pixel outside image");
  plot(x, y, c);
}

void RgbImage::plot(int x, int y, Rgb c) noexcept {
  if (!contains(x, y)) return;
  const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                  static_cast<std::size_t>(x)) * 3;
  data_[i] = c.r;
  data_[i + 1] = c.g;
  data_[i + 2] = c.b;
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c) {
  // Bresenham
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    img.plot(x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_cross(RgbImage& img, Point2 center, int half_size, Rgb c) {
  const int cx = static_cast<int>(std::lround(center.x));
  const int cy = static_cast<int>(std::lround(center.y));
  draw_line(img, cx - half_size, cy, cx + half_size, cy, c);
  draw_line(img, cx, cy - half_size, cx, cy + half_size, c);
}

void draw_rect(RgbImage& img, int x, int y, int width, int height, Rgb c) {
  if (width <= 0 || height <= 0) return;
  const int x1 = x + width - 1;
  const int y1 = y + height - 1;
  draw_line(img, x, y, x1, y, c);
  draw_line(img, x, y1, x1, y1, c);
  draw_line(img, x, y, x, y1, c);
  draw_line(img, x1, y, x1, y1, c);
}

void draw_ellipse(RgbImage& img, Point2 center, double major, double minor, double angle, Rgb c) {
  const int steps = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * major)));
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  auto point = [&](int i) {
    const double t = 2.0 * std::numbers::pi * i / steps;
    const double u = major * std::cos(t);
    const double v = minor * std::sin(t);
    return std::pair{static_cast<int>(std::lround(center.x + u * ca - v * sa)),
                     static_cast<int>(std::lround(center.y + u * sa + v * ca))};
  };
  auto [px, py] = point(0);
  for (int i = 1; i <= steps; ++i) {
    auto [qx, qy] = point(i);
    draw_line(img, px, py, qx, qy, c);
    px = qx;
    py = qy;
  }
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  if (img.width() == 0 || img.height() == 0) throw std::invalid_argument("cannot encode empty image");
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  auto* base = const_cast<std::uint8_t*>(img.bytes().data());
  for (int y = 0; y < img.height(); ++y) {
    rows[static_cast<std::size_t>(y)] = base + static_cast<std::size_t>(y) *
                                                   static_cast<std::size_t>(img.width()) * 3;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng failed while encoding");
  }
  png_set_write_fn(png, &out, png_append, png_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::string& path, const RgbImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace eyelabel
