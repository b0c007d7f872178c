#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifdef STRUCTMATRIX_HAVE_PNG
#include <png.h>
#endif

#include "structmatrix/layout.hpp"

namespace structmatrix {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ColorRamp {
  std::vector<std::pair<double, Rgb>> anchors;  // sorted by ratio, spanning [0, 1]
  Rgb background{255, 255, 255};
  Rgb separator{160, 160, 160};

  static ColorRamp blue_red() { return {{{0.0, {0, 0, 255}}, {1.0, {255, 0, 0}}}}; }

  void validate() const {
    if (anchors.empty() || anchors.front().first != 0.0 || anchors.back().first != 1.0) {
      throw std::invalid_argument("color ramp must have anchors at 0 and 1");
    }
    for (std::size_t i = 1; i < anchors.size(); ++i) {
      if (anchors[i].first < anchors[i - 1].first) throw std::invalid_argument("color ramp anchors out of order");
    }
  }
};

inline Rgb ramp_color(double v, const ColorRamp& ramp) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::out_of_range("ramp input outside [0, 1]");
  const auto& a = ramp.anchors;
  if (a.empty()) throw std::invalid_argument("color ramp without anchors");
  std::size_t hi = 1;
  while (hi < a.size() - 1 && a[hi].first < v) ++hi;
  if (a.size() == 1) return a.front().second;
  const auto& [t0, c0] = a[hi - 1];
  const auto& [t1, c1] = a[hi];
  const double f = t1 > t0 ? (v - t0) / (t1 - t0) : 1.0;
  auto mix = [f](std::uint8_t x, std::uint8_t y) {
    return static_cast<std::uint8_t>(std::lround(x + (static_cast<double>(y) - x) * f));
  };
  return {mix(c0.r, c1.r), mix(c0.g, c1.g), mix(c0.b, c1.b)};
}

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  Rgb at(std::size_t x, std::size_t y) const {
    const std::size_t k = 3 * (y * width + x);
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
  }
};

namespace detail {

inline constexpr std::size_t kSeparatorSlot = SIZE_MAX;

// Image line -> grid line, with one separator slot between consecutive
// non-empty segments.
template <class ExtentOf>
std::vector<std::size_t> image_axis(const LayoutPlan& plan, ExtentOf extent_of, bool separators) {
  std::vector<std::size_t> axis;
  bool first = true;
  for (const auto& s : plan.segments) {
    const auto [offset, length] = extent_of(s);
    if (length == 0) continue;
    if (!first && separators) axis.push_back(kSeparatorSlot);
    first = false;
    for (std::size_t k = 0; k < length; ++k) axis.push_back(offset + k);
  }
  return axis;
}

}  // namespace detail

// Colors the grid and inserts 1-px separator lines between segments. Matrix
// position 0 ends up at the bottom-left corner of the image.
inline Image compose_image(const RasterGrid& grid, const ColorRamp& ramp, const LayoutPlan& plan,
                           bool separators = true) {
  if (grid.width != plan.canvas_w || grid.height != plan.canvas_h) {
    throw std::invalid_argument("grid dimensions do not match the layout canvas");
  }
  ramp.validate();
  auto xs = detail::image_axis(plan, [](const SegmentPlan& s) { return std::pair{s.px_x_offset, s.px_x}; }, separators);
  auto ys = detail::image_axis(plan, [](const SegmentPlan& s) { return std::pair{s.px_y_offset, s.px_y}; }, separators);
  if (xs.empty()) {
    for (std::size_t k = 0; k < grid.width; ++k) xs.push_back(k);
  }
  if (ys.empty()) {
    for (std::size_t k = 0; k < grid.height; ++k) ys.push_back(k);
  }
  std::reverse(ys.begin(), ys.end());

  Image img;
  img.width = xs.size();
  img.height = ys.size();
  img.rgb.resize(3 * img.width * img.height);
  std::size_t k = 0;
  for (std::size_t gy : ys) {
    for (std::size_t gx : xs) {
      Rgb c;
      if (gy == detail::kSeparatorSlot || gx == detail::kSeparatorSlot) {
        c = ramp.separator;
      } else if (!grid.touched(gx, gy)) {
        c = ramp.background;
      } else {
        c = ramp_color(grid.at(gx, gy), ramp);
      }
      img.rgb[k++] = c.r;
      img.rgb[k++] = c.g;
      img.rgb[k++] = c.b;
    }
  }
  return img;
}

inline void write_ppm(const Image& img, std::ostream& out) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

enum class ImageFormat : std::uint8_t { ppm, png };

inline ImageFormat parse_image_format(std::string_view s) {
  if (s == "ppm") return ImageFormat::ppm;
  if (s == "png") return ImageFormat::png;
  throw std::invalid_argument("unknown image format '" + std::string(s) + "'");
}

constexpr bool png_supported() {
#ifdef STRUCTMATRIX_HAVE_PNG
  return true;
#else
  return false;
#endif
}

inline void write_png(const Image& img, const std::filesystem::path& path) {
#ifdef STRUCTMATRIX_HAVE_PNG
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write '" + path.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw std::runtime_error("PNG encoding failed for '" + path.string() + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < img.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(img.rgb.data() + 3 * y * img.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
#else
  (void)img;
  throw std::runtime_error("PNG output not available in this build; cannot write '" + path.string() + "'");
#endif
}

inline void write_image(const RasterGrid& grid, const ColorRamp& ramp, const LayoutPlan& plan,
                        const std::filesystem::path& path, ImageFormat format = ImageFormat::ppm,
                        bool separators = true) {
  const Image img = compose_image(grid, ramp, plan, separators);
  if (format == ImageFormat::png) {
    write_png(img, path);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_ppm(img, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace structmatrix
