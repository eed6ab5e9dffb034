#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace geodiff {

// 8-bit grayscale image, row-major, origin top-left.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Binary portable graymap (P5), maxval 255.
void write_pgm(std::ostream& out, const GrayImage& image);
GrayImage read_pgm(std::istream& in);
void save_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage load_pgm(const std::filesystem::path& path);

}  // namespace geodiff
