#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilray {

struct Color {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  constexpr Color operator+(const Color& o) const { return {r + o.r, g + o.g, b + o.b}; }
  constexpr Color operator*(double s) const { return {r * s, g * s, b * s}; }
  constexpr Color operator*(const Color& o) const { return {r * o.r, g * o.g, b * o.b}; }
  constexpr bool operator==(const Color&) const = default;
};

Color clamp01(const Color& c);

/// 8-bit RGB raster, row-major, top row first.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

  void set(int i, int j, const Color& c);
  Color get(int i, int j) const;
  bool operator==(const Image&) const = default;
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_ppm(const Image& img);
std::vector<std::uint8_t> encode_png(const Image& img);

/// Writes PPM (P6) or PNG depending on the extension (.png -> PNG, else PPM).
void write_image(const std::filesystem::path& path, const Image& img);

/// Reads PNG or JPEG, detected from the file signature.
Image read_image(const std::filesystem::path& path);
Image decode_png(const std::vector<std::uint8_t>& bytes);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// 64-bit FNV-1a over the raster, for cheap frame identity checks.
std::uint64_t image_hash(const Image& img);

}  // namespace nilray
