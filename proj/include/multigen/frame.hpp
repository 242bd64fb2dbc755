#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "multigen/error.hpp"
#include "multigen/hash.hpp"
#include "multigen/map_io.hpp"

namespace multigen {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Row-major 8-bit RGB image.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, Rgb fill = {}) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw Error("frame dimensions must be positive");
    pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      pixels_[i] = fill.r;
      pixels_[i + 1] = fill.g;
      pixels_[i + 2] = fill.b;
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& pixels() const { return pixels_; }

  Rgb at(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }

  void set(int x, int y, Rgb c) {
    const std::size_t i = offset(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  /// No-op outside the image.
  void plot(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < width_ && y < height_) set(x, y, c);
  }

  std::size_t count(Rgb c) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      if (pixels_[i] == c.r && pixels_[i + 1] == c.g && pixels_[i + 2] == c.b) ++n;
    }
    return n;
  }

  bool operator==(const Frame&) const = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Binary PPM (P6, maxval 255).
inline std::string encode_ppm(const Frame& frame) {
  std::string out = "P6\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(frame.pixels().data()), frame.pixels().size());
  return out;
}

inline Frame decode_ppm(std::string_view data) {
  std::size_t pos = 0;
  auto token = [&]() -> std::string {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return std::string(data.substr(start, pos - start));
  };
  if (token() != "P6") throw ParseError("ppm: bad magic");
  int w = 0;
  int h = 0;
  int maxval = 0;
  try {
    w = std::stoi(token());
    h = std::stoi(token());
    maxval = std::stoi(token());
  } catch (const std::exception&) {
    throw ParseError("ppm: bad header");
  }
  if (maxval != 255 || w <= 0 || h <= 0) throw ParseError("ppm: unsupported header");
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (data.size() < pos + need) throw ParseError("ppm: truncated pixel data");
  Frame f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = pos + (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) * 3;
      f.set(x, y, {static_cast<std::uint8_t>(data[i]), static_cast<std::uint8_t>(data[i + 1]),
                   static_cast<std::uint8_t>(data[i + 2])});
    }
  }
  return f;
}

inline void write_ppm(const std::string& path, const Frame& frame) { write_text_file(path, encode_ppm(frame)); }

inline Frame read_ppm(const std::string& path) { return decode_ppm(read_text_file(path)); }

// Shared colours. The player palette is fully saturated; walls are grey and
// ceiling/floor are muted, so no scene colour ever equals a player colour.
inline constexpr Rgb kCeilingColor{48, 48, 72};
inline constexpr Rgb kFloorColor{88, 72, 56};
inline constexpr Rgb kMinimapBackground{24, 24, 24};
inline constexpr Rgb kMinimapWall{220, 220, 220};

inline constexpr Rgb kPlayerPalette[] = {
    {255, 0, 0}, {0, 255, 0}, {0, 0, 255}, {255, 255, 0}, {255, 0, 255}, {0, 255, 255}, {255, 128, 0}, {128, 0, 255},
};
inline constexpr std::size_t kPaletteSize = sizeof(kPlayerPalette) / sizeof(kPlayerPalette[0]);

/// Palette slot of a player id: "pN" maps to slot N-1 (mod palette size),
/// any other id to its FNV-1a hash.
inline std::size_t palette_index(std::string_view id) {
  if (id.size() >= 2 && id[0] == 'p' && id.find_first_not_of("0123456789", 1) == std::string_view::npos &&
      id.size() <= 10) {
    const unsigned long n = std::stoul(std::string(id.substr(1)));
    if (n >= 1) return (n - 1) % kPaletteSize;
  }
  Fnv1a64 h;
  h.bytes(id);
  return h.digest() % kPaletteSize;
}

inline Rgb player_color(std::string_view id) { return kPlayerPalette[palette_index(id)]; }

}  // namespace multigen
