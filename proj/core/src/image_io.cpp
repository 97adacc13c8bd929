#include "egoview/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <png.h>

namespace egoview::io {

std::uint8_t to_byte(double value) {
  const double clamped = std::clamp(std::isfinite(value) ? value : 0.0, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(clamped * 255.0));
}

RgbImage quantize(const RgbImage& image) {
  RgbImage out = image;
  for (double& v : out.values()) v = from_byte(to_byte(v));
  return out;
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// --- PNG ---------------------------------------------------------------------

namespace {

struct PngReadState {
  const std::string* bytes = nullptr;
  std::size_t position = 0;
  char message[256] = {};
  std::jmp_buf jump;
};

void png_read_from_buffer(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->position + length > state->bytes->size()) {
    png_error(png, "unexpected end of file");
  }
  std::memcpy(out, state->bytes->data() + state->position, length);
  state->position += length;
}

void png_error_to_state(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", message);
  std::longjmp(state->jump, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

// Decodes to 8-bit with `channels` = 1 (gray) or 3 (rgb). Returns false and
// fills `state.message` on failure.
bool decode_png(PngReadState& state, int channels, int& width, int& height,
                std::vector<std::uint8_t>& pixels, std::vector<png_bytep>& rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_to_state,
                                           png_ignore_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(state.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &state, png_read_from_buffer);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  if (w == 0 || h == 0 || w > (1u << 15) || h > (1u << 15)) png_error(png, "unsupported image size");

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  const bool gray = (color_type & PNG_COLOR_MASK_COLOR) == 0;
  if (channels == 3 && gray) png_set_gray_to_rgb(png);
  if (channels == 1 && !gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);
  if (png_get_channels(png, info) != channels) png_error(png, "unexpected channel layout");

  width = static_cast<int>(w);
  height = static_cast<int>(h);
  pixels.resize(std::size_t{w} * h * static_cast<std::size_t>(channels));
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = pixels.data() + std::size_t{y} * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

std::vector<std::uint8_t> read_png_pixels(const fs::path& path, int channels, int& width,
                                          int& height) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw ParseError(path.string(), 0, "not a PNG file");
  }
  PngReadState state;
  state.bytes = &bytes;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  if (!decode_png(state, channels, width, height, pixels, rows)) {
    throw ParseError(path.string(), state.position,
                     state.message[0] ? state.message : "PNG decode failed");
  }
  return pixels;
}

struct PngWriteState {
  std::string buffer;
  char message[256] = {};
  std::jmp_buf jump;
};

void png_write_to_buffer(png_structp png, png_bytep data, png_size_t length) {
  auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
  state->buffer.append(reinterpret_cast<const char*>(data), length);
}

void png_flush_noop(png_structp) {}

void png_write_error(png_structp png, png_const_charp message) {
  auto* state = static_cast<PngWriteState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", message);
  std::longjmp(state->jump, 1);
}

bool encode_png(PngWriteState& state, int width, int height, int channels,
                std::vector<png_bytep>& rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_write_error,
                                            png_ignore_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(state.jump)) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &state, png_write_to_buffer, png_flush_noop);
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE | PNG_FILTER_SUB | PNG_FILTER_UP |
                                                PNG_FILTER_AVG | PNG_FILTER_PAETH);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_BASE, PNG_FILTER_TYPE_BASE);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png_pixels(const fs::path& path, int width, int height, int channels,
                      std::vector<std::uint8_t>& pixels) {
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        pixels.data() + static_cast<std::size_t>(y) * width * channels;
  }
  PngWriteState state;
  if (!encode_png(state, width, height, channels, rows)) {
    fail(ErrorCode::IoError, "PNG encode failed for '" + path.string() + "': " + state.message);
  }
  write_file(path, state.buffer);
}

}  // namespace

void save_png(const fs::path& path, const RgbImage& image) {
  require(!image.empty(), "save_png: empty image");
  std::vector<std::uint8_t> pixels(image.values().size());
  std::transform(image.values().begin(), image.values().end(), pixels.begin(), to_byte);
  write_png_pixels(path, image.width(), image.height(), 3, pixels);
}

RgbImage load_png(const fs::path& path) {
  int width = 0;
  int height = 0;
  const auto pixels = read_png_pixels(path, 3, width, height);
  RgbImage image(width, height);
  std::transform(pixels.begin(), pixels.end(), image.values().begin(), from_byte);
  return image;
}

void save_mask_png(const fs::path& path, const Mask& mask) {
  require(!mask.empty(), "save_mask_png: empty mask");
  std::vector<std::uint8_t> pixels(mask.size());
  std::transform(mask.values().begin(), mask.values().end(), pixels.begin(),
                 [](std::uint8_t v) { return std::uint8_t(v ? 255 : 0); });
  write_png_pixels(path, mask.width(), mask.height(), 1, pixels);
}

Mask load_mask_png(const fs::path& path) {
  int width = 0;
  int height = 0;
  const auto pixels = read_png_pixels(path, 1, width, height);
  Mask mask(width, height, 0);
  std::transform(pixels.begin(), pixels.end(), mask.values().begin(),
                 [](std::uint8_t v) { return std::uint8_t(v >= 128 ? 1 : 0); });
  return mask;
}

// --- PFM ---------------------------------------------------------------------

namespace {

// Reads one whitespace-delimited header token starting at `pos`.
std::string header_token(const std::string& bytes, std::size_t& pos, const fs::path& path) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos) throw ParseError(path.string(), start, "truncated PFM header");
  return bytes.substr(start, pos - start);
}

long parse_long(const std::string& token, std::size_t offset, const fs::path& path) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) throw ParseError(path.string(), offset, "expected an integer, got '" + token + "'");
  return value;
}

}  // namespace

void save_pfm(const fs::path& path, const DepthMap& depth) {
  require(!depth.empty(), "save_pfm: empty depth map");
  std::ostringstream out;
  out << "Pf\n" << depth.width() << ' ' << depth.height() << "\n-1.0\n";
  std::string header = out.str();
  std::string bytes = header;
  bytes.resize(header.size() + depth.size() * sizeof(float));
  char* dst = bytes.data() + header.size();
  for (int y = depth.height() - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double d = depth.at(x, y);
      const float value = is_valid_depth(d) ? static_cast<float>(d) : 0.0f;
      std::uint32_t word = std::bit_cast<std::uint32_t>(value);
      if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap32(word);
      std::memcpy(dst, &word, sizeof word);
      dst += sizeof word;
    }
  }
  write_file(path, bytes);
}

DepthMap load_pfm(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  const std::string magic = header_token(bytes, pos, path);
  if (magic != "Pf") {
    throw ParseError(path.string(), 0,
                     magic == "PF" ? "3-channel PFM is not a depth map" : "not a PFM file");
  }
  std::size_t offset = pos;
  const long width = parse_long(header_token(bytes, pos, path), offset, path);
  offset = pos;
  const long height = parse_long(header_token(bytes, pos, path), offset, path);
  if (width < 1 || height < 1 || width > (1L << 15) || height > (1L << 15)) {
    throw ParseError(path.string(), offset, "invalid PFM dimensions");
  }
  offset = pos;
  const std::string scale_token = header_token(bytes, pos, path);
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_token, &used);
    if (used != scale_token.size()) scale = 0.0;
  } catch (const std::exception&) {
    scale = 0.0;
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw ParseError(path.string(), offset, "invalid PFM scale");
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw ParseError(path.string(), pos, "missing header terminator");
  }
  ++pos;

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < count * sizeof(float)) {
    throw ParseError(path.string(), bytes.size(), "truncated PFM raster");
  }
  const bool little = scale < 0.0;
  const double magnitude = std::abs(scale);
  DepthMap depth(static_cast<int>(width), static_cast<int>(height), 0.0);
  const char* src = bytes.data() + pos;
  for (int y = depth.height() - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width(); ++x) {
      std::uint32_t word = 0;
      std::memcpy(&word, src, sizeof word);
      src += sizeof word;
      const bool swap = little != (std::endian::native == std::endian::little);
      if (swap) word = __builtin_bswap32(word);
      const double value = std::bit_cast<float>(word);
      depth.at(x, y) = magnitude == 1.0 ? value : value * magnitude;
    }
  }
  return depth;
}

// --- sparse map triple -----------------------------------------------------

SparseMapPaths sparse_map_paths(const fs::path& prefix) {
  const std::string base = prefix.string();
  return {base + "_rgb.png", base + "_mask.png", base + "_depth.pfm"};
}

void save_sparse_map(const fs::path& prefix, const SparseEgoMap& map) {
  const auto paths = sparse_map_paths(prefix);
  save_png(paths.rgb, map.rgb);
  save_mask_png(paths.mask, map.validity);
  save_pfm(paths.depth, map.depth_buffer);
}

SparseEgoMap load_sparse_map(const fs::path& prefix) {
  const auto paths = sparse_map_paths(prefix);
  SparseEgoMap map{load_png(paths.rgb), load_mask_png(paths.mask), load_pfm(paths.depth)};
  if (!map.validity.same_shape(map.rgb.width(), map.rgb.height()) ||
      !map.depth_buffer.same_shape(map.validity)) {
    throw ValidationError("validity", "sparse map files differ in size");
  }
  for (int y = 0; y < map.validity.height(); ++y) {
    for (int x = 0; x < map.validity.width(); ++x) {
      if ((map.validity.at(x, y) != 0) != is_valid_depth(map.depth_buffer.at(x, y))) {
        throw ValidationError("validity", "mask disagrees with depth buffer at (" +
                                              std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
  }
  return map;
}

}  // namespace egoview::io
