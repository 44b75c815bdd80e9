// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "phyfea/rng.hpp"

namespace phyfea {
namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spill(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to '" + path + "'");
}

bool ends_with_png(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png";
}

// ---- PGM -------------------------------------------------------------------

struct PgmCursor {
  std::string_view bytes;
  std::size_t pos = 0;

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  std::size_t number(const char* what, const std::string& path) {
    skip_space_and_comments();
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (v > (1u << 30)) break;
      ++pos;
    }
    if (pos == start) {
      throw FormatError(path + ": expected " + what + " at byte " + std::to_string(start));
    }
    return v;
  }
};

LabelMap decode_pgm(const std::string& path, std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError(path + ": not a PGM file (byte 0)");
  if (bytes[1] != '5') {
    const char kind = bytes[1];
    const std::string why = kind == '6' || kind == '3' ? "colour image, expected single-channel"
                                                       : "only binary P5 graymaps are supported";
    throw FormatError(path + ": P" + std::string(1, kind) + " " + why);
  }
  PgmCursor cur{bytes, 2};
  const std::size_t cols = cur.number("width", path);
  const std::size_t rows = cur.number("height", path);
  const std::size_t maxval = cur.number("maxval", path);
  if (rows == 0 || cols == 0) throw FormatError(path + ": zero image extent");
  if (maxval > 255) throw FormatError(path + ": 16-bit graymap (maxval " + std::to_string(maxval) + ")");
  if (maxval == 0) throw FormatError(path + ": maxval 0");
  if (cur.pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[cur.pos]))) {
    throw FormatError(path + ": missing separator before pixel data at byte " +
                      std::to_string(cur.pos));
  }
  const std::size_t offset = cur.pos + 1;
  const std::size_t need = rows * cols;
  if (bytes.size() - offset < need) {
    throw FormatError(path + ": pixel data truncated at byte " + std::to_string(bytes.size()) +
                      ", needs " + std::to_string(need) + " bytes from offset " +
                      std::to_string(offset));
  }
  LabelMap map(rows, cols, 0);
  for (std::size_t i = 0; i < need; ++i) {
    map.labels[i] = static_cast<unsigned char>(bytes[offset + i]);
  }
  return map;
}

std::string encode_pgm(const LabelMap& map) {
  std::ostringstream out;
  out << "P5\n" << map.cols << ' ' << map.rows << "\n255\n";
  std::string s = out.str();
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto v = map.labels[i];
    if (v < 0 || v > 255) throw FormatError("label " + std::to_string(v) + " does not fit 8 bits");
    s.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  return s;
}

// ---- PNG -------------------------------------------------------------------

constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

struct PngMemory {
  const unsigned char* data;
  std::size_t size;
  std::size_t pos;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* mem = static_cast<PngMemory*>(png_get_io_ptr(png));
  if (mem->pos + n > mem->size) png_error(png, "unexpected end of file");
  std::memcpy(out, mem->data + mem->pos, n);
  mem->pos += n;
}

void png_on_error(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(buf, 256, "%s", msg);
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

// C-style on purpose: libpng reports errors with longjmp, so nothing with a
// destructor may be created between setjmp and the end of the read.
bool decode_png_gray8(const unsigned char* data, std::size_t size, std::uint32_t* width,
                      std::uint32_t* height, int* depth, int* color, std::vector<unsigned char>* pixels,
                      char* error) {
  PngMemory mem{data, size, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, error, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &mem, png_read_memory);
  png_read_info(png, info);
  *width = png_get_image_width(png, info);
  *height = png_get_image_height(png, info);
  *depth = png_get_bit_depth(png, info);
  *color = png_get_color_type(png, info);
  if (*depth != 8 || *color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    return true;  // caller reports the format
  }
  const int passes = png_set_interlace_handling(png);
  png_read_update_info(png, info);
  for (int pass = 0; pass < passes; ++pass) {
    for (std::uint32_t r = 0; r < *height; ++r) {
      png_read_row(png, pixels->data() + static_cast<std::size_t>(r) * *width, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

LabelMap decode_png(const std::string& path, std::string_view bytes) {
  // IHDR is always first: width@16, height@20, depth@24, colour type@25.
  if (bytes.size() < 33) throw FormatError(path + ": PNG header truncated");
  auto be32 = [&](std::size_t at) {
    return (std::uint32_t(static_cast<unsigned char>(bytes[at])) << 24) |
           (std::uint32_t(static_cast<unsigned char>(bytes[at + 1])) << 16) |
           (std::uint32_t(static_cast<unsigned char>(bytes[at + 2])) << 8) |
           std::uint32_t(static_cast<unsigned char>(bytes[at + 3]));
  };
  const std::uint32_t w = be32(16), h = be32(20);
  const int depth = static_cast<unsigned char>(bytes[24]);
  const int color = static_cast<unsigned char>(bytes[25]);
  if (color != PNG_COLOR_TYPE_GRAY) {
    const char* what = color == PNG_COLOR_TYPE_PALETTE ? "palette image"
                       : color == PNG_COLOR_TYPE_GRAY_ALPHA ? "gray+alpha image"
                                                            : "colour image";
    throw FormatError(path + ": " + what + " (colour type " + std::to_string(color) +
                      " at byte 25), expected 8-bit single-channel");
  }
  if (depth != 8) {
    throw FormatError(path + ": " + std::to_string(depth) +
                      "-bit grayscale (byte 24), expected 8-bit");
  }
  if (w == 0 || h == 0 || static_cast<std::uint64_t>(w) * h > (1ull << 31)) {
    throw FormatError(path + ": unsupported extent " + std::to_string(w) + "x" + std::to_string(h));
  }
  std::vector<unsigned char> pixels(static_cast<std::size_t>(w) * h);
  std::uint32_t rw = 0, rh = 0;
  int rd = 0, rc = 0;
  char error[256] = "libpng failure";
  if (!decode_png_gray8(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), &rw,
                        &rh, &rd, &rc, &pixels, error)) {
    throw FormatError(path + ": " + error);
  }
  LabelMap map(h, w, 0);
  for (std::size_t i = 0; i < pixels.size(); ++i) map.labels[i] = pixels[i];
  return map;
}

void encode_png(const std::string& path, std::uint32_t width, std::uint32_t height, bool rgb,
                const std::vector<unsigned char>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    throw FormatError("cannot write '" + path + "': " + image.message);
  }
}

// ---- SFT1 --------------------------------------------------------------------

std::uint32_t read_le32(std::string_view bytes, std::size_t at) {
  return std::uint32_t(static_cast<unsigned char>(bytes[at])) |
         (std::uint32_t(static_cast<unsigned char>(bytes[at + 1])) << 8) |
         (std::uint32_t(static_cast<unsigned char>(bytes[at + 2])) << 16) |
         (std::uint32_t(static_cast<unsigned char>(bytes[at + 3])) << 24);
}

void append_le32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

}  // namespace

LabelMap read_label_map(const std::string& path, std::size_t num_classes,
                        std::int32_t ignore_value) {
  const std::string bytes = slurp(path);
  LabelMap map;
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) {
    map = decode_png(path, bytes);
  } else {
    map = decode_pgm(path, bytes);
  }
  map.num_classes = num_classes;
  map.ignore_value = ignore_value;
  try {
    validate_labels(map);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return map;
}

void write_label_map(const std::string& path, const LabelMap& map) {
  if (!ends_with_png(path)) {
    spill(path, encode_pgm(map));
    return;
  }
  std::vector<unsigned char> px(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto v = map.labels[i];
    if (v < 0 || v > 255) throw FormatError("label " + std::to_string(v) + " does not fit 8 bits");
    px[i] = static_cast<unsigned char>(v);
  }
  encode_png(path, static_cast<std::uint32_t>(map.cols), static_cast<std::uint32_t>(map.rows),
             false, px);
}

Tensor<float> decode_tensor(std::string_view bytes) {
  if (bytes.size() < 4) {
    throw FormatError("SFT1: file is " + std::to_string(bytes.size()) +
                      " bytes, magic needs 4 at byte 0");
  }
  if (bytes.substr(0, 4) != "SFT1") {
    throw FormatError("SFT1: bad magic '" + std::string(bytes.substr(0, 4)) + "' at byte 0");
  }
  if (bytes.size() < 8) throw FormatError("SFT1: header truncated at byte " + std::to_string(bytes.size()) + ", rank needs bytes 4..7");
  const std::uint32_t rank = read_le32(bytes, 4);
  if (rank != 2 && rank != 3) {
    throw FormatError("SFT1: rank " + std::to_string(rank) + " at byte 4, expected 2 or 3");
  }
  const std::size_t header = 8 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < header) {
    throw FormatError("SFT1: dims truncated at byte " + std::to_string(bytes.size()) +
                      ", header needs " + std::to_string(header) + " bytes");
  }
  Dims dims;
  std::uint64_t count = 1;
  for (std::uint32_t k = 0; k < rank; ++k) {
    const std::uint32_t d = read_le32(bytes, 8 + 4 * k);
    if (d == 0) throw FormatError("SFT1: zero extent at byte " + std::to_string(8 + 4 * k));
    count *= d;
    if (count > (1ull << 34)) throw FormatError("SFT1: declared size too large");
    dims.push_back(d);
  }
  const std::uint64_t need = 4 * count;
  const std::uint64_t have = bytes.size() - header;
  if (have < need) {
    throw FormatError("SFT1: payload truncated: dims " + format_dims(dims) + " need " +
                      std::to_string(need) + " bytes from offset " + std::to_string(header) +
                      ", found " + std::to_string(have));
  }
  if (have > need) {
    throw FormatError("SFT1: " + std::to_string(have - need) + " trailing bytes after offset " +
                      std::to_string(header + need));
  }
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    data[i] = std::bit_cast<float>(read_le32(bytes, header + 4 * i));
  }
  return Tensor<float>(std::move(dims), std::move(data));
}

std::string encode_tensor(const Tensor<float>& t) {
  if (t.rank() != 2 && t.rank() != 3) {
    throw DimensionError("SFT1 stores rank 2 or 3, got " + format_dims(t.dims()));
  }
  std::string out = "SFT1";
  out.reserve(8 + 4 * t.rank() + 4 * t.size());
  append_le32(out, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.dims()) append_le32(out, static_cast<std::uint32_t>(d));
  for (float v : t.data()) append_le32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor<float> read_tensor(const std::string& path) {
  try {
    return decode_tensor(slurp(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_tensor(const std::string& path, const Tensor<float>& t) { spill(path, encode_tensor(t)); }

std::string_view fixture_name(FixtureKind k) {
  switch (k) {
    case FixtureKind::enclosure: return "enclosure";
    case FixtureKind::broken_bar: return "broken_bar";
    case FixtureKind::clean: return "clean";
    case FixtureKind::ring: return "ring";
    case FixtureKind::random_binary: return "random_binary";
  }
  return "enclosure";
}

FixtureKind parse_fixture(std::string_view s) {
  for (auto k : {FixtureKind::enclosure, FixtureKind::broken_bar, FixtureKind::clean,
                 FixtureKind::ring, FixtureKind::random_binary}) {
    if (fixture_name(k) == s) return k;
  }
  throw ConfigError("unknown fixture kind '" + std::string(s) + "'");
}

Tensor<float> scores_for_labels(const LabelMap& map, std::int32_t planted, double p_fg,
                                double p_context) {
  const std::size_t classes = map.num_classes;
  if (classes < 2) throw ConfigError("scores need at least 2 classes");
  for (double p : {p_fg, p_context}) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("fixture probabilities must lie in (0, 1)");
  }
  Tensor<float> scores(Dims{classes, map.rows, map.cols});
  const std::size_t plane = map.size();
  for (std::size_t i = 0; i < plane; ++i) {
    const auto label = map.labels[i];
    if (map.ignored(i)) {
      for (std::size_t c = 0; c < classes; ++c) {
        scores[c * plane + i] = static_cast<float>(std::log(1.0 / static_cast<double>(classes)));
      }
      continue;
    }
    const double p = label == planted ? p_fg : p_context;
    const double rest = (1.0 - p) / static_cast<double>(classes - 1);
    for (std::size_t c = 0; c < classes; ++c) {
      scores[c * plane + i] =
          static_cast<float>(std::log(static_cast<std::int32_t>(c) == label ? p : rest));
    }
  }
  return scores;
}

Fixture gen_fixture(const FixtureSpec& spec) {
  const std::size_t rows = spec.rows, cols = spec.cols;
  if (rows == 0 || cols == 0) throw ConfigError("fixture extent must be positive");
  for (auto cls : {spec.background, spec.inner, spec.outer}) {
    if (cls < 0 || static_cast<std::size_t>(cls) >= spec.num_classes) {
      throw ConfigError("fixture class " + std::to_string(cls) + " outside [0, " +
                        std::to_string(spec.num_classes) + ")");
    }
  }
  LabelMap map(rows, cols, spec.num_classes, spec.background);
  std::int32_t planted = spec.inner;

  switch (spec.kind) {
    case FixtureKind::enclosure: {
      if (rows < 5 || cols < 5) throw ConfigError("enclosure fixture needs at least 5x5");
      if (spec.inner == spec.outer) throw ConfigError("enclosure needs distinct inner and outer");
      const std::size_t c0 = (cols - 3) / 2;
      const std::size_t r0 = spec.at_border ? 0 : (rows - 3) / 2;
      const std::size_t ring_r0 = r0 == 0 ? 0 : r0 - 1;
      for (std::size_t r = ring_r0; r <= r0 + 3; ++r) {
        for (std::size_t c = c0 - 1; c <= c0 + 3; ++c) map.at(r, c) = spec.outer;
      }
      for (std::size_t r = r0; r < r0 + 3; ++r) {
        for (std::size_t c = c0; c < c0 + 3; ++c) map.at(r, c) = spec.inner;
      }
      break;
    }
    case FixtureKind::broken_bar: {
      const std::size_t total = 2 * spec.bar_length + spec.gap;
      if (spec.bar_length == 0 || total + 2 > cols || rows < 3) {
        throw ConfigError("broken_bar: " + std::to_string(total) + " cells plus margins do not fit " +
                          std::to_string(cols) + " columns");
      }
      const std::size_t row = rows / 2, start = (cols - total) / 2;
      for (std::size_t k = 0; k < spec.bar_length; ++k) {
        map.at(row, start + k) = spec.inner;
        map.at(row, start + spec.bar_length + spec.gap + k) = spec.inner;
      }
      break;
    }
    case FixtureKind::clean: {
      for (std::size_t r = rows / 2; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) map.at(r, c) = spec.outer;
      }
      break;
    }
    case FixtureKind::ring: {
      if (rows < 5 || cols < 5) throw ConfigError("ring fixture needs at least 5x5");
      for (std::size_t r = 1; r + 1 < rows; ++r) {
        for (std::size_t c = 1; c + 1 < cols; ++c) {
          if (r == 1 || c == 1 || r + 2 == rows || c + 2 == cols) map.at(r, c) = spec.outer;
        }
      }
      planted = spec.background;
      break;
    }
    case FixtureKind::random_binary: {
      if (!(spec.density >= 0.0 && spec.density <= 1.0)) {
        throw ConfigError("density must lie in [0, 1]");
      }
      Rng rng(spec.seed);
      for (auto& v : map.labels) v = rng.uniform() < spec.density ? spec.inner : spec.background;
      break;
    }
  }

  Fixture fx{std::move(map), std::nullopt};
  if (spec.with_scores) fx.scores = scores_for_labels(fx.labels, planted, spec.p_fg, spec.p_context);
  return fx;
}

void write_overlay(const std::string& path, const LabelMap& map,
                   const std::vector<std::uint8_t>& mask) {
  if (!mask.empty() && mask.size() != map.size()) {
    throw DimensionError("overlay mask length does not match the label map");
  }
  std::int32_t top = 1;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.ignored(i)) top = std::max(top, map.labels[i]);
  }
  std::vector<unsigned char> rgb(map.size() * 3);
  for (std::size_t i = 0; i < map.size(); ++i) {
    unsigned char r, g, b;
    if (!mask.empty() && mask[i]) {
      r = 255;
      g = b = 0;
    } else {
      const int level = map.ignored(i) ? 255 : 40 + 180 * std::max(map.labels[i], 0) / top;
      r = g = b = static_cast<unsigned char>(level);
    }
    rgb[3 * i] = r;
    rgb[3 * i + 1] = g;
    rgb[3 * i + 2] = b;
  }
  if (ends_with_png(path)) {
    encode_png(path, static_cast<std::uint32_t>(map.cols), static_cast<std::uint32_t>(map.rows),
               true, rgb);
    return;
  }
  std::string out = "P6\n" + std::to_string(map.cols) + " " + std::to_string(map.rows) + "\n255\n";
  out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
  spill(path, out);
}

std::vector<std::string> list_label_files(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ValidationError("'" + dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (ext == ".pgm" || ext == ".png") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace phyfea
