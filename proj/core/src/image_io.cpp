#include "ort/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace ort {

namespace {

bool has_suffix(const std::string& s, const std::string& suf) {
  if (s.size() < suf.size()) return false;
  std::string tail = s.substr(s.size() - suf.size());
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return tail == suf;
}

// Skips PGM whitespace and '#' comment lines.
int pgm_token(std::istream& in) {
  int c = in.get();
  for (;;) {
    while (c == ' ' || c == '\t' || c == '\r' || c == '\n') c = in.get();
    if (c == '#') {
      while (c != '\n' && c != EOF) c = in.get();
      continue;
    }
    break;
  }
  int value = 0;
  bool any = false;
  while (c >= '0' && c <= '9') {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw io_error("PGM parse: expected integer in header");
  return value;
}

LatticeField read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P') throw io_error(path + ": not a PGM file");
  if (m1 == '2') throw io_error(path + ": ASCII PGM (P2) is not supported, use binary P5");
  if (m1 != '5') throw io_error(path + ": unsupported PNM variant P" + std::string(1, m1));
  const int width = pgm_token(in);
  const int height = pgm_token(in);
  const int maxval = pgm_token(in);
  if (width <= 0 || height <= 0) throw io_error(path + ": bad PGM dimensions");
  if (maxval <= 0 || maxval > 65535) throw io_error(path + ": bad PGM maxval");
  // pgm_token consumed exactly one whitespace byte after maxval.

  const bool wide = maxval > 255;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> raw(n * (wide ? 2 : 1));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw io_error(path + ": truncated PGM payload");
  }
  std::vector<double> values(n);
  const double scale = 1.0 / maxval;
  if (wide) {
    for (std::size_t i = 0; i < n; ++i) {
      // PGM 16-bit samples are big-endian.
      const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      values[i] = v * scale;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) values[i] = raw[i] * scale;
  }
  return LatticeField({height, width}, std::move(values));
}

void write_pgm(const LatticeField& field, const std::string& path, int depth) {
  const int height = field.dims()[0];
  const int width = field.dims()[1];
  const int maxval = depth == 8 ? 255 : 65535;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "P5\n" << width << ' ' << height << "\n" << maxval << "\n";
  const auto v = field.values();
  if (depth == 8) {
    std::vector<unsigned char> raw(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      raw[i] = static_cast<unsigned char>(std::lround(std::clamp(v[i], 0.0, 1.0) * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    std::vector<unsigned char> raw(v.size() * 2);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const unsigned q = static_cast<unsigned>(std::lround(std::clamp(v[i], 0.0, 1.0) * 65535.0));
      raw[2 * i] = static_cast<unsigned char>(q >> 8);
      raw[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }
  if (!out) throw io_error("write failed for " + path);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

LatticeField read_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw io_error("cannot open " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8)) {
    throw io_error(path + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw io_error(path + ": PNG decode error");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw io_error(path + ": only grayscale PNG is supported (color input rejected)");
  }
  if (bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
    bit_depth = 8;
  }
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> data(rowbytes * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = data.data() + r * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<double> values(static_cast<std::size_t>(width) * height);
  if (bit_depth == 16) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const unsigned v = (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1];
      values[i] = v / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = data[i] / 255.0;
  }
  return LatticeField({static_cast<int>(height), static_cast<int>(width)}, std::move(values));
}

void write_png(const LatticeField& field, const std::string& path, int depth) {
  const int height = field.dims()[0];
  const int width = field.dims()[1];
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw io_error("cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw io_error(path + ": PNG encode error");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const auto v = field.values();
  if (depth == 8) {
    std::vector<unsigned char> row(static_cast<std::size_t>(width));
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        row[static_cast<std::size_t>(c)] = static_cast<unsigned char>(
            std::lround(std::clamp(v[static_cast<std::size_t>(r) * width + c], 0.0, 1.0) * 255.0));
      }
      png_write_row(png, row.data());
    }
  } else {
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * 2);
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        const unsigned q = static_cast<unsigned>(
            std::lround(std::clamp(v[static_cast<std::size_t>(r) * width + c], 0.0, 1.0) * 65535.0));
        row[static_cast<std::size_t>(2 * c)] = static_cast<unsigned char>(q >> 8);
        row[static_cast<std::size_t>(2 * c + 1)] = static_cast<unsigned char>(q & 0xff);
      }
      png_write_row(png, row.data());
    }
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

LatticeField read_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw io_error("cannot open " + path);
  char magic[2] = {0, 0};
  probe.read(magic, 2);
  probe.close();
  if (magic[0] == 'P') return read_pgm(path);
  if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') return read_png(path);
  throw io_error(path + ": unsupported image format (expect binary PGM or grayscale PNG)");
}

void write_image(const LatticeField& field, const std::string& path, int depth) {
  if (field.dim() != 2) throw std::invalid_argument("write_image: field must be 2-D");
  if (depth != 8 && depth != 16) throw std::invalid_argument("write_image: depth must be 8 or 16");
  if (has_suffix(path, ".png")) {
    write_png(field, path, depth);
  } else {
    write_pgm(field, path, depth);
  }
}

}  // namespace ort
