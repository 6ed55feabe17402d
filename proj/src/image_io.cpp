#include "ctxsal/io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ctxsal {
namespace {

bool has_extension(const fs::path& path, const char* ext) {
  auto e = path.extension().string();
  for (auto& ch : e) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return e == ext;
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::MissingFile, path.string());
  }
}

struct PngReader {
  png_image image{};

  explicit PngReader(const fs::path& path) {
    require_file(path);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
      throw Error(ErrorCode::Io, path.string() + ": " + image.message);
    }
  }
  ~PngReader() { png_image_free(&image); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  std::vector<std::uint8_t> finish(png_uint_32 format, const fs::path& path) {
    image.format = format;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
      throw Error(ErrorCode::Io, path.string() + ": " + image.message);
    }
    return buffer;
  }
};

void write_png(const fs::path& path, int width, int height, png_uint_32 format, const std::uint8_t* data) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::Io, path.string() + ": " + msg);
  }
}

std::uint8_t quantize(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

// Netpbm token reader: skips whitespace and '#' comments.
int read_pnm_int(std::istream& in) {
  int ch;
  while ((ch = in.peek()) != EOF) {
    if (std::isspace(ch)) {
      in.get();
    } else if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int value = -1;
  if (!(in >> value)) throw Error(ErrorCode::Io, "malformed PPM header");
  return value;
}

ImageBuffer read_ppm(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P6" && magic != "P3") {
    throw Error(ErrorCode::Io, path.string() + ": unsupported PPM variant");
  }
  const int width = read_pnm_int(in);
  const int height = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorCode::Io, path.string() + ": bad PPM dimensions");
  }
  ImageBuffer image(width, height, 3);
  const auto count = std::int64_t{width} * height * 3;
  auto* out = image.data().data();
  if (magic == "P3") {
    for (std::int64_t i = 0; i < count; ++i) out[i] = static_cast<float>(read_pnm_int(in)) / static_cast<float>(maxval);
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(count * bytes));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw Error(ErrorCode::Io, path.string() + ": truncated PPM payload");
    for (std::int64_t i = 0; i < count; ++i) {
      const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
      out[i] = static_cast<float>(v) / static_cast<float>(maxval);
    }
  }
  return image;
}

}  // namespace

ImageBuffer read_image(const fs::path& path) {
  if (has_extension(path, ".ppm") || has_extension(path, ".pnm")) {
    return read_ppm(path);
  }
  PngReader reader(path);
  const int width = static_cast<int>(reader.image.width);
  const int height = static_cast<int>(reader.image.height);
  const auto buffer = reader.finish(PNG_FORMAT_RGB, path);
  ImageBuffer image(width, height, 3);
  auto* out = image.data().data();
  for (std::size_t i = 0; i < buffer.size(); ++i) out[i] = static_cast<float>(buffer[i]) / 255.0f;
  return image;
}

void write_image_png(const fs::path& path, const ImageBuffer& image) {
  if (image.channels() != 3 && image.channels() != 1) {
    throw Error(ErrorCode::InvalidArgument, "only 1- or 3-channel images can be written");
  }
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(image.data().size()));
  const auto* in = image.data().data();
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = quantize(in[i]);
  write_png(path, image.width(), image.height(), image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY,
            bytes.data());
}

GrayImage read_gray_png(const fs::path& path) {
  PngReader reader(path);
  GrayImage out;
  out.width = static_cast<int>(reader.image.width);
  out.height = static_cast<int>(reader.image.height);
  out.pixels = reader.finish(PNG_FORMAT_GRAY, path);
  return out;
}

void write_gray_png(const fs::path& path, const GrayImage& image) {
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw Error(ErrorCode::DimensionMismatch, "gray raster size mismatch");
  }
  write_png(path, image.width, image.height, PNG_FORMAT_GRAY, image.pixels.data());
}

BinaryMask read_mask_png(const fs::path& path) {
  const auto gray = read_gray_png(path);
  BinaryMask mask(gray.width, gray.height);
  bool* bits = mask.data();
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) bits[i] = gray.pixels[i] >= 128;
  return mask;
}

void write_mask_png(const fs::path& path, const BinaryMask& mask) {
  GrayImage gray{mask.width(), mask.height(), {}};
  gray.pixels.resize(static_cast<std::size_t>(mask.pixel_count()));
  const bool* bits = mask.data();
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) gray.pixels[i] = bits[i] ? 255 : 0;
  write_gray_png(path, gray);
}

std::pair<int, int> read_image_size(const fs::path& path) {
  if (has_extension(path, ".ppm") || has_extension(path, ".pnm")) {
    require_file(path);
    std::ifstream in(path, std::ios::binary);
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    const int width = read_pnm_int(in);
    const int height = read_pnm_int(in);
    return {width, height};
  }
  PngReader reader(path);
  return {static_cast<int>(reader.image.width), static_cast<int>(reader.image.height)};
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace ctxsal
