// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "bss/error.hpp"
#include "byte_order.hpp"

namespace bss {

float byte_to_unit(std::uint8_t v) { return static_cast<float>(v) / 255.0f; }

std::uint8_t unit_to_byte(float v) {
  const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

namespace {

ImageTensor from_interleaved(const std::vector<std::uint8_t>& bytes, int channels,
                             int height, int width) {
  ImageTensor img(channels, height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        img.at(c, y, x) =
            byte_to_unit(bytes[(static_cast<std::size_t>(y) * width + x) * channels + c]);
      }
    }
  }
  return img;
}

std::vector<std::uint8_t> to_interleaved(const ImageTensor& img, int out_channels) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(img.height()) * img.width() *
                                  out_channels);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < out_channels; ++c) {
        const int src_c = img.channels() == 1 ? 0 : c;
        bytes[(static_cast<std::size_t>(y) * img.width() + x) * out_channels + c] =
            unit_to_byte(img.at(src_c, y, x));
      }
    }
  }
  return bytes;
}

void require_writable_shape(const ImageTensor& img) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw ShapeError("image writers support 1 or 3 channels, got " +
                     std::to_string(img.channels()));
  }
  if (img.height() < 1 || img.width() < 1) {
    throw ShapeError("cannot write empty image");
  }
}

}  // namespace

ImageTensor read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw IoError("cannot read PNG " + path.string() + ": " + image.message);
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const int channels = gray ? 1 : 3;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return from_interleaved(buffer, channels, static_cast<int>(image.height),
                          static_cast<int>(image.width));
}

void write_png(const ImageTensor& img, const std::filesystem::path& path) {
  require_writable_shape(img);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const auto bytes = to_interleaved(img, img.channels());
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string ppm_token(std::istream& is) {
  std::string token;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

int ppm_int(std::istream& is, const std::filesystem::path& path, const char* field) {
  const std::string tok = ppm_token(is);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError("PPM " + path.string() + ": bad " + field + " '" + tok + "' at byte offset " +
                      std::to_string(static_cast<long long>(is.tellg())));
  }
}

}  // namespace

ImageTensor read_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open PPM " + path.string());
  if (ppm_token(is) != "P6") {
    throw FormatError("PPM " + path.string() + ": expected magic P6 at byte offset 0");
  }
  const int width = ppm_int(is, path, "width");
  const int height = ppm_int(is, path, "height");
  const int maxval = ppm_int(is, path, "maxval");
  if (maxval != 255) {
    throw FormatError("PPM " + path.string() + ": only maxval 255 is supported, got " +
                      std::to_string(maxval));
  }
  // ppm_token consumed exactly one whitespace byte after maxval.
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * height * 3);
  const auto start = is.tellg();
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(is.gcount()) != bytes.size()) {
    throw FormatError("PPM " + path.string() + ": truncated pixel data at byte offset " +
                      std::to_string(static_cast<long long>(start) + is.gcount()));
  }
  return from_interleaved(bytes, 3, height, width);
}

void write_ppm(const ImageTensor& img, const std::filesystem::path& path) {
  require_writable_shape(img);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  const auto bytes = to_interleaved(img, 3);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path.string());
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

ImageTensor read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  throw ArgumentError("unsupported image extension '" + ext + "'");
}

void write_image(const ImageTensor& img, const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return write_png(img, path);
  if (ext == ".ppm") return write_ppm(img, path);
  throw ArgumentError("unsupported image extension '" + ext + "'");
}

void write_raw_f32(const ImageTensor& img, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write("BSSD", 4);
  detail::put_u32_le(os, static_cast<std::uint32_t>(img.channels()));
  detail::put_u32_le(os, static_cast<std::uint32_t>(img.height()));
  detail::put_u32_le(os, static_cast<std::uint32_t>(img.width()));
  for (float v : img.data()) detail::put_f32_le(os, v);
  if (!os) throw IoError("write failed for " + path.string());
}

ImageTensor read_raw_f32(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  detail::ByteReader in(is, "raw dump " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "BSSD", 4) != 0) in.fail("bad magic", 0);
  const auto c = in.u32_le();
  const auto h = in.u32_le();
  const auto w = in.u32_le();
  if (c > 4096 || h > 65536 || w > 65536) in.fail("implausible shape", 4);
  ImageTensor img(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w));
  for (float& v : img.data()) v = in.f32_le();
  return img;
}

}  // namespace bss
