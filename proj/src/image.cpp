// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "obbkit/image.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "obbkit/error.hpp"

namespace obbkit {

namespace {

constexpr char kObbrMagic[4] = {'O', 'B', 'B', 'R'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff),
                              static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw DataError("truncated OBBR stream");
  }
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string ppm_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  if (token.empty()) throw DataError("truncated PPM header");
  return token;
}

std::size_t ppm_number(std::istream& in) {
  const std::string t = ppm_token(in);
  if (t.empty() || !std::all_of(t.begin(), t.end(), ::isdigit) || t.size() > 9) {
    throw DataError("malformed PPM header field '" + t + "'");
  }
  return std::stoul(t);
}

}  // namespace

ImageRaster::ImageRaster(std::size_t width, std::size_t height,
                         std::size_t channels, double fill)
    : width_(width),
      height_(height),
      channels_(channels),
      samples_(width * height * channels, fill) {
  if (width == 0 || height == 0 || channels == 0) {
    throw InvalidSpecError("image dimensions must be positive");
  }
  if (!std::isfinite(fill)) throw InvalidSpecError("image fill is not finite");
}

ImageRaster::ImageRaster(std::size_t width, std::size_t height,
                         std::size_t channels, std::vector<double> samples)
    : width_(width),
      height_(height),
      channels_(channels),
      samples_(std::move(samples)) {
  if (width == 0 || height == 0 || channels == 0) {
    throw InvalidSpecError("image dimensions must be positive");
  }
  if (samples_.size() != width * height * channels) {
    throw InvalidSpecError("sample count does not match image dimensions");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw InvalidSpecError("image sample is not finite");
  }
}

void write_ppm(std::ostream& out, const ImageRaster& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw ChannelError("PPM output needs 1 or 3 channels");
  }
  out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::string row(image.width() * 3, '\0');
  for (std::size_t r = 0; r < image.height(); ++r) {
    for (std::size_t c = 0; c < image.width(); ++c) {
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double v =
            image.at(r, c, image.channels() == 1 ? 0 : ch);
        const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
        row[c * 3 + ch] = static_cast<char>(static_cast<unsigned char>(q));
      }
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw DataError("failed writing PPM");
}

ImageRaster read_ppm(std::istream& in) {
  if (ppm_token(in) != "P6") throw DataError("not a binary PPM (P6) stream");
  const std::size_t w = ppm_number(in);
  const std::size_t h = ppm_number(in);
  const std::size_t maxval = ppm_number(in);
  if (w == 0 || h == 0) throw DataError("PPM has zero size");
  if (maxval == 0 || maxval > 255) {
    throw DataError("unsupported PPM maxval " + std::to_string(maxval));
  }
  // ppm_token consumed exactly one whitespace byte after maxval.
  std::string bytes(w * h * 3, '\0');
  if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw DataError("truncated PPM pixel data");
  }
  std::vector<double> samples(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    samples[i] = static_cast<double>(static_cast<unsigned char>(bytes[i])) /
                 static_cast<double>(maxval);
  }
  return ImageRaster(w, h, 3, std::move(samples));
}

void write_obbr(std::ostream& out, const ImageRaster& image) {
  out.write(kObbrMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(image.width()));
  put_u32(out, static_cast<std::uint32_t>(image.height()));
  put_u32(out, static_cast<std::uint32_t>(image.channels()));
  for (std::size_t ch = 0; ch < image.channels(); ++ch) {
    for (std::size_t r = 0; r < image.height(); ++r) {
      for (std::size_t c = 0; c < image.width(); ++c) {
        put_u32(out, std::bit_cast<std::uint32_t>(
                         static_cast<float>(image.at(r, c, ch))));
      }
    }
  }
  if (!out) throw DataError("failed writing OBBR");
}

ImageRaster read_obbr(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kObbrMagic, 4) != 0) {
    throw DataError("missing OBBR magic");
  }
  const std::size_t w = get_u32(in);
  const std::size_t h = get_u32(in);
  const std::size_t ch_count = get_u32(in);
  if (w == 0 || h == 0 || ch_count == 0) throw DataError("OBBR has zero size");
  std::vector<double> samples(w * h * ch_count);
  for (std::size_t ch = 0; ch < ch_count; ++ch) {
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        const float v = std::bit_cast<float>(get_u32(in));
        if (!std::isfinite(v)) throw DataError("OBBR sample is not finite");
        samples[(r * w + c) * ch_count + ch] = v;
      }
    }
  }
  return ImageRaster(w, h, ch_count, std::move(samples));
}

void write_image(const std::filesystem::path& path, const ImageRaster& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  if (path.extension() == ".obbr") {
    write_obbr(out, image);
  } else if (path.extension() == ".ppm") {
    write_ppm(out, image);
  } else {
    throw DataError("unknown image extension: " + path.string());
  }
}

ImageRaster read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  if (path.extension() == ".obbr") return read_obbr(in);
  if (path.extension() == ".ppm") return read_ppm(in);
  throw DataError("unknown image extension: " + path.string());
}

}  // namespace obbkit
