// src/heatmap.cpp

// Copyright 2026  The EDC Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "edc/heatmap.hpp"

#include "edc/audio_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace edc {

namespace {

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& body) {
  put_be32(out, static_cast<std::uint32_t>(body.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), body.begin(), body.end());
  const uLong crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_be32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

GrayImage render_heatmap(const Matrix<float>& spec) {
  if (spec.rows() < 1 || spec.cols() < 1) throw DataError("render_heatmap: empty tensor");
  require_finite(spec, "render_heatmap");
  GrayImage img{spec.rows(), spec.cols(), {}};
  img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
  const double lo = spec.minCoeff();
  const double hi = spec.maxCoeff();
  for (Index t = 0; t < img.width; ++t) {
    for (Index f = 0; f < img.height; ++f) {
      const double v = hi > lo ? std::lround(255.0 * (spec(t, f) - lo) / (hi - lo)) : 128.0;
      img.pixels[static_cast<std::size_t>((img.height - 1 - f) * img.width + t)] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

GrayImage side_by_side(const std::vector<GrayImage>& images) {
  GrayImage out;
  for (const auto& im : images) {
    out.width += im.width;
    out.height = std::max(out.height, im.height);
  }
  out.pixels.assign(static_cast<std::size_t>(out.width * out.height), 0);
  Index x0 = 0;
  for (const auto& im : images) {
    const Index y0 = out.height - im.height;
    for (Index y = 0; y < im.height; ++y) {
      for (Index x = 0; x < im.width; ++x) {
        out.pixels[static_cast<std::size_t>((y0 + y) * out.width + x0 + x)] = im.at(x, y);
      }
    }
    x0 += im.width;
  }
  return out;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>((image.width + 1) * image.height));
  for (Index y = 0; y < image.height; ++y) {
    raw.push_back(0);  // filter: none
    const auto row = image.pixels.begin() + y * image.width;
    raw.insert(raw.end(), row, row + image.width);
  }
  uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> packed(packed_size);
  if (compress2(packed.data(), &packed_size, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw Error("encode_png: zlib compression failed");
  }
  packed.resize(packed_size);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(image.width));
  put_be32(ihdr, static_cast<std::uint32_t>(image.height));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale, no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", packed);
  put_chunk(out, "IEND", {});
  return out;
}

void write_image(const GrayImage& image, const std::filesystem::path& path) {
  write_file(path, path.extension() == ".png" ? encode_png(image) : encode_pgm(image));
}

}  // namespace edc
