// include/edc/heatmap.hpp

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

#pragma once

#include "edc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace edc {

struct GrayImage {
  Index width = 0;
  Index height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, top row first

  std::uint8_t at(Index x, Index y) const { return pixels[static_cast<std::size_t>(y * width + x)]; }
};

/// Time runs left to right, mel bins bottom to top. Values are min-max
/// normalized over the whole tensor; a constant tensor renders mid-gray.
GrayImage render_heatmap(const Matrix<float>& spec);

/// Places images left to right; shorter ones are padded with black at the top.
GrayImage side_by_side(const std::vector<GrayImage>& images);

std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const GrayImage& image);

/// Picks PNG for a `.png` extension and binary PGM otherwise.
void write_image(const GrayImage& image, const std::filesystem::path& path);

}  // namespace edc
