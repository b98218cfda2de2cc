// Copyright 2026 The autolift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "autolift/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "autolift/error.hpp"

namespace autolift
{

BinaryMask::BinaryMask(int width, int height, bool fill)
: width_(width), height_(height)
{
  if (width < 0 || height < 0) {
    throw Error(ErrorKind::invalid_argument, "mask dimensions must be non-negative");
  }
  data_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const
{
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::dilated(int radius) const
{
  if (radius <= 0) {
    return *this;
  }
  // Separable max filter: rows, then columns.
  BinaryMask rows(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!at(x, y)) {
        continue;
      }
      const int lo = std::max(0, x - radius);
      const int hi = std::min(width_ - 1, x + radius);
      for (int xx = lo; xx <= hi; ++xx) {
        rows.set(xx, y);
      }
    }
  }
  BinaryMask out(width_, height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!rows.at(x, y)) {
        continue;
      }
      const int lo = std::max(0, y - radius);
      const int hi = std::min(height_ - 1, y + radius);
      for (int yy = lo; yy <= hi; ++yy) {
        out.set(x, yy);
      }
    }
  }
  return out;
}

std::vector<std::uint32_t> encode_rle(const BinaryMask & mask)
{
  std::vector<std::uint32_t> counts;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const std::uint8_t v = mask.at(x, y) ? 1 : 0;
      if (v != current) {
        counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  counts.push_back(run);
  return counts;
}

BinaryMask decode_rle(const std::vector<std::uint32_t> & counts, int width, int height)
{
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  const std::uint64_t expected = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  if (total != expected) {
    throw Error(
      ErrorKind::format, "mask RLE covers " + std::to_string(total) + " pixels, expected " +
      std::to_string(expected));
  }
  BinaryMask mask(width, height);
  std::uint64_t pos = 0;
  bool value = false;
  for (const auto run : counts) {
    if (value) {
      for (std::uint64_t k = pos; k < pos + run; ++k) {
        mask.set(static_cast<int>(k % width), static_cast<int>(k / width));
      }
    }
    pos += run;
    value = !value;
  }
  return mask;
}

}  // namespace autolift
