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

#ifndef AUTOLIFT__MASK_HPP_
#define AUTOLIFT__MASK_HPP_

#include <cstdint>
#include <vector>

namespace autolift
{

/// Row-major binary image.
class BinaryMask
{
public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const {return width_;}
  int height() const {return height_;}
  bool at(int x, int y) const {return data_[static_cast<std::size_t>(y) * width_ + x] != 0;}
  void set(int x, int y, bool value = true)
  {
    data_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  std::size_t count() const;

  /// Sets every pixel within `radius` (Chebyshev distance) of a set pixel.
  BinaryMask dilated(int radius) const;

  bool operator==(const BinaryMask &) const = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Run lengths over row-major order, alternating zeros and ones and always
/// starting with the (possibly empty) run of zeros.
std::vector<std::uint32_t> encode_rle(const BinaryMask & mask);

/// Throws Error(format) when the runs do not cover exactly width * height pixels.
BinaryMask decode_rle(const std::vector<std::uint32_t> & counts, int width, int height);

}  // namespace autolift

#endif  // AUTOLIFT__MASK_HPP_
