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

#ifndef AUTOLIFT__ERROR_HPP_
#define AUTOLIFT__ERROR_HPP_

#include <stdexcept>
#include <string>

namespace autolift
{

// Error categories surface in the CLI's structured error output.
enum class ErrorKind
{
  io,
  format,
  invalid_argument,
  unknown_class,
  unknown_camera,
  empty_input,
};

const char * to_string(ErrorKind kind);

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string & message)
  : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept {return kind_;}

private:
  ErrorKind kind_;
};

}  // namespace autolift

#endif  // AUTOLIFT__ERROR_HPP_
