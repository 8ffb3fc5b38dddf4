/* Copyright 2026 The OWS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace ows {

// Exit-code class used by the command line front end.
enum class ErrorKind { kUsage = 2, kData = 3, kIo = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const char* name, const std::string& what)
      : std::runtime_error(what), kind_(kind), name_(name) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Stable error type name, e.g. "GridMismatchError".
  const char* name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  const char* name_;
};

#define OWS_DEFINE_ERROR(Type, Kind)                                  \
  class Type : public Error {                                         \
   public:                                                            \
    explicit Type(const std::string& what) : Error(Kind, #Type, what) {} \
  };

OWS_DEFINE_ERROR(UsageError, ErrorKind::kUsage)
OWS_DEFINE_ERROR(ManifestParseError, ErrorKind::kData)
OWS_DEFINE_ERROR(GridMismatchError, ErrorKind::kData)
OWS_DEFINE_ERROR(BoundsError, ErrorKind::kData)
OWS_DEFINE_ERROR(OutOfBoundsError, ErrorKind::kData)
OWS_DEFINE_ERROR(UnknownLocationError, ErrorKind::kData)
OWS_DEFINE_ERROR(ChannelMismatchError, ErrorKind::kData)
OWS_DEFINE_ERROR(DimMismatchError, ErrorKind::kData)
OWS_DEFINE_ERROR(EmptyInputError, ErrorKind::kData)
OWS_DEFINE_ERROR(ExtentError, ErrorKind::kData)
OWS_DEFINE_ERROR(PlacementError, ErrorKind::kData)
OWS_DEFINE_ERROR(FormatError, ErrorKind::kData)
OWS_DEFINE_ERROR(MissingFileError, ErrorKind::kIo)
OWS_DEFINE_ERROR(IoError, ErrorKind::kIo)

#undef OWS_DEFINE_ERROR

}  // namespace ows
