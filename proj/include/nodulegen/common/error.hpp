// Copyright 2026 The nodulegen Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace nodulegen {

/// Exception carrying a module-specific error code alongside the message.
///
/// Each module declares its own `enum class` of failure kinds and a
/// `code_name()` overload for it; the message is prefixed with that name so
/// logs read as "MissingTag: (0028,0030) PixelSpacing".
template <typename Code>
class Error : public std::runtime_error {
public:
    Error(Code code, const std::string& detail)
        : std::runtime_error(std::string(code_name(code)) +
                             (detail.empty() ? "" : ": " + detail)),
          code_(code) {}

    [[nodiscard]] Code code() const noexcept { return code_; }

private:
    Code code_;
};

}  // namespace nodulegen
