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

#include <cstdint>
#include <string>

#include "nodulegen/common/grid.hpp"

namespace nodulegen {

/// 8-bit single-channel PNG. Throws std::runtime_error on I/O or codec failure.
void write_png(const std::string& path, const Grid<std::uint8_t>& image);
[[nodiscard]] Grid<std::uint8_t> read_png(const std::string& path);

}  // namespace nodulegen
