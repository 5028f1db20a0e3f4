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

#include <cstddef>
#include <span>

namespace nodulegen::study {

struct MannWhitney {
    double u = 0.0;       ///< min(U, nm - U)
    double u_xy = 0.0;    ///< #{x > y} + ties / 2
    double p = 1.0;       ///< two-sided
    bool exact = false;   ///< true when p came from full enumeration
};

inline constexpr std::size_t kExactLimit = 16;

/// #{(x, y): x > y} + #{x == y} / 2.
[[nodiscard]] double u_statistic(std::span<const double> xs, std::span<const double> ys);

/// Two-sided p by enumerating every split of the pooled ranks. Only valid
/// without ties; cost grows as C(n + m, n).
[[nodiscard]] double exact_p(std::span<const double> xs, std::span<const double> ys);

/// Normal approximation with tie and continuity correction. Returns 1 when
/// every value is tied.
[[nodiscard]] double normal_p(std::span<const double> xs, std::span<const double> ys);

/// Exact when n + m <= kExactLimit and there are no ties. Throws EmptySample.
[[nodiscard]] MannWhitney mann_whitney_u(std::span<const double> xs, std::span<const double> ys);

}  // namespace nodulegen::study
