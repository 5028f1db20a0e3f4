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
#include <vector>

#include "nodulegen/common/grid.hpp"
#include "nodulegen/prompt/prompt.hpp"

namespace nodulegen::diffusion {

enum class FillMode { Solid, PartSolid };

/// Procedural nodule: an ellipse with cosine spikes on its boundary.
struct PhantomSpec {
    std::size_t size = 32;
    double radius = 7.0;        ///< semi-major axis, px
    double eccentricity = 0.0;  ///< 0 is a circle
    double orientation = 0.0;   ///< major-axis angle, radians
    double edge_blur = 0.0;     ///< Gaussian edge width, px
    int spike_count = 0;
    double spike_amplitude = 0.0;  ///< px beyond the ellipse
    FillMode fill = FillMode::Solid;
    double center_dx = 0.0;  ///< offset from the image center, px
    double center_dy = 0.0;
    std::uint64_t seed = 0;  ///< drives part-solid texture and spike phase
};

struct Phantom {
    Grid<float> image;  ///< values in [0, 1]
    prompt::FindingVector finding;
};

inline constexpr double kPhantomBackground = 0.05;
inline constexpr double kPhantomSolid = 0.9;

/// Throws DiffusionError{InvalidSpec} unless 0 < radius (plus spikes) < size/2,
/// eccentricity in [0,1), blur >= 0 and spike settings are non-negative.
void validate(const PhantomSpec& spec);

/// Finding a phantom spec renders: eccentricity bins to sphericity, blur to
/// margin, spike amplitude to spiculation, fill mode to texture (solid 5,
/// part-solid 3). Phantoms are never calcified.
[[nodiscard]] prompt::FindingVector finding_for(const PhantomSpec& spec);

/// Renders the phantom; deterministic for a given spec.
[[nodiscard]] Phantom make_phantom(const PhantomSpec& spec);

/// Draws a spec covering every bin of finding_for with roughly equal odds.
[[nodiscard]] PhantomSpec random_spec(std::uint64_t seed, std::size_t size = 32);

/// `count` phantoms from random_spec(derive_seed(seed, i)).
[[nodiscard]] std::vector<Phantom> phantom_corpus(std::size_t count, std::uint64_t seed,
                                                  std::size_t size = 32);

}  // namespace nodulegen::diffusion
