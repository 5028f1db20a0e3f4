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

#include "nodulegen/diffusion/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nodulegen/common/random.hpp"
#include "nodulegen/diffusion/error.hpp"

namespace nodulegen::diffusion {

const char* code_name(DiffusionErrc code) noexcept {
    switch (code) {
        case DiffusionErrc::InvalidRange: return "InvalidRange";
        case DiffusionErrc::StepOutOfRange: return "StepOutOfRange";
        case DiffusionErrc::DivergedLoss: return "DivergedLoss";
        case DiffusionErrc::EmptyDataset: return "EmptyDataset";
        case DiffusionErrc::InvalidSpec: return "InvalidSpec";
        case DiffusionErrc::ShapeMismatch: return "ShapeMismatch";
        case DiffusionErrc::BadModelFile: return "BadModelFile";
    }
    return "DiffusionError";
}

namespace {

// Upper bin edges; a value below edge k falls in bin k (score 5 - k).
constexpr std::array<double, 5> kEccentricityEdges{0.15, 0.35, 0.5, 0.65, 0.8};
constexpr std::array<double, 5> kBlurEdges{0.3, 0.7, 1.1, 1.5, 2.0};
constexpr std::array<double, 5> kSpikeEdges{0.5, 1.5, 2.5, 3.5, 4.5};

int score_from_edges(double value, const std::array<double, 5>& edges) {
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (value < edges[k]) return 5 - static_cast<int>(k);
    }
    return 1;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_open(rng); }

}  // namespace

void validate(const PhantomSpec& s) {
    const double half = static_cast<double>(s.size) / 2.0;
    const double reach = s.radius + s.spike_amplitude + std::max(std::abs(s.center_dx), std::abs(s.center_dy));
    if (s.size == 0 || !(s.radius > 0.0) || !(reach < half)) {
        throw DiffusionError(DiffusionErrc::InvalidSpec, "phantom must fit inside the image");
    }
    if (!(s.eccentricity >= 0.0 && s.eccentricity < 1.0)) {
        throw DiffusionError(DiffusionErrc::InvalidSpec, "eccentricity outside [0, 1)");
    }
    if (!(s.edge_blur >= 0.0) || s.spike_count < 0 || !(s.spike_amplitude >= 0.0)) {
        throw DiffusionError(DiffusionErrc::InvalidSpec, "negative blur or spike setting");
    }
}

prompt::FindingVector finding_for(const PhantomSpec& s) {
    prompt::FindingVector f;
    f.sphericity = score_from_edges(s.eccentricity, kEccentricityEdges);
    f.margin = score_from_edges(s.edge_blur, kBlurEdges);
    // Spiculation runs the other way: more spike, higher score.
    f.spiculation = s.spike_count == 0 ? 1 : 6 - score_from_edges(s.spike_amplitude, kSpikeEdges);
    f.texture = s.fill == FillMode::Solid ? 5 : 3;
    f.calcified = false;
    return f;
}

Phantom make_phantom(const PhantomSpec& s) {
    validate(s);
    std::mt19937_64 rng(s.seed);
    const double spike_phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    std::array<double, 3> freq{}, angle{}, phase{};
    for (std::size_t k = 0; k < 3; ++k) {
        freq[k] = uniform(rng, 0.5, 1.2);
        angle[k] = uniform(rng, 0.0, std::numbers::pi);
        phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    }

    const double a = s.radius;
    const double b = s.radius * std::sqrt(1.0 - s.eccentricity * s.eccentricity);
    const double cx = (static_cast<double>(s.size) - 1.0) / 2.0 + s.center_dx;
    const double cy = (static_cast<double>(s.size) - 1.0) / 2.0 + s.center_dy;

    Phantom out{Grid<float>(s.size, s.size), finding_for(s)};
    for (std::size_t r = 0; r < s.size; ++r) {
        for (std::size_t c = 0; c < s.size; ++c) {
            const double px = static_cast<double>(c) - cx;
            const double py = static_cast<double>(r) - cy;
            const double rho = std::sqrt(px * px + py * py);
            double boundary = a;
            if (s.eccentricity > 0.0 || s.spike_count > 0) {
                const double theta = std::atan2(py, px);
                const double local = theta - s.orientation;
                const double bc = b * std::cos(local);
                const double as = a * std::sin(local);
                boundary = a * b / std::sqrt(bc * bc + as * as);
                if (s.spike_count > 0) {
                    const double lobe = std::max(0.0, std::cos(s.spike_count * (theta - spike_phase)));
                    boundary += s.spike_amplitude * std::pow(lobe, 8.0);
                }
            }
            const double inside = boundary - rho;
            double fill = kPhantomSolid;
            if (s.fill == FillMode::PartSolid) {
                double wave = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    wave += std::sin(freq[k] * (px * std::cos(angle[k]) + py * std::sin(angle[k])) + phase[k]);
                }
                fill = 0.3 + 0.5 * (0.5 + wave / 6.0);
            }
            const double weight = s.edge_blur > 0.0 ? 0.5 * std::erfc(-inside / (s.edge_blur * std::numbers::sqrt2))
                                                    : (inside >= 0.0 ? 1.0 : 0.0);
            out.image(r, c) = static_cast<float>(kPhantomBackground + (fill - kPhantomBackground) * weight);
        }
    }
    return out;
}

PhantomSpec random_spec(std::uint64_t seed, std::size_t size) {
    std::mt19937_64 rng(seed);
    auto bin = [&] { return static_cast<std::size_t>(uniform_index(rng, 5)); };
    auto within = [&](const std::array<double, 5>& edges, std::size_t k) {
        const double lo = k == 0 ? 0.0 : edges[k - 1];
        return uniform(rng, lo, edges[k]);
    };
    PhantomSpec s;
    s.size = size;
    const double scale = static_cast<double>(size) / 32.0;
    s.radius = uniform(rng, 5.0, 9.0) * scale;
    s.eccentricity = within(kEccentricityEdges, bin());
    s.orientation = uniform(rng, 0.0, std::numbers::pi);
    s.edge_blur = within(kBlurEdges, bin()) * scale;
    const std::size_t spike_bin = bin();
    if (spike_bin == 0) {
        s.spike_count = 0;
        s.spike_amplitude = 0.0;
    } else {
        s.spike_count = 6 + static_cast<int>(uniform_index(rng, 5));
        s.spike_amplitude = within(kSpikeEdges, spike_bin) * scale;
    }
    s.fill = uniform_index(rng, 2) == 0 ? FillMode::Solid : FillMode::PartSolid;
    s.center_dx = uniform(rng, -1.5, 1.5) * scale;
    s.center_dy = uniform(rng, -1.5, 1.5) * scale;
    s.seed = rng();
    return s;
}

std::vector<Phantom> phantom_corpus(std::size_t count, std::uint64_t seed, std::size_t size) {
    std::vector<Phantom> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(make_phantom(random_spec(derive_seed(seed, i), size)));
    return out;
}

}  // namespace nodulegen::diffusion
