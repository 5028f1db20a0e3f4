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

#include "nodulegen/diffusion/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nodulegen::diffusion {

NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end) {
    if (steps == 0 || !(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw DiffusionError(DiffusionErrc::InvalidRange,
                             "need T >= 1 and 0 < beta_start <= beta_end < 1");
    }
    NoiseSchedule s;
    s.betas.resize(steps);
    s.alphas.resize(steps);
    s.alpha_bars.resize(steps);
    double running = 1.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double frac = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
        s.betas[i] = beta_start + (beta_end - beta_start) * frac;
        s.alphas[i] = 1.0 - s.betas[i];
        running *= s.alphas[i];
        s.alpha_bars[i] = running;
    }
    return s;
}

NoiseSchedule make_scaled_schedule(std::size_t steps) {
    if (steps == 0) {
        throw DiffusionError(DiffusionErrc::InvalidRange, "need T >= 1");
    }
    const double factor = 1000.0 / static_cast<double>(steps);
    return make_schedule(steps, kDefaultBetaStart * factor, std::min(kDefaultBetaEnd * factor, 0.999));
}

void forward_diffuse_with(std::span<const double> x0, std::span<const double> eps, std::size_t t,
                          const NoiseSchedule& schedule, std::span<double> out) {
    if (t < 1 || t > schedule.steps()) {
        throw DiffusionError(DiffusionErrc::StepOutOfRange,
                             "t=" + std::to_string(t) + " outside [1, " + std::to_string(schedule.steps()) + "]");
    }
    if (eps.size() != x0.size() || out.size() != x0.size()) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "x0, eps and output sizes differ");
    }
    const double signal = std::sqrt(schedule.alpha_bar(t));
    const double noise = std::sqrt(1.0 - schedule.alpha_bar(t));
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = signal * x0[i] + noise * eps[i];
}

std::vector<double> forward_diffuse(std::span<const double> x0, std::size_t t, const NoiseSchedule& schedule,
                                    NormalSource& noise) {
    if (t < 1 || t > schedule.steps()) {
        throw DiffusionError(DiffusionErrc::StepOutOfRange,
                             "t=" + std::to_string(t) + " outside [1, " + std::to_string(schedule.steps()) + "]");
    }
    std::vector<double> eps(x0.size());
    for (auto& e : eps) e = noise();
    std::vector<double> out(x0.size());
    forward_diffuse_with(x0, eps, t, schedule, out);
    return out;
}

}  // namespace nodulegen::diffusion
