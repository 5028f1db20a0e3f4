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
#include <functional>
#include <span>
#include <vector>

#include "nodulegen/common/grid.hpp"
#include "nodulegen/diffusion/denoiser.hpp"
#include "nodulegen/diffusion/schedule.hpp"

namespace nodulegen::diffusion {

struct TrainingExample {
    Grid<float> image;  ///< [0, 1]; scaled to [-1, 1] for the model
    prompt::FindingVector finding;
};

struct TrainOptions {
    std::size_t epochs = 50;
    std::size_t batch_size = 16;
    double learning_rate = 0.3;
    double cond_dropout = 0.1;
    std::uint64_t seed = 7;
    DenoiserConfig model{};
    /// Called after each epoch with (epoch index, mean loss).
    std::function<void(std::size_t, double)> on_epoch;
};

struct TrainResult {
    Denoiser model;
    std::vector<double> loss_curve;  ///< mean minibatch loss per epoch
    double initial_loss = 0.0;       ///< probe_loss before the first update
    double final_loss = 0.0;         ///< probe_loss after the last update
};

/// Conditional epsilon loss on fixed draws (one step and noise field per
/// example, from `seed`) over the first `max_examples` examples.
[[nodiscard]] double probe_loss(const Denoiser& model, std::span<const TrainingExample> data,
                                const NoiseSchedule& schedule, std::uint64_t seed,
                                std::size_t max_examples = 256);

/// Maps [0, 1] pixels to the model's [-1, 1] range, and back (clamped).
[[nodiscard]] std::vector<double> to_model_space(const Grid<float>& image);
[[nodiscard]] Grid<float> from_model_space(std::span<const double> x, std::size_t size);

/// Plain minibatch SGD on the epsilon-prediction loss. Each example gets a
/// uniform step t in [1, T] and fresh noise; with probability cond_dropout
/// its condition is replaced by the null token. Throws EmptyDataset or
/// DivergedLoss (non-finite loss).
[[nodiscard]] TrainResult train_denoiser(std::span<const TrainingExample> data,
                                         const NoiseSchedule& schedule,
                                         const TrainOptions& options);

}  // namespace nodulegen::diffusion
