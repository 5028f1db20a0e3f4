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

#include "nodulegen/diffusion/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nodulegen::diffusion {

std::vector<double> to_model_space(const Grid<float>& image) {
    std::vector<double> x(image.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.0 * image.values()[i] - 1.0;
    return x;
}

Grid<float> from_model_space(std::span<const double> x, std::size_t size) {
    if (x.size() != size * size) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "expected " + std::to_string(size * size) + " values");
    }
    Grid<float> image(size, size);
    for (std::size_t i = 0; i < x.size(); ++i) {
        image.values()[i] = static_cast<float>(std::clamp((x[i] + 1.0) / 2.0, 0.0, 1.0));
    }
    return image;
}

double probe_loss(const Denoiser& model, std::span<const TrainingExample> data, const NoiseSchedule& schedule,
                  std::uint64_t seed, std::size_t max_examples) {
    if (data.empty()) {
        throw DiffusionError(DiffusionErrc::EmptyDataset, "no examples to probe");
    }
    const std::size_t n = std::min(max_examples, data.size());
    const auto P = static_cast<Eigen::Index>(model.config().pixels);
    NormalSource noise(seed);
    std::vector<std::vector<double>> noised(n);
    std::vector<DenoiserInput> batch;
    Eigen::MatrixXd targets(P, static_cast<Eigen::Index>(n));
    std::vector<double> eps(static_cast<std::size_t>(P));
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t t = 1 + static_cast<std::size_t>(uniform_index(noise.engine(), schedule.steps()));
        for (auto& e : eps) e = noise();
        noised[j].resize(static_cast<std::size_t>(P));
        forward_diffuse_with(to_model_space(data[j].image), eps, t, schedule, noised[j]);
        targets.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(eps.data(), P);
        batch.push_back({noised[j], t, data[j].finding});
    }
    return model.loss(batch, targets);
}

TrainResult train_denoiser(std::span<const TrainingExample> data, const NoiseSchedule& schedule,
                           const TrainOptions& options) {
    if (data.empty()) {
        throw DiffusionError(DiffusionErrc::EmptyDataset, "no training examples");
    }
    const auto& config = options.model;
    for (const auto& ex : data) {
        if (ex.image.size() != config.pixels) {
            throw DiffusionError(DiffusionErrc::ShapeMismatch, "image does not match the model's pixel count");
        }
    }
    if (options.batch_size == 0) {
        throw DiffusionError(DiffusionErrc::InvalidRange, "batch size must be positive");
    }

    TrainResult result{Denoiser(config, schedule, derive_seed(options.seed, 0)), {}, 0.0, 0.0};
    const std::uint64_t probe_seed = derive_seed(options.seed, 2);
    result.initial_loss = probe_loss(result.model, data, schedule, probe_seed);
    std::vector<std::vector<double>> clean;
    clean.reserve(data.size());
    for (const auto& ex : data) clean.push_back(to_model_space(ex.image));

    NormalSource noise(derive_seed(options.seed, 1));
    auto& rng = noise.engine();
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    const auto P = static_cast<Eigen::Index>(config.pixels);
    std::vector<std::vector<double>> noised(options.batch_size, std::vector<double>(config.pixels));
    std::vector<double> eps(config.pixels);
    std::vector<DenoiserInput> batch;
    Eigen::MatrixXd targets;
    Eigen::VectorXd gradient;

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        seeded_shuffle(std::span(order), rng);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t n = std::min(options.batch_size, order.size() - start);
            batch.clear();
            targets.resize(P, static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < n; ++j) {
                const auto idx = order[start + j];
                const std::size_t t = 1 + static_cast<std::size_t>(uniform_index(rng, schedule.steps()));
                for (auto& e : eps) e = noise();
                forward_diffuse_with(clean[idx], eps, t, schedule, noised[j]);
                targets.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(eps.data(), P);
                Condition cond = data[idx].finding;
                if (unit_open(rng) < options.cond_dropout) cond.reset();
                batch.push_back({noised[j], t, cond});
            }
            const double loss = result.model.loss(batch, targets, &gradient);
            if (!std::isfinite(loss) || !gradient.allFinite()) {
                throw DiffusionError(DiffusionErrc::DivergedLoss,
                                     "epoch " + std::to_string(epoch) + " batch " + std::to_string(batches));
            }
            result.model.parameters() -= options.learning_rate * gradient;
            epoch_loss += loss;
            ++batches;
        }
        result.loss_curve.push_back(epoch_loss / static_cast<double>(batches));
        if (options.on_epoch) options.on_epoch(epoch, result.loss_curve.back());
    }
    result.final_loss = probe_loss(result.model, data, schedule, probe_seed);
    return result;
}

}  // namespace nodulegen::diffusion
