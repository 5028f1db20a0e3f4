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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nodulegen/diffusion/error.hpp"
#include "nodulegen/diffusion/schedule.hpp"
#include "nodulegen/prompt/prompt.hpp"

namespace nodulegen::diffusion {

/// Conditioning input; std::nullopt selects the learned null token.
using Condition = std::optional<prompt::FindingVector>;

/// Rows of the condition table: five per ordinal field, two for
/// calcification, one null token.
inline constexpr std::size_t kConditionRows = 5 * 4 + 2 + 1;
inline constexpr std::size_t kNullRow = kConditionRows - 1;

/// Table rows a condition sums over (one row for the null token).
[[nodiscard]] std::vector<std::size_t> condition_rows(const Condition& condition);

struct DenoiserConfig {
    std::size_t pixels = 32 * 32;
    std::size_t hidden = 256;
    std::size_t time_features = 16;
    std::size_t steps = 200;  ///< T the time features are scaled by
    /// Prior scale of the fixed output skip; see Denoiser.
    double skip_sigma = 0.1;

    friend bool operator==(const DenoiserConfig&, const DenoiserConfig&) = default;
};

/// One column of a batch.
struct DenoiserInput {
    std::span<const double> x;  ///< noised image, `pixels` values
    std::size_t t = 1;
    Condition condition;
};

/// Epsilon predictor: a two-hidden-layer perceptron plus a fixed linear skip
///
///   h1 = silu(W1 x + Wt phi(t) + b1 + sum_k E[:, k])
///   h2 = silu(W2 h1 + b2)
///   eps = W3 h2 + b3 + c(t) x
///
/// where phi is a fixed sinusoidal time code and k runs over the rows of the
/// condition table selected by the condition. c(t) = s / (s^2 + abar
/// sigma^2) with s = sqrt(1 - abar_t) is the linear least-squares estimate of
/// eps for data of variance sigma^2 (skip_sigma); it carries the full-rank
/// noise component the hidden bottleneck cannot. Parameters live in one flat
/// vector so optimizers and finite-difference checks can treat them uniformly.
class Denoiser {
public:
    Denoiser() = default;
    /// Random initialization scaled by 1/sqrt(fan_in). `schedule` fixes T and
    /// the skip coefficients; config.steps is overwritten with its length.
    Denoiser(DenoiserConfig config, const NoiseSchedule& schedule, std::uint64_t seed);

    [[nodiscard]] const DenoiserConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(params_.size()); }
    [[nodiscard]] const Eigen::VectorXd& parameters() const noexcept { return params_; }
    [[nodiscard]] Eigen::VectorXd& parameters() noexcept { return params_; }

    /// Predictions as a pixels x batch matrix.
    [[nodiscard]] Eigen::MatrixXd predict(std::span<const DenoiserInput> batch) const;

    /// Mean squared error against `targets` (pixels x batch), averaged over
    /// every entry. Fills `gradient` (resized to parameter_count()) when given.
    double loss(std::span<const DenoiserInput> batch, const Eigen::MatrixXd& targets,
                Eigen::VectorXd* gradient = nullptr) const;

    [[nodiscard]] Eigen::VectorXd time_code(std::size_t t) const;
    [[nodiscard]] double skip(std::size_t t) const;
    [[nodiscard]] const std::vector<double>& alpha_bars() const noexcept { return alpha_bars_; }

    friend bool operator==(const Denoiser&, const Denoiser&) = default;

private:
    struct Forward;
    void run(std::span<const DenoiserInput> batch, Forward& f) const;

    DenoiserConfig config_{};
    std::vector<double> alpha_bars_;
    Eigen::VectorXd params_;
};

/// "NGDM" magic, u32 version, u64 pixels/hidden/time_features/steps, f64
/// skip_sigma, T f64 alpha_bars, u64 parameter count, then f64 parameters;
/// all little-endian.
[[nodiscard]] std::vector<std::uint8_t> encode_model(const Denoiser& model);
[[nodiscard]] Denoiser decode_model(std::span<const std::uint8_t> bytes);
void save_model(const std::string& path, const Denoiser& model);
[[nodiscard]] Denoiser load_model(const std::string& path);

}  // namespace nodulegen::diffusion
