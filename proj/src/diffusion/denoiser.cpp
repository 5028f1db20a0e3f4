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

#include "nodulegen/diffusion/denoiser.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "nodulegen/common/binary_io.hpp"
#include "nodulegen/common/random.hpp"

namespace nodulegen::diffusion {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Offsets of each block inside the flat parameter vector.
struct Layout {
    std::size_t w1, wt, b1, emb, w2, b2, w3, b3, total;

    explicit Layout(const DenoiserConfig& c) {
        std::size_t at = 0;
        auto take = [&](std::size_t n) {
            const auto start = at;
            at += n;
            return start;
        };
        w1 = take(c.hidden * c.pixels);
        wt = take(c.hidden * c.time_features);
        b1 = take(c.hidden);
        emb = take(c.hidden * kConditionRows);
        w2 = take(c.hidden * c.hidden);
        b2 = take(c.hidden);
        w3 = take(c.pixels * c.hidden);
        b3 = take(c.pixels);
        total = at;
    }
};

using Map = Eigen::Map<MatrixXd>;
using ConstMap = Eigen::Map<const MatrixXd>;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

constexpr char kMagic[4] = {'N', 'G', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::vector<std::size_t> condition_rows(const Condition& condition) {
    if (!condition) return {kNullRow};
    prompt::validate(*condition);
    const auto& f = *condition;
    return {static_cast<std::size_t>(f.sphericity - 1), static_cast<std::size_t>(5 + f.margin - 1),
            static_cast<std::size_t>(10 + f.texture - 1), static_cast<std::size_t>(15 + f.spiculation - 1),
            static_cast<std::size_t>(20 + (f.calcified ? 1 : 0))};
}

Denoiser::Denoiser(DenoiserConfig config, const NoiseSchedule& schedule, std::uint64_t seed)
    : alpha_bars_(schedule.alpha_bars) {
    config.steps = schedule.steps();
    config_ = config;
    if (config.pixels == 0 || config.hidden == 0 || config.time_features == 0 || config.steps == 0) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "denoiser dimensions must be positive");
    }
    if (!(config.skip_sigma > 0.0)) {
        throw DiffusionError(DiffusionErrc::InvalidRange, "skip_sigma must be positive");
    }
    const Layout L(config);
    params_ = VectorXd::Zero(static_cast<Eigen::Index>(L.total));
    NormalSource normal(seed);
    auto fill = [&](std::size_t offset, std::size_t count, double scale) {
        for (std::size_t i = 0; i < count; ++i) params_[static_cast<Eigen::Index>(offset + i)] = scale * normal();
    };
    const auto h = static_cast<double>(config.hidden);
    fill(L.w1, config.hidden * config.pixels, 1.0 / std::sqrt(static_cast<double>(config.pixels)));
    fill(L.wt, config.hidden * config.time_features, 1.0 / std::sqrt(static_cast<double>(config.time_features)));
    fill(L.emb, config.hidden * kConditionRows, 0.1);
    fill(L.w2, config.hidden * config.hidden, 1.0 / std::sqrt(h));
    fill(L.w3, config.pixels * config.hidden, 1.0 / std::sqrt(h));
}

VectorXd Denoiser::time_code(std::size_t t) const {
    const auto n = config_.time_features;
    VectorXd code(static_cast<Eigen::Index>(n));
    const double s = static_cast<double>(t) / static_cast<double>(config_.steps);
    for (std::size_t k = 0; k < n; ++k) {
        // Frequencies from 1 to 2^(n/2 - 1) half-turns over the schedule.
        const double freq = std::numbers::pi * std::pow(2.0, static_cast<double>(k / 2));
        code[static_cast<Eigen::Index>(k)] = k % 2 == 0 ? std::sin(freq * s) : std::cos(freq * s);
    }
    return code;
}

double Denoiser::skip(std::size_t t) const {
    const double ab = alpha_bars_.at(t - 1);
    const double s = std::sqrt(1.0 - ab);
    return s / (s * s + ab * config_.skip_sigma * config_.skip_sigma);
}

struct Denoiser::Forward {
    MatrixXd x, phi, select, a1, h1, a2, h2, out;
};

void Denoiser::run(std::span<const DenoiserInput> batch, Forward& f) const {
    const Layout L(config_);
    const auto P = static_cast<Eigen::Index>(config_.pixels);
    const auto H = static_cast<Eigen::Index>(config_.hidden);
    const auto F = static_cast<Eigen::Index>(config_.time_features);
    const auto K = static_cast<Eigen::Index>(kConditionRows);
    const auto B = static_cast<Eigen::Index>(batch.size());
    if (params_.size() != static_cast<Eigen::Index>(L.total)) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "uninitialized denoiser");
    }

    f.x.resize(P, B);
    f.phi.resize(F, B);
    f.select = MatrixXd::Zero(K, B);
    for (Eigen::Index j = 0; j < B; ++j) {
        const auto& in = batch[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(in.x.size()) != P) {
            throw DiffusionError(DiffusionErrc::ShapeMismatch, "input has " + std::to_string(in.x.size()) + " pixels");
        }
        if (in.t < 1 || in.t > config_.steps) {
            throw DiffusionError(DiffusionErrc::StepOutOfRange, "t=" + std::to_string(in.t));
        }
        f.x.col(j) = Eigen::Map<const VectorXd>(in.x.data(), P);
        f.phi.col(j) = time_code(in.t);
        for (const auto row : condition_rows(in.condition)) f.select(static_cast<Eigen::Index>(row), j) += 1.0;
    }

    const double* p = params_.data();
    const ConstMap W1(p + L.w1, H, P), Wt(p + L.wt, H, F), E(p + L.emb, H, K);
    const ConstMap W2(p + L.w2, H, H), W3(p + L.w3, P, H);
    const Eigen::Map<const VectorXd> b1(p + L.b1, H), b2(p + L.b2, H), b3(p + L.b3, P);

    f.a1.noalias() = W1 * f.x;
    f.a1.noalias() += Wt * f.phi;
    f.a1.noalias() += E * f.select;
    f.a1.colwise() += b1;
    f.h1 = f.a1.unaryExpr([](double v) { return v * sigmoid(v); });
    f.a2.noalias() = W2 * f.h1;
    f.a2.colwise() += b2;
    f.h2 = f.a2.unaryExpr([](double v) { return v * sigmoid(v); });
    f.out.noalias() = W3 * f.h2;
    f.out.colwise() += b3;
    for (Eigen::Index j = 0; j < B; ++j) f.out.col(j) += skip(batch[static_cast<std::size_t>(j)].t) * f.x.col(j);
}

MatrixXd Denoiser::predict(std::span<const DenoiserInput> batch) const {
    Forward f;
    run(batch, f);
    return std::move(f.out);
}

double Denoiser::loss(std::span<const DenoiserInput> batch, const MatrixXd& targets, VectorXd* gradient) const {
    Forward f;
    run(batch, f);
    if (targets.rows() != f.out.rows() || targets.cols() != f.out.cols()) {
        throw DiffusionError(DiffusionErrc::ShapeMismatch, "targets do not match the batch");
    }
    const MatrixXd diff = f.out - targets;
    const double count = static_cast<double>(diff.size());
    const double value = diff.squaredNorm() / count;
    if (gradient == nullptr) return value;

    const Layout L(config_);
    const auto P = static_cast<Eigen::Index>(config_.pixels);
    const auto H = static_cast<Eigen::Index>(config_.hidden);
    const auto F = static_cast<Eigen::Index>(config_.time_features);
    const auto K = static_cast<Eigen::Index>(kConditionRows);
    gradient->setZero(static_cast<Eigen::Index>(L.total));
    double* g = gradient->data();
    const double* p = params_.data();
    const ConstMap W2(p + L.w2, H, H), W3(p + L.w3, P, H);

    auto silu_grad = [](double v) {
        const double s = sigmoid(v);
        return s * (1.0 + v * (1.0 - s));
    };

    const MatrixXd g_out = (2.0 / count) * diff;
    Map(g + L.w3, P, H).noalias() = g_out * f.h2.transpose();
    Eigen::Map<VectorXd>(g + L.b3, P) = g_out.rowwise().sum();

    const MatrixXd g_a2 = (W3.transpose() * g_out).cwiseProduct(f.a2.unaryExpr(silu_grad));
    Map(g + L.w2, H, H).noalias() = g_a2 * f.h1.transpose();
    Eigen::Map<VectorXd>(g + L.b2, H) = g_a2.rowwise().sum();

    const MatrixXd g_a1 = (W2.transpose() * g_a2).cwiseProduct(f.a1.unaryExpr(silu_grad));
    Map(g + L.w1, H, P).noalias() = g_a1 * f.x.transpose();
    Map(g + L.wt, H, F).noalias() = g_a1 * f.phi.transpose();
    Map(g + L.emb, H, K).noalias() = g_a1 * f.select.transpose();
    Eigen::Map<VectorXd>(g + L.b1, H) = g_a1.rowwise().sum();
    return value;
}

std::vector<std::uint8_t> encode_model(const Denoiser& model) {
    ByteWriter w;
    w.put_bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
    w.put<std::uint32_t>(kVersion);
    const auto& c = model.config();
    for (const auto v : {c.pixels, c.hidden, c.time_features, c.steps}) w.put<std::uint64_t>(v);
    w.put<double>(c.skip_sigma);
    for (const double ab : model.alpha_bars()) w.put<double>(ab);
    w.put<std::uint64_t>(model.parameter_count());
    for (Eigen::Index i = 0; i < model.parameters().size(); ++i) w.put<double>(model.parameters()[i]);
    return std::move(w).take();
}

Denoiser decode_model(std::span<const std::uint8_t> bytes) {
    try {
        ByteReader r(bytes);
        const auto magic = r.get_bytes(4);
        if (std::memcmp(magic.data(), kMagic, 4) != 0) {
            throw DiffusionError(DiffusionErrc::BadModelFile, "bad magic");
        }
        if (const auto version = r.get<std::uint32_t>(); version != kVersion) {
            throw DiffusionError(DiffusionErrc::BadModelFile, "unsupported version " + std::to_string(version));
        }
        DenoiserConfig c;
        c.pixels = r.get<std::uint64_t>();
        c.hidden = r.get<std::uint64_t>();
        c.time_features = r.get<std::uint64_t>();
        c.steps = r.get<std::uint64_t>();
        c.skip_sigma = r.get<double>();
        if (c.steps == 0 || c.steps > r.remaining() / sizeof(double)) {
            throw DiffusionError(DiffusionErrc::BadModelFile, "bad step count");
        }
        NoiseSchedule schedule;
        schedule.alpha_bars.resize(c.steps);
        for (auto& ab : schedule.alpha_bars) ab = r.get<double>();
        schedule.betas.assign(c.steps, 0.0);
        schedule.alphas.assign(c.steps, 0.0);
        Denoiser model(c, schedule, 0);
        const auto count = r.get<std::uint64_t>();
        if (count != model.parameter_count() || r.remaining() != count * sizeof(double)) {
            throw DiffusionError(DiffusionErrc::BadModelFile, "parameter count does not match the config");
        }
        for (Eigen::Index i = 0; i < model.parameters().size(); ++i) model.parameters()[i] = r.get<double>();
        return model;
    } catch (const ShortRead& e) {
        throw DiffusionError(DiffusionErrc::BadModelFile, e.what());
    }
}

void save_model(const std::string& path, const Denoiser& model) { write_file_bytes(path, encode_model(model)); }

Denoiser load_model(const std::string& path) {
    std::vector<std::uint8_t> bytes;
    try {
        bytes = read_file_bytes(path);
    } catch (const std::runtime_error& e) {
        throw DiffusionError(DiffusionErrc::BadModelFile, e.what());
    }
    return decode_model(bytes);
}

}  // namespace nodulegen::diffusion
