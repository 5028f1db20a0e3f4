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


#include <chrono>
#include <cstdio>
#include <sstream>

#include "commands.hpp"
#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/diffusion/phantom.hpp"
#include "nodulegen/diffusion/sweep.hpp"
#include "nodulegen/diffusion/train.hpp"

namespace nodulegen::cli {

namespace {

struct TrainArgs {
    std::size_t phantoms = 500;
    std::size_t size = 32;
    std::uint64_t phantom_seed = 1;
    diffusion::TrainOptions train;
    std::string out = "model.bin";
};

void run_train(TrainArgs a) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<diffusion::TrainingExample> data;
    for (auto& p : diffusion::phantom_corpus(a.phantoms, a.phantom_seed, a.size)) {
        data.push_back({std::move(p.image), p.finding});
    }
    a.train.model.pixels = a.size * a.size;
    const auto schedule = diffusion::make_scaled_schedule(a.train.model.steps);
    a.train.on_epoch = [&](std::size_t epoch, double loss) {
        if ((epoch + 1) % 10 == 0 || epoch + 1 == a.train.epochs) std::printf("epoch %zu loss %.4f\n", epoch + 1, loss);
        std::fflush(stdout);
    };
    const auto r = diffusion::train_denoiser(data, schedule, a.train);
    diffusion::save_model(a.out, r.model);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("probe loss %.4f -> %.4f in %.1f s -> %s\n", r.initial_loss, r.final_loss, secs, a.out.c_str());
}

std::vector<double> parse_scales(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        std::size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size()) throw std::runtime_error("bad guidance scale '" + part + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::runtime_error("no guidance scales given");
    return out;
}

struct SweepArgs {
    std::string model = "model.bin";
    std::string gs = "5,10,20,30,40,50,60";
    diffusion::SweepOptions sweep;
    std::string out = "sweep.json";
};

void run_sweep(SweepArgs a) {
    const auto model = diffusion::load_model(a.model);
    const auto schedule = diffusion::make_scaled_schedule(model.config().steps);
    a.sweep.guidance_scales = parse_scales(a.gs);
    a.sweep.on_scale = [](double gs, const metrics::MetricCell& c) {
        std::printf("gs %-4g fid %9.3f  kid %.4f  lpips %.4f  diversity %.4f  fidelity %.4f\n", gs, *c.fid,
                    *c.kid_mean, *c.lpips, *c.lpips_diversity, *c.fidelity);
        std::fflush(stdout);
    };
    const auto r = diffusion::run_gs_sweep(model, schedule, a.sweep);
    json configs = json::array();
    for (const auto& c : r.configs) {
        configs.push_back({{"model", c.model}, {"gs", c.guidance_scale}, {"values", metrics::to_json(c.values)}});
    }
    const auto table = metrics::render_table(r.report);
    write_json(a.out, {{"configs", configs}, {"report", metrics::to_json(r.report)}, {"table", table}});
    std::printf("%s-> %s\n", table.c_str(), a.out.c_str());
}

}  // namespace

void add_toy_commands(CLI::App& app) {
    auto* toy = app.add_subcommand("toy", "Desk-scale conditional diffusion on synthetic phantoms");
    toy->require_subcommand(1);
    {
        auto* cmd = toy->add_subcommand("train", "Train the phantom denoiser");
        auto a = std::make_shared<TrainArgs>();
        cmd->add_option("--phantoms", a->phantoms)->capture_default_str();
        cmd->add_option("--size", a->size, "Phantom side, px")->capture_default_str();
        cmd->add_option("--phantom-seed", a->phantom_seed)->capture_default_str();
        cmd->add_option("--epochs", a->train.epochs)->capture_default_str();
        cmd->add_option("--batch", a->train.batch_size)->capture_default_str();
        cmd->add_option("--lr", a->train.learning_rate)->capture_default_str();
        cmd->add_option("--cond-dropout", a->train.cond_dropout)->capture_default_str();
        cmd->add_option("--hidden", a->train.model.hidden)->capture_default_str();
        cmd->add_option("--steps", a->train.model.steps, "Diffusion steps T")->capture_default_str();
        cmd->add_option("--seed", a->train.seed)->capture_default_str();
        cmd->add_option("--out", a->out)->capture_default_str();
        cmd->callback([=] { run_train(*a); });
    }
    {
        auto* cmd = toy->add_subcommand("sweep", "Sample across guidance scales and score each against real phantoms");
        auto a = std::make_shared<SweepArgs>();
        cmd->add_option("--model", a->model)->capture_default_str();
        cmd->add_option("--gs", a->gs, "Comma-separated guidance scales")->capture_default_str();
        cmd->add_option("--samples", a->sweep.samples)->capture_default_str();
        cmd->add_option("--references", a->sweep.references)->capture_default_str();
        cmd->add_option("--kid-subsets", a->sweep.kid_subsets)->capture_default_str();
        cmd->add_option("--per-condition", a->sweep.samples_per_condition,
                        "Samples sharing one condition; diversity is measured within each group")
            ->capture_default_str();
        cmd->add_option("--tag", a->sweep.model_tag, "Model name in the report")->capture_default_str();
        cmd->add_option("--seed", a->sweep.seed)->capture_default_str();
        cmd->add_option("--out", a->out)->capture_default_str();
        cmd->callback([=] { run_sweep(*a); });
    }
}

}  // namespace nodulegen::cli
