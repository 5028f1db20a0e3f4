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


#include <algorithm>
#include <cstdio>

#include "commands.hpp"
#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/common/png_io.hpp"
#include "nodulegen/diffusion/features.hpp"
#include "nodulegen/metrics/clip_score.hpp"
#include "nodulegen/metrics/frechet.hpp"
#include "nodulegen/metrics/kid.hpp"
#include "nodulegen/metrics/lpips.hpp"
#include "nodulegen/metrics/report.hpp"

namespace nodulegen::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPhantomProvider = "phantom";

void run_extract(const std::string& images, const std::string& provider, const std::string& out,
                 const std::string& act_out) {
    if (provider != kPhantomProvider) {
        throw std::runtime_error("built-in extraction supports only --provider " + std::string(kPhantomProvider) +
                                 "; other providers are external executables honoring this command line");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(images)) {
        if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .png files in " + images);

    std::vector<Grid<float>> grids;
    std::vector<std::string> ids;
    for (const auto& f : files) {
        const auto png = read_png(f.string());
        Grid<float> g(png.rows(), png.cols());
        for (std::size_t i = 0; i < png.size(); ++i) g.values()[i] = static_cast<float>(png.values()[i]) / 255.0f;
        grids.push_back(std::move(g));
        ids.push_back(f.stem().string());
    }
    auto m = diffusion::feature_matrix(grids);
    m.provider = kPhantomProvider;
    m.row_ids = ids;
    metrics::write_emb1(out, m);
    std::printf("%zu x %zu features -> %s\n", m.rows, m.dim, out.c_str());
    if (!act_out.empty()) {
        std::vector<metrics::ActivationStack> stacks;
        for (const auto& g : grids) stacks.push_back(diffusion::perceptual_stack(g));
        metrics::write_act1(act_out, stacks);
        std::printf("%zu activation stacks -> %s\n", stacks.size(), act_out.c_str());
    }
}

struct MetricsArgs {
    std::string real, gen, gen_clip, text, gen_bio, text_bio, real_act, gen_act, out, model = "model";
    double gs = 0.0;
    std::size_t kid_subsets = 100;
    std::size_t kid_subset_size = 0;
    std::uint64_t seed = 0;
};

void run_metrics(const MetricsArgs& a) {
    metrics::MetricCell cell;
    const auto real = metrics::read_emb1(a.real);
    const auto gen = metrics::read_emb1(a.gen);
    cell.fid = metrics::fid(real, gen);
    const auto kid = metrics::kid_unbiased(real, gen, {.subset_size = a.kid_subset_size,
                                                       .n_subsets = a.kid_subsets,
                                                       .seed = a.seed,
                                                       .kernel = {}});
    cell.kid_mean = kid.mean;
    cell.kid_std = kid.std;
    if (!a.text.empty()) {
        const auto images = a.gen_clip.empty() ? gen : metrics::read_emb1(a.gen_clip);
        cell.clipscore = metrics::mean_clip_score(images, metrics::read_emb1(a.text));
    }
    if (!a.gen_bio.empty() || !a.text_bio.empty()) {
        if (a.gen_bio.empty() || a.text_bio.empty()) throw std::runtime_error("--gen-bio and --text-bio go together");
        cell.bioclipscore = metrics::mean_clip_score(metrics::read_emb1(a.gen_bio), metrics::read_emb1(a.text_bio));
    }
    if (!a.gen_act.empty()) {
        const auto g = metrics::read_act1(a.gen_act);
        cell.lpips_diversity = metrics::lpips_diversity(g);
        if (!a.real_act.empty()) cell.lpips = metrics::lpips_paired(g, metrics::read_act1(a.real_act));
    }
    const json out{{"model", a.model}, {"gs", a.gs}, {"values", metrics::to_json(cell)}};
    write_json(a.out, out);
    std::printf("%s\n", out.dump(2).c_str());
}

void collect_configs(const json& j, std::vector<metrics::ConfigMetrics>& out) {
    if (j.contains("configs")) {
        for (const auto& c : j.at("configs")) collect_configs(c, out);
        return;
    }
    out.push_back({j.at("model").get<std::string>(), j.at("gs").get<double>(), metrics::cell_from_json(j.at("values"))});
}

void run_table(const std::vector<std::string>& inputs, std::optional<double> clip, std::optional<double> bioclip,
               const std::string& out) {
    std::vector<metrics::ConfigMetrics> configs;
    for (const auto& path : inputs) collect_configs(read_json(path), configs);
    const auto report = metrics::build_metric_report(configs, {clip, bioclip});
    const auto table = metrics::render_table(report);
    if (!out.empty()) {
        auto j = metrics::to_json(report);
        j["table"] = table;
        write_json(out, j);
    }
    std::printf("%s", table.c_str());
}

}  // namespace

void add_metric_commands(CLI::App& app) {
    {
        auto* cmd = app.add_subcommand("extract", "Feature extraction for a directory of PNGs (built-in: phantom)");
        auto images = std::make_shared<std::string>();
        auto provider = std::make_shared<std::string>(kPhantomProvider);
        auto out = std::make_shared<std::string>();
        auto act = std::make_shared<std::string>();
        cmd->add_option("--images", *images)->required();
        cmd->add_option("--provider", *provider)->capture_default_str();
        cmd->add_option("--out", *out, "EMB1 output")->required();
        cmd->add_option("--act-out", *act, "Also write ACT1 perceptual stacks");
        cmd->callback([=] { run_extract(*images, *provider, *out, *act); });
    }
    {
        auto* cmd = app.add_subcommand("metrics", "FID, KID, CLIPScore, BioCLIPScore and LPIPS for one configuration");
        auto a = std::make_shared<MetricsArgs>();
        cmd->add_option("--real", a->real, "Reference image features (EMB1)")->required();
        cmd->add_option("--gen", a->gen, "Generated image features (EMB1)")->required();
        cmd->add_option("--text", a->text, "Prompt embeddings, row-aligned with the generated images");
        cmd->add_option("--gen-clip", a->gen_clip, "Image embeddings for CLIPScore when --gen holds other features");
        cmd->add_option("--gen-bio", a->gen_bio, "Biomedical image embeddings for BioCLIPScore");
        cmd->add_option("--text-bio", a->text_bio, "Biomedical prompt embeddings");
        cmd->add_option("--real-act", a->real_act, "Reference activation stacks (ACT1), paired with --gen-act");
        cmd->add_option("--gen-act", a->gen_act, "Generated activation stacks (ACT1)");
        cmd->add_option("--model", a->model)->capture_default_str();
        cmd->add_option("--gs", a->gs, "Guidance scale of this configuration")->capture_default_str();
        cmd->add_option("--kid-subsets", a->kid_subsets)->capture_default_str();
        cmd->add_option("--kid-subset-size", a->kid_subset_size, "0 means min(n, 1000)")->capture_default_str();
        cmd->add_option("--seed", a->seed)->capture_default_str();
        cmd->add_option("--out", a->out)->required();
        cmd->callback([=] { run_metrics(*a); });
    }
    {
        auto* cmd = app.add_subcommand("table", "Assemble per-configuration results into a model x GS table");
        auto inputs = std::make_shared<std::vector<std::string>>();
        auto clip = std::make_shared<std::optional<double>>();
        auto bioclip = std::make_shared<std::optional<double>>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("inputs", *inputs, "metrics or sweep JSON files")->required();
        cmd->add_option("--clip-baseline", *clip, "CLIPScore of real images against their prompts");
        cmd->add_option("--bioclip-baseline", *bioclip, "BioCLIPScore of real images against their prompts");
        cmd->add_option("--out", *out, "Report JSON");
        cmd->callback([=] { run_table(*inputs, *clip, *bioclip, *out); });
    }
}

}  // namespace nodulegen::cli
