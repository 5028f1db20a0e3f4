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


#include <cstdio>
#include <map>

#include "commands.hpp"
#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/dataset/manifest.hpp"
#include "nodulegen/ingest/pipeline.hpp"
#include "nodulegen/prompt/prompt.hpp"

namespace nodulegen::cli {

namespace fs = std::filesystem;

namespace {

void run_ingest(const std::string& dicom_dir, const std::string& xml_dir, const std::string& out,
                const ingest::IngestOptions& options) {
    const auto report = ingest::ingest_directories(dicom_dir, xml_dir, out, options);
    for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("%zu slices, %zu annotation files, %zu nodules -> %s\n", report.slices, report.annotation_files,
                report.records.size(), out.c_str());
}

void run_prompts(const std::string& manifest, const std::string& lexicon_path, const std::string& out) {
    const auto lexicon = lexicon_path.empty() ? prompt::default_lexicon()
                                              : prompt::lexicon_from_json(read_json(lexicon_path));
    prompt::validate(lexicon);
    std::vector<json> rows;
    for (auto row : read_jsonl(manifest)) {
        const auto scores = row.at("scores").get<std::map<std::string, int>>();
        const auto f = prompt::finding_from_scores(scores);
        row["prompt"] = prompt::build_prompt(f, lexicon);
        row["finding"] = {{"sphericity", f.sphericity},
                          {"margin", f.margin},
                          {"texture", f.texture},
                          {"spiculation", f.spiculation},
                          {"calcified", f.calcified}};
        row["image"] = rebase(row.at("image").get<std::string>(), dir_of(manifest), dir_of(out));
        rows.push_back(std::move(row));
    }
    write_jsonl(out, rows);
    std::printf("%zu prompts -> %s\n", rows.size(), out.c_str());
}

constexpr const char* kSplitsFile = "splits.jsonl";

void run_split(const std::string& manifest, const std::string& ratios, std::uint64_t seed, const std::string& out) {
    fs::create_directories(out);
    std::vector<dataset::ManifestEntry> entries;
    for (const auto& row : read_jsonl(manifest)) {
        auto e = dataset::entry_from_json(row);
        e.image_path = rebase(e.image_path, dir_of(manifest), out);
        entries.push_back(std::move(e));
    }
    const auto assigned = dataset::assign_splits(std::move(entries), dataset::parse_ratios(ratios), seed);
    std::array<std::size_t, 3> counts{};
    std::vector<json> rows;
    for (const auto& e : assigned) {
        ++counts[static_cast<std::size_t>(e.split)];
        rows.push_back(dataset::to_json(e));
    }
    const auto path = (fs::path(out) / kSplitsFile).string();
    write_jsonl(path, rows);
    std::printf("train %zu, val %zu, test %zu -> %s\n", counts[0], counts[1], counts[2], path.c_str());
}

void run_augment(const std::string& dir, const std::vector<std::string>& splits, const std::string& name) {
    std::vector<dataset::ManifestEntry> entries;
    for (const auto& row : read_jsonl((fs::path(dir) / kSplitsFile).string())) entries.push_back(dataset::entry_from_json(row));
    dataset::EmitOptions options;
    options.augmented_splits.clear();
    for (const auto& s : splits) options.augmented_splits.insert(dataset::parse_split(s));
    options.source_dir = dir;
    options.manifest_name = name;
    const auto written = dataset::emit_manifest(entries, dir, options);
    std::printf("%zu manifest lines -> %s\n", written.size(), (fs::path(dir) / name).string().c_str());
}

}  // namespace

void add_data_commands(CLI::App& app) {
    {
        auto* cmd = app.add_subcommand("ingest", "Crop and window annotated nodules from DICOM + XML into a manifest");
        auto dicom = std::make_shared<std::string>();
        auto xml = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("manifest.jsonl");
        auto opt = std::make_shared<ingest::IngestOptions>();
        cmd->add_option("--dicom-dir", *dicom, "Directory of DICOM slices (searched recursively)")->required();
        cmd->add_option("--xml-dir", *xml, "Directory of annotation XML files")->required();
        cmd->add_option("--out", *out, "Manifest path; images go to <dir>/images")->capture_default_str();
        cmd->add_option("--match-radius", opt->match_radius_mm, "Reader match radius, mm")->capture_default_str();
        cmd->add_option("--wl", opt->window_level, "Window level, HU")->capture_default_str();
        cmd->add_option("--ww", opt->window_width, "Window width, HU")->capture_default_str();
        cmd->add_option("--size", opt->size, "Output image side, px")->capture_default_str();
        cmd->callback([=] { run_ingest(*dicom, *xml, *out, *opt); });
    }
    {
        auto* cmd = app.add_subcommand("prompts", "Compile a text prompt for every manifest line");
        auto manifest = std::make_shared<std::string>();
        auto lexicon = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("prompts.jsonl");
        cmd->add_option("--manifest", *manifest, "Ingest manifest")->required();
        cmd->add_option("--lexicon", *lexicon, "Lexicon JSON; omitted keys use the defaults");
        cmd->add_option("--out", *out)->capture_default_str();
        cmd->callback([=] { run_prompts(*manifest, *lexicon, *out); });
    }
    {
        auto* cmd = app.add_subcommand("split", "Stratified train/val/test split by malignancy");
        auto manifest = std::make_shared<std::string>();
        auto ratios = std::make_shared<std::string>("7:2:1");
        auto seed = std::make_shared<std::uint64_t>(42);
        auto out = std::make_shared<std::string>("dataset");
        cmd->add_option("--manifest", *manifest, "Prompt manifest")->required();
        cmd->add_option("--ratios", *ratios)->capture_default_str();
        cmd->add_option("--seed", *seed)->capture_default_str();
        cmd->add_option("--out", *out, "Dataset directory; writes splits.jsonl")->capture_default_str();
        cmd->callback([=] { run_split(*manifest, *ratios, *seed, *out); });
    }
    {
        auto* cmd = app.add_subcommand("augment", "Write the final manifest with 8 symmetry variants for chosen splits");
        auto dir = std::make_shared<std::string>("dataset");
        auto splits = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"train"});
        auto name = std::make_shared<std::string>("manifest.jsonl");
        cmd->add_option("--dataset", *dir, "Directory written by split")->capture_default_str();
        cmd->add_option("--split", *splits, "Splits to augment (repeatable)")->capture_default_str();
        cmd->add_option("--manifest-name", *name)->capture_default_str();
        cmd->callback([=] { run_augment(*dir, *splits, *name); });
    }
}

}  // namespace nodulegen::cli
