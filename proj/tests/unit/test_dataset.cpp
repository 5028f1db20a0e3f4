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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

#include "../support/fixtures.hpp"
#include "nodulegen/common/jsonl.hpp"
#include "nodulegen/common/png_io.hpp"
#include "nodulegen/dataset/augment.hpp"
#include "nodulegen/dataset/manifest.hpp"
#include "nodulegen/dataset/split.hpp"

using namespace nodulegen;
using namespace nodulegen::dataset;
namespace fs = std::filesystem;

namespace {

std::vector<StratumItem> make_items(const std::vector<std::size_t>& per_stratum) {
    std::vector<StratumItem> items;
    for (std::size_t s = 0; s < per_stratum.size(); ++s) {
        for (std::size_t i = 0; i < per_stratum[s]; ++i) {
            items.push_back({"LIDC-" + std::to_string(s + 1) + "-" + std::to_string(i), static_cast<int>(s + 1)});
        }
    }
    return items;
}

std::array<std::size_t, 3> tally(const std::vector<Split>& splits) {
    std::array<std::size_t, 3> n{};
    for (auto s : splits) ++n[static_cast<int>(s)];
    return n;
}

Grid<std::uint8_t> random_image(std::mt19937& rng, std::size_t n) {
    Grid<std::uint8_t> g(n, n);
    std::uniform_int_distribution<int> v(0, 255);
    for (auto& x : g.values()) x = static_cast<std::uint8_t>(v(rng));
    return g;
}

}  // namespace

TEST_CASE("ratio parsing") {
    CHECK(parse_ratios("7:2:1").parts == std::array<unsigned, 3>{7, 2, 1});
    CHECK(parse_ratios("8:1:1").parts == std::array<unsigned, 3>{8, 1, 1});
    for (const char* bad : {"7:2", "7:2:1:0", "a:b:c", "0:0:0", "7:-2:1", ""}) {
        CHECK_THROWS_AS((void)parse_ratios(bad), DatasetError);
    }
}

TEST_CASE("largest-remainder allocation") {
    const SplitRatios r{};
    CHECK(allocate_counts(10, r) == std::array<std::size_t, 3>{7, 2, 1});
    CHECK(allocate_counts(20, r) == std::array<std::size_t, 3>{14, 4, 2});
    CHECK(allocate_counts(413, r) == std::array<std::size_t, 3>{289, 83, 41});
    CHECK(allocate_counts(416, r) == std::array<std::size_t, 3>{291, 83, 42});
    CHECK(allocate_counts(419, r) == std::array<std::size_t, 3>{293, 84, 42});
    CHECK(allocate_counts(1, r) == std::array<std::size_t, 3>{1, 0, 0});
    CHECK(allocate_counts(0, r) == std::array<std::size_t, 3>{0, 0, 0});
    // Three equal remainders of 1/3: train and val take the two spares.
    CHECK(allocate_counts(2, SplitRatios{{1, 1, 1}}) == std::array<std::size_t, 3>{1, 1, 0});

    for (std::size_t n = 0; n < 400; ++n) {
        const auto c = allocate_counts(n, r);
        CHECK(c[0] + c[1] + c[2] == n);
        for (int k = 0; k < 3; ++k) {
            const double quota = n * r.parts[k] / 10.0;
            CHECK(std::abs(static_cast<double>(c[k]) - quota) < 1.0);
        }
    }
}

TEST_CASE("stratified split counts") {
    SUBCASE("10 items in one stratum") {
        CHECK(tally(stratified_split(make_items({10}), {}, 1)) == std::array<std::size_t, 3>{7, 2, 1});
    }
    SUBCASE("five strata of 20") {
        const auto items = make_items({20, 20, 20, 20, 20});
        const auto splits = stratified_split(items, {}, 42);
        std::map<int, std::array<std::size_t, 3>> per;
        for (std::size_t i = 0; i < items.size(); ++i) ++per[items[i].stratum][static_cast<int>(splits[i])];
        for (const auto& [stratum, counts] : per) CHECK(counts == std::array<std::size_t, 3>{14, 4, 2});
    }
    SUBCASE("2077 nodules") {
        const auto splits = stratified_split(make_items({413, 413, 416, 416, 419}), {}, 42);
        CHECK(tally(splits) == std::array<std::size_t, 3>{1453, 416, 208});
    }
}

TEST_CASE("split is deterministic, seed-sensitive and independent of input order") {
    auto items = make_items({25, 31, 12, 7, 40});
    const auto reference = stratified_split(items, {}, 42);
    CHECK(stratified_split(items, {}, 42) == reference);
    CHECK(stratified_split(items, {}, 43) != reference);

    std::map<std::string, Split> by_id;
    for (std::size_t i = 0; i < items.size(); ++i) by_id[items[i].id] = reference[i];
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(items.begin(), items.end(), rng);
        const auto splits = stratified_split(items, {}, 42);
        for (std::size_t i = 0; i < items.size(); ++i) CHECK(splits[i] == by_id.at(items[i].id));
    }
}

TEST_CASE("split input errors") {
    CHECK_THROWS_AS((void)stratified_split(std::vector<StratumItem>{}, {}, 1), DatasetError);
    const std::vector<StratumItem> bad{{"a", 0}};
    CHECK_THROWS_AS((void)stratified_split(bad, {}, 1), DatasetError);
    const std::vector<StratumItem> dup{{"a", 1}, {"a", 2}};
    CHECK_THROWS_AS((void)stratified_split(dup, {}, 1), DatasetError);
}

TEST_CASE("rotation and flip on a 2x2 image") {
    const Grid<int> g(2, 2, std::vector<int>{1, 2, 3, 4});
    CHECK(rotate90_ccw(g) == Grid<int>(2, 2, std::vector<int>{2, 4, 1, 3}));
    CHECK(flip_horizontal(g) == Grid<int>(2, 2, std::vector<int>{2, 1, 4, 3}));
    CHECK(apply_tag(g, {2, false}) == Grid<int>(2, 2, std::vector<int>{4, 3, 2, 1}));
    CHECK(apply_tag(apply_tag(g, {2, false}), {2, false}) == g);
    CHECK(apply_tag(g, {1, true}) == Grid<int>(2, 2, std::vector<int>{4, 2, 3, 1}));
}

TEST_CASE("augment produces eight variants with the canonical tags") {
    std::mt19937 rng(9);
    const auto img = random_image(rng, 6);
    const auto variants = augment(img);
    CHECK(variants[0].second == img);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(variants[k].first == all_augment_tags()[k]);
        CHECK(tag_index(variants[k].first) == k);
        CHECK(parse_tag(tag_name(variants[k].first)) == variants[k].first);
        for (std::size_t j = 0; j < k; ++j) CHECK(variants[j].second != variants[k].second);
    }
    CHECK(tag_name({0, false}) == "orig-noflip");
    CHECK(tag_name({3, true}) == "r270-flip");
    CHECK_THROWS_AS((void)parse_tag("r45-flip"), DatasetError);

    const Grid<std::uint8_t> constant(5, 5, std::uint8_t{77});
    for (const auto& [tag, pixels] : augment(constant)) CHECK(pixels == constant);
    CHECK_THROWS_AS((void)augment(Grid<std::uint8_t>(3, 4)), DatasetError);
}

TEST_CASE("composition of tags matches sequential application") {
    std::mt19937 rng(17);
    const auto img = random_image(rng, 5);
    for (const auto& a : all_augment_tags()) {
        for (const auto& b : all_augment_tags()) {
            CHECK(apply_tag(apply_tag(img, a), b) == apply_tag(img, compose(b, a)));
        }
        CHECK(apply_tag(apply_tag(img, a), a) == apply_tag(img, compose(a, a)));
    }
}

TEST_CASE("manifest JSON round-trip") {
    const ManifestEntry e{"LIDC-0001-N1", "images/a.png", "The nodule is round.", 3, Split::Val, {1, true}};
    const auto j = to_json(e);
    CHECK(j.at("augmentation") == "r90-flip");
    CHECK(j.at("split") == "val");
    CHECK(entry_from_json(j) == e);
    CHECK_THROWS_AS((void)entry_from_json(nlohmann::json{{"nodule_id", "x"}}), DatasetError);
    CHECK(safe_file_stem("LIDC/0001 N1") == "LIDC_0001_N1");
}

TEST_CASE("emit_manifest expands train entries and copies the rest") {
    const auto dir = testing::scratch_dir("emit_manifest");
    std::mt19937 rng(1);
    const auto train_img = random_image(rng, 8);
    const auto val_img = random_image(rng, 8);
    write_png((dir / "a.png").string(), train_img);
    write_png((dir / "b.png").string(), val_img);

    const std::vector<ManifestEntry> entries{
        {"N-b", "b.png", "prompt b", 2, Split::Val, {}},
        {"N-a", "a.png", "prompt a", 4, Split::Train, {}},
    };
    EmitOptions opts;
    opts.source_dir = dir.string();
    const auto out = dir / "out";
    const auto lines = emit_manifest(entries, out.string(), opts);
    REQUIRE(lines.size() == 9);
    for (std::size_t k = 0; k < 8; ++k) {
        CHECK(lines[k].nodule_id == "N-a");
        CHECK(lines[k].prompt == "prompt a");
        CHECK(lines[k].augmentation == all_augment_tags()[k]);
        CHECK(read_png((out / lines[k].image_path).string()) == apply_tag(train_img, lines[k].augmentation));
    }
    CHECK(lines[8].nodule_id == "N-b");
    CHECK(lines[8].augmentation == AugmentTag{});
    CHECK(read_png((out / lines[8].image_path).string()) == val_img);

    const auto rows = read_jsonl((out / "manifest.jsonl").string());
    REQUIRE(rows.size() == 9);
    CHECK(entry_from_json(rows[3]) == lines[3]);

    const auto empty_out = dir / "empty";
    CHECK(emit_manifest(std::vector<ManifestEntry>{}, empty_out.string(), opts).empty());
    CHECK(fs::file_size(empty_out / "manifest.jsonl") == 0);

    const std::vector<ManifestEntry> missing{{"N-c", "nope.png", "", 1, Split::Train, {}}};
    try {
        (void)emit_manifest(missing, (dir / "missing").string(), opts);
        FAIL("expected MissingImage");
    } catch (const DatasetError& e) {
        CHECK(e.code() == DatasetErrc::MissingImage);
    }
    CHECK_FALSE(fs::exists(dir / "missing" / "manifest.jsonl"));
}
