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

#include "nodulegen/prompt/prompt.hpp"

#include <algorithm>
#include <string_view>
#include <vector>

namespace nodulegen::prompt {

const char* code_name(PromptErrc code) noexcept {
    switch (code) {
        case PromptErrc::MissingPhrase: return "MissingPhrase";
        case PromptErrc::InvalidLexicon: return "InvalidLexicon";
        case PromptErrc::InvalidFinding: return "InvalidFinding";
    }
    return "PromptError";
}

void validate(const FindingVector& f) {
    const std::pair<const char*, int> fields[] = {{"sphericity", f.sphericity},
                                                  {"margin", f.margin},
                                                  {"texture", f.texture},
                                                  {"spiculation", f.spiculation}};
    for (const auto& [name, value] : fields) {
        if (value < 1 || value > 5) {
            throw PromptError(PromptErrc::InvalidFinding,
                              std::string(name) + "=" + std::to_string(value));
        }
    }
}

FindingVector finding_from_scores(const std::map<std::string, int>& scores) {
    auto score = [&](const char* name) {
        auto it = scores.find(name);
        if (it == scores.end()) {
            throw PromptError(PromptErrc::InvalidFinding, std::string("missing ") + name);
        }
        return it->second;
    };
    FindingVector f{.sphericity = score("sphericity"),
                    .margin = score("margin"),
                    .texture = score("texture"),
                    .spiculation = score("spiculation"),
                    .calcified = false};
    if (auto it = scores.find("calcification"); it != scores.end()) {
        f.calcified = it->second != kCalcificationAbsent;
    }
    validate(f);
    return f;
}

const PromptLexicon& default_lexicon() {
    static const PromptLexicon lexicon{
        .sphericity = {{5, "round"}, {4, "nearly round"}, {3, "oval"}, {2, "ovoid"}, {1, "linear"}},
        .margin = {{5, "well-defined"},
                   {4, "mostly well-defined"},
                   {3, "relatively well-defined"},
                   {2, "poorly defined"},
                   {1, "ill-defined"}},
        .texture = {{5, "solid"},
                    {4, "mostly solid"},
                    {3, "part-solid"},
                    {2, "mostly ground-glass"},
                    {1, "ground-glass"}},
        .spiculation = {{5, "marked"}, {4, "noticeable"}, {3, "moderate"}},
        .sentence = "The nodule is {sphericity} in shape, {texture} internally, with {margin} margins.",
        .spiculation_clause = " {spiculation} spiculation is seen.",
        .calcification_clause = " calcification is present.",
        .spiculation_threshold = 3,
    };
    return lexicon;
}

namespace {

// Every "{name}" in `text`, in order of appearance.
std::vector<std::string> placeholders(std::string_view text) {
    std::vector<std::string> names;
    std::size_t pos = 0;
    while ((pos = text.find('{', pos)) != std::string_view::npos) {
        const auto end = text.find('}', pos);
        if (end == std::string_view::npos) {
            throw PromptError(PromptErrc::InvalidLexicon,
                              "unterminated placeholder in '" + std::string(text) + "'");
        }
        names.emplace_back(text.substr(pos + 1, end - pos - 1));
        pos = end + 1;
    }
    return names;
}

void expect_placeholders(std::string_view template_name, std::string_view text,
                         std::vector<std::string> expected) {
    auto found = placeholders(text);
    std::sort(found.begin(), found.end());
    std::sort(expected.begin(), expected.end());
    if (found != expected) {
        throw PromptError(PromptErrc::InvalidLexicon,
                          std::string(template_name) + " has the wrong placeholders");
    }
}

// Single pass so substituted phrases are never rescanned for placeholders.
std::string render(std::string_view text, const std::map<std::string, std::string, std::less<>>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        const auto close = text.find('}', open);
        out.append(text.substr(pos, open - pos));
        out.append(values.find(text.substr(open + 1, close - open - 1))->second);
        pos = close + 1;
    }
    return out;
}

const std::string& phrase(const std::map<int, std::string>& table, const char* characteristic,
                          int score) {
    auto it = table.find(score);
    if (it == table.end()) {
        throw PromptError(PromptErrc::MissingPhrase,
                          std::string(characteristic) + " score " + std::to_string(score));
    }
    return it->second;
}

std::map<int, std::string> table_from_json(const nlohmann::json& j,
                                           const std::map<int, std::string>& fallback) {
    if (j.is_null()) return fallback;
    if (!j.is_object()) {
        throw PromptError(PromptErrc::InvalidLexicon, "phrase table must be an object");
    }
    std::map<int, std::string> table;
    for (const auto& [key, value] : j.items()) {
        int score = 0;
        try {
            std::size_t used = 0;
            score = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw PromptError(PromptErrc::InvalidLexicon, "score key '" + key + "' is not an integer");
        }
        table[score] = value.get<std::string>();
    }
    return table;
}

nlohmann::json table_to_json(const std::map<int, std::string>& table) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [score, text] : table) j[std::to_string(score)] = text;
    return j;
}

void validate_templates(const PromptLexicon& lex) {
    expect_placeholders("sentence", lex.sentence, {"sphericity", "texture", "margin"});
    expect_placeholders("spiculation_clause", lex.spiculation_clause, {"spiculation"});
    expect_placeholders("calcification_clause", lex.calcification_clause, {});
}

}  // namespace

void validate(const PromptLexicon& lex) {
    validate_templates(lex);
    const std::pair<const char*, const std::map<int, std::string>*> complete[] = {
        {"sphericity", &lex.sphericity}, {"margin", &lex.margin}, {"texture", &lex.texture}};
    for (const auto& [name, table] : complete) {
        for (int score = 1; score <= 5; ++score) {
            if (table->count(score) == 0) {
                throw PromptError(PromptErrc::InvalidLexicon,
                                  std::string(name) + " lacks a phrase for score " +
                                      std::to_string(score));
            }
        }
    }
}

PromptLexicon lexicon_from_json(const nlohmann::json& j) {
    const auto& d = default_lexicon();
    auto get = [&](const char* key) { return j.contains(key) ? j.at(key) : nlohmann::json(); };
    PromptLexicon lex;
    try {
        lex.sphericity = table_from_json(get("sphericity"), d.sphericity);
        lex.margin = table_from_json(get("margin"), d.margin);
        lex.texture = table_from_json(get("texture"), d.texture);
        lex.spiculation = table_from_json(get("spiculation"), d.spiculation);
        lex.sentence = j.value("sentence", d.sentence);
        lex.spiculation_clause = j.value("spiculation_clause", d.spiculation_clause);
        lex.calcification_clause = j.value("calcification_clause", d.calcification_clause);
        lex.spiculation_threshold = j.value("spiculation_threshold", d.spiculation_threshold);
    } catch (const nlohmann::json::exception& e) {
        throw PromptError(PromptErrc::InvalidLexicon, e.what());
    }
    validate(lex);
    return lex;
}

nlohmann::json lexicon_to_json(const PromptLexicon& lex) {
    return {{"sphericity", table_to_json(lex.sphericity)},
            {"margin", table_to_json(lex.margin)},
            {"texture", table_to_json(lex.texture)},
            {"spiculation", table_to_json(lex.spiculation)},
            {"sentence", lex.sentence},
            {"spiculation_clause", lex.spiculation_clause},
            {"calcification_clause", lex.calcification_clause},
            {"spiculation_threshold", lex.spiculation_threshold}};
}

std::string build_prompt(const FindingVector& f, const PromptLexicon& lex) {
    validate(f);
    validate_templates(lex);
    std::string text = render(lex.sentence,
                              {{"sphericity", phrase(lex.sphericity, "sphericity", f.sphericity)},
                               {"texture", phrase(lex.texture, "texture", f.texture)},
                               {"margin", phrase(lex.margin, "margin", f.margin)}});
    if (f.spiculation >= lex.spiculation_threshold) {
        text += render(lex.spiculation_clause,
                       {{"spiculation", phrase(lex.spiculation, "spiculation", f.spiculation)}});
    }
    if (f.calcified) {
        text += lex.calcification_clause;
    }
    return text;
}

}  // namespace nodulegen::prompt
