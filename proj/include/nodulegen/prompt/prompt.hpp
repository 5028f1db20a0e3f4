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

#include <map>
#include <string>

#include <json.hpp>

#include "nodulegen/common/error.hpp"

namespace nodulegen::prompt {

enum class PromptErrc {
    MissingPhrase,
    InvalidLexicon,
    InvalidFinding,
};

[[nodiscard]] const char* code_name(PromptErrc code) noexcept;

using PromptError = Error<PromptErrc>;

/// Findings a prompt is compiled from. Ordinal fields use LIDC's 1-5 scales.
struct FindingVector {
    int sphericity = 5;
    int margin = 5;
    int texture = 5;
    int spiculation = 1;
    bool calcified = false;

    friend bool operator==(const FindingVector&, const FindingVector&) = default;
    friend auto operator<=>(const FindingVector&, const FindingVector&) = default;
};

/// Throws PromptError{InvalidFinding} when an ordinal field is outside [1,5].
void validate(const FindingVector& finding);

/// LIDC calcification score meaning "absent".
inline constexpr int kCalcificationAbsent = 6;

/// Maps LIDC characteristic scores keyed by their XML names to a finding.
/// Calcification 1-5 (a calcification pattern) sets `calcified`; 6 or a
/// missing score leaves it false. Missing ordinal scores throw InvalidFinding.
[[nodiscard]] FindingVector finding_from_scores(const std::map<std::string, int>& scores);

/// Score-to-phrase tables plus the clause templates they are spliced into.
///
/// `sentence` must contain each of {sphericity}, {texture} and {margin} once;
/// `spiculation_clause` must contain {spiculation} once; `calcification_clause`
/// takes no placeholders.
struct PromptLexicon {
    std::map<int, std::string> sphericity;
    std::map<int, std::string> margin;
    std::map<int, std::string> texture;
    std::map<int, std::string> spiculation;
    std::string sentence;
    std::string spiculation_clause;
    std::string calcification_clause;
    int spiculation_threshold = 3;
};

/// Lexicon reproducing the three reference example prompts.
[[nodiscard]] const PromptLexicon& default_lexicon();

/// Checks template placeholders and that sphericity/margin/texture cover 1-5.
void validate(const PromptLexicon& lexicon);

/// Reads a lexicon from JSON. Keys absent from `j` fall back to the default
/// lexicon, so a config file may override only some phrases.
[[nodiscard]] PromptLexicon lexicon_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json lexicon_to_json(const PromptLexicon& lexicon);

[[nodiscard]] std::string build_prompt(const FindingVector& finding, const PromptLexicon& lexicon);

}  // namespace nodulegen::prompt
