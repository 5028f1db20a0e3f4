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

#include "nodulegen/common/error.hpp"

namespace nodulegen::study {

enum class StudyErrc {
    InsufficientImages,
    DuplicateRating,
    UnknownItem,
    IncompleteScores,
    InvalidScore,
    UnknownStudy,
    UnknownSession,
    StudyClosed,
    StudyOpen,
    SessionComplete,
    EmptySample,
    NoData,
    BadRequest,
    CorruptLog,
};

[[nodiscard]] const char* code_name(StudyErrc code) noexcept;

using StudyError = Error<StudyErrc>;

}  // namespace nodulegen::study
