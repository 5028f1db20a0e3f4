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

#include <memory>
#include <string>

#include "nodulegen/study/service.hpp"

namespace nodulegen::study {

struct ServerOptions {
    std::string static_dir;  ///< mounted at "/" when set
};

/// HTTP/JSON front of a StudyService. Responses before a study closes never
/// carry source labels or image paths; images are served by opaque URL.
class StudyServer {
public:
    explicit StudyServer(StudyService& service, ServerOptions options = {});
    ~StudyServer();
    StudyServer(const StudyServer&) = delete;
    StudyServer& operator=(const StudyServer&) = delete;

    /// Binds and starts serving on a background thread. Port 0 picks a free
    /// port. Returns the bound port.
    int start(const std::string& host, int port);
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// HTTP status for a service error.
[[nodiscard]] int http_status(StudyErrc code) noexcept;

}  // namespace nodulegen::study
