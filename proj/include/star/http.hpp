// Copyright 2026 The STAR Authors
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

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace star {

struct HttpResponse {
  int status = 0;  // -1 for transport-level failures
  std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Minimal POST-only transport; swapped out in tests.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            const HttpHeaders& headers) = 0;
};

// `base_url` is scheme://host[:port][/prefix]; request paths are appended to the prefix.
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::milliseconds timeout);

// Calls `attempt` up to `max_attempts` times, sleeping base, 2*base, 4*base, ...
// between tries. `attempt` returns true on success. Returns false if all failed.
bool retry_with_backoff(int max_attempts, std::chrono::milliseconds base,
                        const std::function<bool(int attempt_no)>& attempt);

}  // namespace star
