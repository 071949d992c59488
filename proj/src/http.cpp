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

#include "star/http.hpp"

#include <thread>

#include <httplib.h>

#include "star/error.hpp"

namespace star {

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttplibTransport(const std::string& base_url, std::chrono::milliseconds timeout) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
      throw InvalidArgumentError("endpoint '" + base_url + "' lacks a scheme");
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    timeout_ = timeout;
  }

  HttpResponse post(const std::string& path, const std::string& body,
                    const HttpHeaders& headers) override {
    httplib::Client client(origin_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto result = client.Post(prefix_ + path, h, body, "application/json");
    if (!result) return {-1, "transport error: " + httplib::to_string(result.error())};
    return {result->status, result->body};
  }

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::milliseconds timeout_{};
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::milliseconds timeout) {
  return std::make_shared<HttplibTransport>(base_url, timeout);
}

bool retry_with_backoff(int max_attempts, std::chrono::milliseconds base,
                        const std::function<bool(int)>& attempt) {
  auto delay = base;
  for (int i = 0; i < std::max(1, max_attempts); ++i) {
    if (i > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    if (attempt(i)) return true;
  }
  return false;
}

}  // namespace star
