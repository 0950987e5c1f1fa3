// Copyright 2026 The Anytime Authors
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

#include "anytime/session.hpp"

namespace httplib {
class Server;
}

namespace anytime {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir = "sessions";
  // When non-empty, every request must carry "X-Auth-Token: <token>".
  std::string token;
};

// Routes:
//   POST /sessions                     {"config", "policy", "meta"?}
//   POST /sessions/{id}/observations   {"t", "expected_k", "meta"?}
//   POST /sessions/{id}/policy         {"policy", "expected_k"}
//   GET  /sessions/{id}/state
//   GET  /sessions/{id}/trajectory
std::unique_ptr<httplib::Server> make_server(SessionStore& store, const std::string& token);

// Blocks until the server stops. Returns false when binding fails.
bool serve_sessions(const ServerOptions& options);

}  // namespace anytime
