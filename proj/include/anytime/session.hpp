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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "anytime/confidence.hpp"
#include "anytime/sequential.hpp"
#include "anytime/serialization.hpp"

// Live sampling sessions. Every session is an append-only JSONL event log
// (<dir>/<id>.jsonl); <dir>/index.jsonl lists the sessions in creation order.
// Events:
//   {"type":"create", "config", "policy", "version":0, "at_k":0, "meta", "ts"}
//   {"type":"policy", "policy", "version", "at_k", "ts"}
//   {"type":"observation", "k", "t", "version", "state", "meta", "ts"}
// Folding the events through a fresh test reproduces every stored state.

namespace anytime {

class Session {
 public:
  Session(std::string id, TestConfig cfg, StakePolicy policy);

  const std::string& id() const { return id_; }
  const TestConfig& config() const { return cfg_; }
  const StakePolicy& policy() const { return policy_; }
  std::size_t k() const { return test_.snapshot().k; }
  int version() const { return version_; }

  // Current state: test snapshot plus policy version, running upper bound and
  // running interval (null when the needed support bounds are missing).
  Json state() const;

  // Both validate before touching any state.
  Json observe(double t);
  void switch_policy(StakePolicy policy);

 private:
  std::string id_;
  TestConfig cfg_;
  StakePolicy policy_;
  int version_ = 0;
  SequentialTest test_;
  std::optional<RunningUpperBound> bound_;
  std::optional<RunningInterval> interval_;
};

// Throws Error(kInvalidPolicy) with the validator's report.
void validate_session_policy(const StakePolicy& policy, const TestConfig& cfg);

class SessionStore {
 public:
  // Loads and replays every session listed in the index. Throws
  // Error(kParse) when a stored state does not match its replay.
  explicit SessionStore(std::filesystem::path dir);

  std::string create(const TestConfig& cfg, const StakePolicy& policy, const Json& meta = {});

  // expected_k must equal k + 1; otherwise Error(kConflict).
  Json append_observation(const std::string& id, double t, std::size_t expected_k,
                          const Json& meta = {});

  // expected_k must equal the current k. Returns the new version.
  int change_policy(const std::string& id, const StakePolicy& policy, std::size_t expected_k);

  Json state(const std::string& id) const;
  // {"id", "events": [...]} in log order.
  Json trajectory(const std::string& id) const;

  // Replays the stored log of `id` and compares every state; true when all
  // match exactly.
  bool verify_replay(const std::string& id) const;

  std::vector<std::string> ids() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Entry {
    mutable std::mutex mutex;
    std::unique_ptr<Session> session;
    std::vector<Json> events;
  };

  Entry& find(const std::string& id) const;
  void append_line(const std::filesystem::path& file, const Json& j) const;
  std::filesystem::path log_path(const std::string& id) const;
  static std::unique_ptr<Session> replay(const std::string& id, const std::vector<Json>& events,
                                         bool check_states);

  std::filesystem::path dir_;
  mutable std::mutex index_mutex_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
  std::vector<std::string> order_;
};

bool valid_session_id(const std::string& id);

}  // namespace anytime
