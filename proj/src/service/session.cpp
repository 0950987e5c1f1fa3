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

#include "anytime/session.hpp"

#include <chrono>
#include <fstream>
#include <random>

#include "anytime/error.hpp"

namespace anytime {
namespace {

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  return std::to_string(ms);
}

std::string new_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  std::uint64_t bits = rng();
  for (int i = 0; i < 16; ++i, bits >>= 4) id += kHex[bits & 15];
  return id;
}

Json interval_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

}  // namespace

bool valid_session_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char ch : id) {
    if (!((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z'))) return false;
  }
  return true;
}

void validate_session_policy(const StakePolicy& policy, const TestConfig& cfg) {
  validate_policy(policy, cfg);
  if (cfg.tau0 && cfg.tau1) {
    const auto grid = default_mu_grid(cfg);
    const PolicyReport report = validate_c_policy(policy, cfg, grid);
    if (!report.ok) throw Error(ErrorCode::kInvalidPolicy, report.message);
  }
}

Session::Session(std::string id, TestConfig cfg, StakePolicy policy)
    : id_(std::move(id)), cfg_(std::move(cfg)), policy_(std::move(policy)), test_(cfg_, policy_) {
  validate_session_policy(policy_, cfg_);
  if (cfg_.tau1) bound_.emplace(cfg_, policy_, true);
  if (cfg_.tau0 && cfg_.tau1) interval_.emplace(cfg_, MixtureSpec::uniform(-1.0, 1.0), true);
}

Json Session::state() const {
  Json j = to_json(test_.snapshot());
  j["policy_version"] = version_;
  if (bound_) {
    j["bound"] = number_to_json(bound_->result().running_min);
    j["mu_r"] = number_to_json(bound_->result().mu_r);
  } else {
    j["bound"] = nullptr;
    j["mu_r"] = nullptr;
  }
  if (interval_) {
    const IntervalResult& r = interval_->result();
    j["interval"] = Json{{"running", r.running ? interval_json(*r.running) : Json(nullptr)},
                         {"empty", !r.running},
                         {"last_nonempty", interval_json(r.last_nonempty)},
                         {"at_k", interval_json(r.at_k)}};
  } else {
    j["interval"] = nullptr;
  }
  return j;
}

Json Session::observe(double t) {
  cfg_.check_observation(t, k() + 1);
  test_.observe(t);
  if (bound_) bound_->observe(t);
  if (interval_) interval_->observe(t);
  return state();
}

void Session::switch_policy(StakePolicy policy) {
  validate_session_policy(policy, cfg_);
  test_.switch_policy(policy);
  if (bound_) bound_->switch_policy(policy);
  policy_ = std::move(policy);
  ++version_;
}

// ---------------------------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  std::ifstream index(dir_ / "index.jsonl");
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const Json entry = Json::parse(line);
    const std::string id = entry.at("id").get<std::string>();
    if (!valid_session_id(id) || entries_.count(id)) continue;
    std::vector<Json> events;
    std::ifstream log(log_path(id));
    std::string event_line;
    while (std::getline(log, event_line)) {
      if (!event_line.empty()) events.push_back(Json::parse(event_line));
    }
    auto e = std::make_unique<Entry>();
    e->session = replay(id, events, true);
    e->events = std::move(events);
    entries_.emplace(id, std::move(e));
    order_.push_back(id);
  }
}

std::filesystem::path SessionStore::log_path(const std::string& id) const {
  return dir_ / (id + ".jsonl");
}

void SessionStore::append_line(const std::filesystem::path& file, const Json& j) const {
  std::ofstream out(file, std::ios::app);
  out << j.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kInvalidConfig, "cannot write " + file.string());
}

std::unique_ptr<Session> SessionStore::replay(const std::string& id,
                                              const std::vector<Json>& events,
                                              bool check_states) {
  if (events.empty() || events.front().at("type") != "create") {
    throw Error(ErrorCode::kParse, "session " + id + ": log does not start with a create event");
  }
  auto session = std::make_unique<Session>(id, config_from_json(events.front().at("config")),
                                           policy_from_json(events.front().at("policy")));
  for (std::size_t i = 1; i < events.size(); ++i) {
    const Json& ev = events[i];
    const std::string type = ev.at("type").get<std::string>();
    if (type == "policy") {
      session->switch_policy(policy_from_json(ev.at("policy")));
    } else if (type == "observation") {
      const Json state = session->observe(number_from_json(ev.at("t"), "t"));
      if (check_states && state != ev.at("state")) {
        throw Error(ErrorCode::kParse, "session " + id + ": replayed state differs at k=" +
                                           std::to_string(session->k()));
      }
    } else {
      throw Error(ErrorCode::kParse, "session " + id + ": unknown event type '" + type + "'");
    }
  }
  return session;
}

SessionStore::Entry& SessionStore::find(const std::string& id) const {
  std::lock_guard lock(index_mutex_);
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::kNotFound, "no session '" + id + "'");
  return *it->second;
}

std::string SessionStore::create(const TestConfig& cfg, const StakePolicy& policy,
                                 const Json& meta) {
  cfg.validate();
  std::lock_guard lock(index_mutex_);
  std::string id = new_id();
  while (entries_.count(id) || std::filesystem::exists(log_path(id))) id = new_id();
  auto e = std::make_unique<Entry>();
  e->session = std::make_unique<Session>(id, cfg, policy);
  Json ev{{"type", "create"}, {"config", to_json(cfg)}, {"policy", to_json(policy)},
          {"version", 0},     {"at_k", 0},              {"ts", timestamp()}};
  if (!meta.is_null()) ev["meta"] = meta;
  append_line(log_path(id), ev);
  append_line(dir_ / "index.jsonl", Json{{"id", id}, {"ts", ev["ts"]}});
  e->events.push_back(std::move(ev));
  entries_.emplace(id, std::move(e));
  order_.push_back(id);
  return id;
}

Json SessionStore::append_observation(const std::string& id, double t, std::size_t expected_k,
                                      const Json& meta) {
  Entry& e = find(id);
  std::lock_guard lock(e.mutex);
  Session& s = *e.session;
  if (expected_k != s.k() + 1) {
    throw Error(ErrorCode::kConflict, "expected_k " + std::to_string(expected_k) +
                                          " is stale; next observation is k=" +
                                          std::to_string(s.k() + 1));
  }
  const Json state = s.observe(t);
  Json ev{{"type", "observation"}, {"k", s.k()},     {"t", t},
          {"version", s.version()}, {"state", state}, {"ts", timestamp()}};
  if (!meta.is_null()) ev["meta"] = meta;
  append_line(log_path(id), ev);
  e.events.push_back(std::move(ev));
  return state;
}

int SessionStore::change_policy(const std::string& id, const StakePolicy& policy,
                                std::size_t expected_k) {
  Entry& e = find(id);
  std::lock_guard lock(e.mutex);
  Session& s = *e.session;
  if (expected_k != s.k()) {
    throw Error(ErrorCode::kConflict, "expected_k " + std::to_string(expected_k) +
                                          " is stale; current k=" + std::to_string(s.k()));
  }
  s.switch_policy(policy);
  Json ev{{"type", "policy"}, {"policy", to_json(policy)}, {"version", s.version()},
          {"at_k", s.k()},    {"ts", timestamp()}};
  append_line(log_path(id), ev);
  e.events.push_back(std::move(ev));
  return s.version();
}

Json SessionStore::state(const std::string& id) const {
  Entry& e = find(id);
  std::lock_guard lock(e.mutex);
  Json j = e.session->state();
  j["id"] = id;
  return j;
}

Json SessionStore::trajectory(const std::string& id) const {
  Entry& e = find(id);
  std::lock_guard lock(e.mutex);
  return Json{{"id", id}, {"events", e.events}};
}

bool SessionStore::verify_replay(const std::string& id) const {
  std::vector<Json> events;
  std::ifstream log(log_path(id));
  std::string line;
  while (std::getline(log, line)) {
    if (!line.empty()) events.push_back(Json::parse(line));
  }
  try {
    replay(id, events, true);
  } catch (const Error&) {
    return false;
  }
  return true;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(index_mutex_);
  return order_;
}

}  // namespace anytime
